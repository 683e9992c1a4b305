#pragma once
// Adaptive Dormand-Prince 5(4) integration with continuous (dense) output.
//
// The stepper is generic over the scalar type and over small fixed-size Eigen
// array states, so the same code drives double-precision production runs and
// long-double cross-checks.  Dense output stores, per accepted step, the five
// coefficient columns of the classical quartic interpolant; the interpolant is
// continuous across steps and matches the order of the embedded pair.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace mtb {

/// Numerical failure during integration, quadrature, or root refinement.
/// Distinct from std::invalid_argument, which marks unusable configuration.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dense-output interpolant of one accepted step on [s0, s0 + h].
template <typename Scalar, int N>
struct DenseSegment {
  using State = Eigen::Array<Scalar, N, 1>;

  Scalar s0 = 0;
  Scalar h = 0;
  Eigen::Array<Scalar, N, 5> rcont;

  Scalar s1() const { return s0 + h; }

  /// Evaluate the quartic interpolant; valid for s in [s0, s0 + h].
  State eval(Scalar s) const {
    const Scalar th = (s - s0) / h;
    const Scalar om = Scalar(1) - th;
    return rcont.col(0) +
           th * (rcont.col(1) + om * (rcont.col(2) + th * (rcont.col(3) + om * rcont.col(4))));
  }
};

/// One-step adaptive integrator: embedded 5(4) pair with PI step-size control.
/// `Rhs` is any callable Scalar x State -> State.
template <typename Scalar, int N, typename Rhs>
class Dopri5 {
public:
  using State = Eigen::Array<Scalar, N, 1>;
  using Segment = DenseSegment<Scalar, N>;

  struct Controls {
    Scalar rel_tol = Scalar(1e-10);
    Scalar abs_tol = Scalar(1e-12);
    Scalar h_init = Scalar(1e-2);
    Scalar h_max = Scalar(0);  ///< 0 means unrestricted
    std::uint64_t max_steps = 2000000;
  };

  Dopri5(Rhs rhs, const Controls& ctl) : rhs_(std::move(rhs)), ctl_(ctl) {
    if (!(ctl.rel_tol > 0) || !(ctl.abs_tol > 0) || !(ctl.h_init > 0))
      throw std::invalid_argument("Dopri5: tolerances and h_init must be positive");
  }

  void start(Scalar s0, const State& y0) {
    s_ = s0;
    y_ = y0;
    k1_ = rhs_(s_, y_);
    h_ = ctl_.h_init;
    facold_ = Scalar(1e-4);
    rejected_last_ = false;
    n_accepted_ = 0;
    n_rejected_ = 0;
    max_scaled_error_ = 0;
  }

  /// Advance by one accepted step, clipped so the step never crosses s_limit.
  /// Returns the dense segment of the step just taken.
  Segment step(Scalar s_limit) {
    if (!(s_ < s_limit))
      throw std::invalid_argument("Dopri5::step: current position is at or past s_limit");
    for (;;) {
      if (n_accepted_ + n_rejected_ >= ctl_.max_steps)
        throw SolverError("integration exceeded the step budget");
      Scalar h = h_;
      if (ctl_.h_max > 0) h = std::min(h, ctl_.h_max);
      if (s_ + h >= s_limit) h = s_limit - s_;
      if (!(h > 0) || s_ + h <= s_)
        throw SolverError("integration stalled: step size underflow");

      const State k2 = rhs_(s_ + c2 * h, State(y_ + h * (a21 * k1_)));
      const State k3 = rhs_(s_ + c3 * h, State(y_ + h * (a31 * k1_ + a32 * k2)));
      const State k4 = rhs_(s_ + c4 * h, State(y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3)));
      const State k5 = rhs_(s_ + c5 * h, State(y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4)));
      const State k6 =
          rhs_(s_ + h, State(y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
      const State ynew = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const State k7 = rhs_(s_ + h, ynew);

      const State yerr = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const State sc = ctl_.abs_tol + ctl_.rel_tol * y_.abs().max(ynew.abs());
      const Scalar err = std::sqrt((yerr / sc).square().sum() / Scalar(N));

      if (!std::isfinite(err)) {
        // State left the representable range; retry with a much smaller step.
        ++n_rejected_;
        h_ = h / 16;
        rejected_last_ = true;
        if (!(h_ > 0) || s_ + h_ <= s_)
          throw SolverError("integration blew up: non-finite state");
        continue;
      }

      const Scalar fac11 = std::pow(err, expo1);
      if (err <= Scalar(1)) {
        Scalar fac = fac11 / std::pow(facold_, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        Scalar hnew = h / fac;
        if (rejected_last_) hnew = std::min(hnew, h);
        facold_ = std::max(err, Scalar(1e-4));
        rejected_last_ = false;
        max_scaled_error_ = std::max(max_scaled_error_, err);

        Segment seg;
        seg.s0 = s_;
        seg.h = h;
        const State ydiff = ynew - y_;
        const State bspl = h * k1_ - ydiff;
        seg.rcont.col(0) = y_;
        seg.rcont.col(1) = ydiff;
        seg.rcont.col(2) = bspl;
        seg.rcont.col(3) = ydiff - h * k7 - bspl;
        seg.rcont.col(4) = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

        s_ += h;
        y_ = ynew;
        k1_ = k7;  // first-same-as-last
        h_ = hnew;
        ++n_accepted_;
        return seg;
      }
      ++n_rejected_;
      rejected_last_ = true;
      h_ = h / std::min(facc1, fac11 / safe);
    }
  }

  Scalar s() const { return s_; }
  const State& y() const { return y_; }
  std::uint64_t accepted_steps() const { return n_accepted_; }
  std::uint64_t rejected_steps() const { return n_rejected_; }
  /// Largest accepted local error estimate, scaled so 1.0 sits at tolerance.
  Scalar max_scaled_error() const { return max_scaled_error_; }

private:
  // Butcher tableau of the Dormand-Prince 5(4) pair.
  static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5,
                          c5 = Scalar(8) / 9;
  static constexpr Scalar a21 = Scalar(1) / 5;
  static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                          a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33,
                          a63 = Scalar(46732) / 5247, a64 = Scalar(49) / 176,
                          a65 = Scalar(-5103) / 18656;
  static constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113,
                          a74 = Scalar(125) / 192, a75 = Scalar(-2187) / 6784,
                          a76 = Scalar(11) / 84;
  // Difference between the 5th- and 4th-order weights.
  static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695,
                          e4 = Scalar(71) / 1920, e5 = Scalar(-17253) / 339200,
                          e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  // Dense-output weights.
  static constexpr Scalar d1 = Scalar(-12715105075.0L / 11282082432.0L);
  static constexpr Scalar d3 = Scalar(87487479700.0L / 32700410799.0L);
  static constexpr Scalar d4 = Scalar(-10690763975.0L / 1880347072.0L);
  static constexpr Scalar d5 = Scalar(701980252875.0L / 199316789632.0L);
  static constexpr Scalar d6 = Scalar(-1453857185.0L / 822651844.0L);
  static constexpr Scalar d7 = Scalar(69997945.0L / 29380423.0L);
  // PI controller (Hairer's defaults for this pair).
  static constexpr Scalar safe = Scalar(0.9), beta = Scalar(0.04),
                          expo1 = Scalar(0.2) - beta * Scalar(0.75);
  static constexpr Scalar facc1 = Scalar(5);    // limits hnew/h to [0.2, 10]
  static constexpr Scalar facc2 = Scalar(0.1);

  Rhs rhs_;
  Controls ctl_;
  Scalar s_ = 0, h_ = 0, facold_ = Scalar(1e-4), max_scaled_error_ = 0;
  State y_ = State::Zero(), k1_ = State::Zero();
  bool rejected_last_ = false;
  std::uint64_t n_accepted_ = 0, n_rejected_ = 0;
};

}  // namespace mtb
