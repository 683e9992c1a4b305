#include "mtb/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mtb {

namespace {

/// Fraction of abs_tol granted to the series truncation error.
constexpr double kSeriesBudget = 0.1;
/// Hard cap on the handoff radius chosen automatically.
constexpr double kMaxAutoStart = 1e-4;

}  // namespace

double ShootConfig::start_radius() const {
  if (r_start > 0) return r_start;
  const double b = series_b(mu);
  return std::min(kMaxAutoStart, std::pow(kSeriesBudget * abs_tol / b, 0.25));
}

double ShootConfig::log_start_radius() const { return std::log(start_radius()); }

void ShootConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw std::invalid_argument("ShootConfig: " + msg); };
  if (!std::isfinite(mu) || mu < 1e-3 || mu > 30.0) fail("mu outside supported range [1e-3, 30]");
  if (!(rel_tol >= 1e-13 && rel_tol <= 1e-3)) fail("rel_tol outside [1e-13, 1e-3]");
  if (!(abs_tol >= 1e-16 && abs_tol <= 1e-3)) fail("abs_tol outside [1e-16, 1e-3]");
  if (!(zero_tol >= 1e-14 && zero_tol <= 1e-6)) fail("zero_tol outside [1e-14, 1e-6]");
  if (!(s_max_shift > 0 && s_max_shift <= 200)) fail("s_max_shift outside (0, 200]");
  if (max_steps < 1000) fail("max_steps too small to integrate any profile");
  if (r_start < 0 || !std::isfinite(r_start)) fail("negative start radius");
  if (r_start > 0) {
    if (r_start >= 0.1) fail("start radius too large: series handoff must satisfy r << 1");
    const double quartic = series_b(mu) * std::pow(r_start, 4);
    if (quartic > kSeriesBudget * abs_tol)
      fail("start radius too large for the requested tolerance (series remainder check)");
  }
}

OdeState series_initial_state(const ShootConfig& cfg) {
  const double mu = cfg.mu;
  const double r0 = cfg.start_radius();
  const double r2 = r0 * r0, r4 = r2 * r2;
  const double b = ShootConfig::series_b(mu);
  OdeState y;
  y << mu - r2 / mu + b * r4,
      -2 * r2 / mu + 4 * b * r4,
      r4 / (mu * mu),
      2 * r2 - 2 * (1 + 1 / (mu * mu)) * r4;
  return y;
}

RadialProfile integrate_profile(const ShootConfig& cfg) {
  cfg.validate();
  constexpr double two_pi = 2 * std::numbers::pi;

  RadialProfile p;
  p.mu = cfg.mu;
  p.s_start = cfg.log_start_radius();

  auto rhs = [mu = cfg.mu](double s, const OdeState& y) { return normalized_rhs(s, y, mu); };
  using Stepper = Dopri5<double, 4, decltype(rhs)>;
  Stepper::Controls ctl;
  ctl.rel_tol = cfg.rel_tol;
  ctl.abs_tol = cfg.abs_tol;
  ctl.h_init = 1e-2;
  ctl.max_steps = cfg.max_steps;
  Stepper stepper(rhs, ctl);
  stepper.start(p.s_start, series_initial_state(cfg));

  const double s_stop = cfg.s_stop();
  p.segments.reserve(512);
  for (;;) {
    p.segments.push_back(stepper.step(s_stop));
    if (stepper.y()[kU] <= 0.0) break;
    if (stepper.s() >= s_stop) {
      std::ostringstream msg;
      msg << "no zero of u before s_max = " << s_stop << " at mu = " << cfg.mu
          << ": not a crossing profile";
      throw SolverError(msg.str());
    }
  }

  // Pin the first zero inside the last segment.  u is strictly decreasing
  // (u_s < 0 from the handoff on), so plain bisection on the dense output is
  // exact to floating-point exhaustion.
  const auto& seg = p.segments.back();
  double lo = seg.s0, hi = seg.s1();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (seg.eval(mid)[kU] > 0 ? lo : hi) = mid;
  }
  p.s_hat = hi;
  const OdeState y_hat = seg.eval(p.s_hat);
  if (std::abs(y_hat[kU]) > cfg.zero_tol)
    throw SolverError("zero refinement did not reach zero_tol");

  p.tau_hat = std::exp(p.s_hat);
  p.log_lambda_mu = std::log(4.0) + 2 * p.s_hat - cfg.mu * cfg.mu - 2 * std::log(cfg.mu);
  p.dirichlet_energy = two_pi * y_hat[kLamAcc];
  p.nonlinear_mass = two_pi * y_hat[kMassAcc];
  p.energy_identity_gap =
      std::abs(p.dirichlet_energy - p.nonlinear_mass) / p.dirichlet_energy;
  p.step_count = stepper.accepted_steps();
  p.max_local_error = stepper.max_scaled_error();
  return p;
}

OdeState RadialProfile::state_at(double s) const {
  const double slack = 1e-9 * (1.0 + std::abs(s_hat) + std::abs(s_start));
  if (!(s >= s_start - slack && s <= s_hat + slack))
    throw std::invalid_argument("state_at: s outside the profile domain");
  const double sc = std::clamp(s, s_start, s_hat);
  auto it = std::upper_bound(segments.begin(), segments.end(), sc,
                             [](double val, const DenseSegment<double, 4>& g) { return val < g.s0; });
  const std::size_t idx = (it == segments.begin()) ? 0 : std::size_t(it - segments.begin() - 1);
  return segments[idx].eval(sc);
}

std::pair<double, double> evaluate_profile(const RadialProfile& profile, double s) {
  const OdeState y = profile.state_at(s);
  return {y[kU], y[kV]};
}

}  // namespace mtb
