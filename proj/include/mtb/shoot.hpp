#pragma once
// Shooting integration for positive radial solutions of
//
//     -u'' - u'/r = lambda u exp(u^2),   u(0) = mu,  u'(0) = 0,
//
// in bubble-normalized form.  Fixing lambda* = 4 / (mu^2 exp(mu^2)) and
// working in log radius s = log r turns the equation into
//
//     u_ss = -e^{2s} g(u),   g(u) = (4 u / mu^2) exp(u^2 - mu^2),
//
// whose fused exponent u^2 - mu^2 + 2s stays bounded along the branch, so the
// integration never overflows even at mu = 30.  The first zero s_hat of u
// recovers the eigenvalue of the original problem through
// log lambda_mu = log 4 + 2 s_hat - mu^2 - 2 log mu.
//
// The state carries two running integrals alongside (u, u_s): lam_acc for the
// Dirichlet energy and mass_acc for the nonlinear mass, which must agree after
// scaling (integration by parts) and give a built-in consistency check.

#include "mtb/rk45.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <utility>
#include <vector>

namespace mtb {

/// Component layout of the augmented shooting state.
enum StateIndex : int { kU = 0, kV = 1, kLamAcc = 2, kMassAcc = 3 };

/// (u, u_s, dirichlet accumulator, mass accumulator) at one log-radius.
using OdeState = Eigen::Array4d;

/// Configuration of a single shooting run.
struct ShootConfig {
  double mu = 1.0;          ///< central value u(0); supported range [1e-3, 30]
  double rel_tol = 1e-10;   ///< relative tolerance of the adaptive stepper
  double abs_tol = 1e-12;   ///< absolute tolerance of the adaptive stepper
  double zero_tol = 1e-12;  ///< |u(s_hat)| must end up below this
  double r_start = 0;       ///< series handoff radius; 0 picks the default rule
  double s_max_shift = 20;  ///< integrate at most to s = mu^2 / 2 + shift
  std::uint64_t max_steps = 2000000;

  /// Quartic Taylor coefficient b(mu) in u = mu - r^2/mu + b r^4 + O(r^6).
  static double series_b(double mu) { return (1 + 2 * mu * mu) / (4 * mu * mu * mu); }

  /// Handoff radius: either the validated user choice or the largest radius
  /// at which the quartic series term is below 0.1 * abs_tol (capped at 1e-4).
  double start_radius() const;
  double log_start_radius() const;
  /// Guard for profiles that fail to cross zero: s_hat < mu^2/2 + O(1) always.
  double s_stop() const { return 0.5 * mu * mu + s_max_shift; }

  /// Throws std::invalid_argument on out-of-range settings, including a start
  /// radius whose series remainder exceeds the tolerance budget.
  void validate() const;
};

/// Right-hand side of the augmented system at log-radius s.
inline OdeState normalized_rhs(double s, const OdeState& y, double mu) {
  const double u = y[kU];
  const double v = y[kV];
  const double f = (4 * u / (mu * mu)) * std::exp(u * u - mu * mu + 2 * s);
  OdeState dy;
  dy << v, -f, v * v, u * f;
  return dy;
}

/// Series state at the handoff radius cfg.start_radius().  The accumulator
/// seeds are the closed-form limits of the two integrals from -infinity:
/// v ~ -2 r^2 / mu gives lam_acc = r^4 / mu^2, and u g(u) e^{2s} integrates
/// to mass_acc = 2 r^2 - 2 (1 + 1/mu^2) r^4 through the same order.
OdeState series_initial_state(const ShootConfig& cfg);

/// Full result of one shooting run: dense trajectory plus derived scalars.
struct RadialProfile {
  double mu = 0;
  double s_start = 0;             ///< log of the series handoff radius
  double s_hat = 0;               ///< first zero of u in log radius
  double tau_hat = 0;             ///< exp(s_hat)
  double log_lambda_mu = 0;       ///< recovered eigenvalue, in logs
  double dirichlet_energy = 0;    ///< 2 pi * lam_acc(s_hat) = int |grad u|^2
  double nonlinear_mass = 0;      ///< 2 pi * mass_acc(s_hat)
  double energy_identity_gap = 0; ///< |dirichlet - mass| / dirichlet
  std::uint64_t step_count = 0;
  double max_local_error = 0;     ///< largest accepted error estimate, 1.0 = at tolerance
  std::vector<DenseSegment<double, 4>> segments;

  /// Dense-output state at any s in [s_start, s_hat].
  OdeState state_at(double s) const;
};

/// Integrate from the series handoff to the first zero of u.
/// Throws SolverError if u fails to cross before s_stop() or the state
/// leaves the representable range.
RadialProfile integrate_profile(const ShootConfig& cfg);

/// (u, u_s) at log-radius s, via dense output.
std::pair<double, double> evaluate_profile(const RadialProfile& profile, double s);

}  // namespace mtb
