#pragma once
// Blow-up decomposition of a shooting profile against the bubble + correction
// ansatz, plus the pointwise decay/density certificates and the curvature
// quantization diagnostic.
//
// With eta_num(r) = mu (u(r) - mu) the profile is compared to
// eta0 + w / mu^2; the residual phi_res = eta_num - eta0 - w/mu^2 is the
// second-order remainder and shrinks like mu^{-2} uniformly on compacts.

#include "mtb/shoot.hpp"

#include <Eigen/Core>

#include <string>

namespace mtb {

/// Pointwise comparison of one profile with the bubble expansion on [0, r_cmp].
struct BlowupDecomposition {
  double mu = 0;
  double r_cmp = 0;
  Eigen::ArrayXd r_grid;     ///< 0 followed by a log-spaced grid up to r_cmp
  Eigen::ArrayXd eta_num;    ///< mu (u - mu)
  Eigen::ArrayXd eta0_vals;
  Eigen::ArrayXd w_num;      ///< mu^2 (eta_num - eta0)
  Eigen::ArrayXd w_vals;
  Eigen::ArrayXd phi_res;    ///< eta_num - eta0 - w / mu^2
  double sup_err_w = 0;      ///< max |w_num - w| over the grid
};

/// Sample the decomposition on n grid points; r_cmp must not exceed tau_hat.
BlowupDecomposition decompose(const RadialProfile& profile, double r_cmp, int n = 513);

/// Pointwise decay and density certificates over [R0, tau_hat].
struct DecayCheckResult {
  double mu = 0;
  bool asymptotic = false;          ///< false below mu = 6: flags not trustworthy
  bool decay_ok = false;            ///< eta_num <= eta0 + 1e-9 on the window
  bool density_ok = false;          ///< (2s)^2 r^2 f <= 16 (1 + 1e-9) on the window
  double max_decay_violation = 0;   ///< max of eta_num - eta0
  double max_density_ratio = 0;     ///< max of (2s)^2 r^2 f / 16
  double window_lo = 0;             ///< R0
  std::string warning;              ///< empty when the checks are meaningful
};

/// Evaluate both certificates on dense samples of the profile.
DecayCheckResult decay_check(const RadialProfile& profile, int samples_per_segment = 8);

/// Integrated curvature mass P(R) = 2 pi * mass_acc(log R) against the pure
/// bubble prediction 4 pi R^2/(1+R^2) and the tail bound 32 pi / log R.
struct QuantizationProfile {
  double mu = 0;
  Eigen::ArrayXd R_grid;
  Eigen::ArrayXd P;
  Eigen::ArrayXd bubble_pred;
  Eigen::ArrayXd tail_bound;   ///< +inf where R <= 1 makes the bound vacuous
  double total_mass = 0;       ///< P(tau_hat) = nonlinear mass of the profile
};

/// Sample P on the given radii; every R must lie in (0, tau_hat].
QuantizationProfile quantization_profile(const RadialProfile& profile,
                                         const Eigen::ArrayXd& R_grid);

}  // namespace mtb
