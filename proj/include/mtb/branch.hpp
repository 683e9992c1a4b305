#pragma once
// The branch of positive radial critical points, parametrized by the central
// value mu.  Each node is one shooting run; the curve collects the recovered
// eigenvalue lambda_mu, the Dirichlet energy Lambda(mu) = int |grad u|^2, and
// the functional value E(mu) = int (e^{u^2} - 1).
//
// Lambda(mu) rises from 0, peaks a little above 4 pi near mu = 4, and decays
// back to 4 pi from above; the peak is located by golden-section refinement
// and level sets Lambda(mu) = Lambda are counted by bisection.

#include "mtb/shoot.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mtb {

/// Numerical controls shared by every node of a sweep.
struct BranchConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double zero_tol = 1e-12;
  int jobs = 1;                      ///< worker threads for sweeps
  double sharp_bracket_tol = 1e-6;   ///< golden-section stopping width in mu
  double count_mu_tol = 1e-8;        ///< bisection stopping width for level crossings
  double level_warn_tol = 1e-6;      ///< |Lambda - lambda_sharp| warning threshold

  ShootConfig shoot_for(double mu) const;
  void validate() const;
};

/// One node of the branch curve.
struct BranchPoint {
  double mu = 0;
  double log_lambda_mu = 0;
  double lambda_mu = 0;            ///< exp(log_lambda_mu); decays like 1/mu^2
  double dirichlet_energy = 0;     ///< Lambda(mu)
  double disk_energy = 0;          ///< E(mu) = int_{disk} (e^{u^2} - 1)
  double energy_identity_gap = 0;
  double s_hat = 0;
  std::uint64_t step_count = 0;
};

/// A sweep node that failed, with the reason; isolated failures do not abort
/// the sweep.
struct SweepFailure {
  double mu = 0;
  std::string message;
};

/// Branch curve over a mu grid, with running metadata about its maximum.
struct BranchCurve {
  std::vector<BranchPoint> points;
  std::vector<SweepFailure> failures;
  double mu_sharp = 0;        ///< argmax of the sampled (or refined) maximum
  double lambda_sharp = 0;    ///< max of Lambda over the curve
  bool sharp_refined = false; ///< true once golden-section refinement ran
  int local_maxima = 0;       ///< strict interior maxima of the sampled curve
  double mu_min = 0, mu_max = 0;
  int nodes_requested = 0;
  std::string spacing;        ///< human-readable grid rule
};

/// Log-spaced grid on [mu_min, mu_max] with 4x densification of every base
/// interval inside (0.5, 4), where the curve bends through its maximum.
Eigen::ArrayXd default_mu_grid(double mu_min = 1e-3, double mu_max = 24.0, int nodes = 400);

/// Solve one node: shooting run plus the disk-energy quadrature.
BranchPoint solve_mu(double mu, const BranchConfig& cfg = {});

/// E(mu) for an already-computed profile (adaptive quadrature on the dense
/// output; exponents are fused so nothing overflows).
double disk_energy(const RadialProfile& profile);

/// Solve every grid node (optionally in parallel); node failures are recorded
/// in the curve instead of aborting.  Throws SolverError if no node succeeds.
BranchCurve sweep_branch(const Eigen::ArrayXd& mu_grid, const BranchConfig& cfg = {});

struct SharpResult {
  double mu_sharp = 0;
  double lambda_sharp = 0;
  int solves = 0;  ///< fresh shooting runs spent on refinement
};

/// Golden-section refinement of the curve maximum to bracket width
/// sharp_bracket_tol; requires an interior sampled maximum, otherwise throws
/// SolverError ("extend the grid").  Updates the curve's mu_sharp and
/// lambda_sharp in place.
SharpResult find_lambda_sharp(BranchCurve& curve, const BranchConfig& cfg = {});

/// Solutions of Lambda(mu) = level along the sampled curve.
struct LevelCount {
  double level = 0;
  std::vector<double> crossings;  ///< refined mu values, increasing
  std::string warning;            ///< set when the level hugs the maximum
};

/// Count and refine level crossings by bisection to count_mu_tol.
LevelCount count_solutions(double level, const BranchCurve& curve,
                           const BranchConfig& cfg = {});

}  // namespace mtb
