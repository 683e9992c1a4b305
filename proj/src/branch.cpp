#include "mtb/branch.hpp"

#include "mtb/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace mtb {

namespace {

constexpr double kMuLo = 1e-3, kMuHi = 30.0;

void check_grid(const Eigen::ArrayXd& grid) {
  if (grid.size() == 0) throw std::invalid_argument("sweep_branch: empty mu grid");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= kMuLo && grid[i] <= kMuHi))
      throw std::invalid_argument("sweep_branch: grid node outside [1e-3, 30]");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw std::invalid_argument("sweep_branch: grid must be strictly increasing");
  }
}

/// Grid-level summary: argmax node and the number of strict interior maxima.
void annotate_maximum(BranchCurve& curve) {
  const auto& pts = curve.points;
  if (pts.empty()) return;
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].dirichlet_energy > pts[best].dirichlet_energy) best = i;
  curve.mu_sharp = pts[best].mu;
  curve.lambda_sharp = pts[best].dirichlet_energy;
  curve.local_maxima = 0;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i)
    if (pts[i].dirichlet_energy > pts[i - 1].dirichlet_energy &&
        pts[i].dirichlet_energy > pts[i + 1].dirichlet_energy)
      ++curve.local_maxima;
}

}  // namespace

ShootConfig BranchConfig::shoot_for(double mu) const {
  ShootConfig sc;
  sc.mu = mu;
  sc.rel_tol = rel_tol;
  sc.abs_tol = abs_tol;
  sc.zero_tol = zero_tol;
  return sc;
}

void BranchConfig::validate() const {
  if (jobs < 1 || jobs > 256) throw std::invalid_argument("BranchConfig: jobs outside [1, 256]");
  if (!(sharp_bracket_tol >= 1e-10 && sharp_bracket_tol <= 1e-2))
    throw std::invalid_argument("BranchConfig: sharp_bracket_tol outside [1e-10, 1e-2]");
  if (!(count_mu_tol >= 1e-12 && count_mu_tol <= 1e-2))
    throw std::invalid_argument("BranchConfig: count_mu_tol outside [1e-12, 1e-2]");
  shoot_for(1.0).validate();
}

Eigen::ArrayXd default_mu_grid(double mu_min, double mu_max, int nodes) {
  if (!(mu_min >= kMuLo && mu_max <= kMuHi && mu_min < mu_max))
    throw std::invalid_argument("default_mu_grid: range must satisfy 1e-3 <= lo < hi <= 30");
  if (nodes < 2 || nodes > 100000) throw std::invalid_argument("default_mu_grid: bad node count");

  const double llo = std::log(mu_min), lhi = std::log(mu_max);
  std::vector<double> out;
  out.reserve(std::size_t(nodes) * 2);
  for (int i = 0; i < nodes; ++i) {
    const double a = std::exp(llo + (lhi - llo) * i / double(nodes - 1));
    out.push_back(a);
    if (i + 1 < nodes) {
      const double b = std::exp(llo + (lhi - llo) * (i + 1) / double(nodes - 1));
      // Densify 4x where the curve bends through its maximum.
      if (a >= 0.5 && b <= 4.0) {
        const double la = std::log(a), lb = std::log(b);
        for (int k = 1; k <= 3; ++k) out.push_back(std::exp(la + (lb - la) * k / 4.0));
      }
    }
  }
  return Eigen::Map<Eigen::ArrayXd>(out.data(), Eigen::Index(out.size()));
}

double disk_energy(const RadialProfile& p) {
  constexpr double two_pi = 2 * std::numbers::pi;
  const double mu2 = p.mu * p.mu, s_hat = p.s_hat;
  // Integrand of E over the unit disk of the original problem, pulled back to
  // log radius and rescaled so r = tau_hat maps to the boundary:
  // e^{u^2 + 2s - 2 s_hat} - e^{2s - 2 s_hat}; the exponent never exceeds ~0.
  // Integrated segment by segment over the stepper's own accepted steps: the
  // integrand is near zero on the long valley between the bubble hump and the
  // far-field hump, where whole-domain adaptivity would starve.
  double body = 0;
  for (const auto& seg : p.segments) {
    const double hi = std::min(seg.s1(), s_hat);
    if (!(hi > seg.s0)) break;
    const auto f = [&](double s) {
      const double u = seg.eval(s)[kU];
      const double base = 2 * s - 2 * s_hat;
      if (u * u < 1.0) return std::exp(base) * std::expm1(u * u);
      return std::exp(u * u + base) - std::exp(base);
    };
    body += integrate_adaptive(f, seg.s0, hi, 1e-12, 1e-18, 24);
  }
  // Below the handoff radius u == mu to series accuracy; the remaining
  // integral has the closed form (e^{mu^2} - 1) e^{2 s0 - 2 s_hat} / 2.
  const double base0 = 2 * p.s_start - 2 * s_hat;
  const double cap = 0.5 * (std::exp(mu2 + base0) - std::exp(base0));
  return two_pi * (body + cap);
}

BranchPoint solve_mu(double mu, const BranchConfig& cfg) {
  cfg.validate();
  const RadialProfile p = integrate_profile(cfg.shoot_for(mu));
  BranchPoint pt;
  pt.mu = mu;
  pt.log_lambda_mu = p.log_lambda_mu;
  pt.lambda_mu = std::exp(p.log_lambda_mu);
  pt.dirichlet_energy = p.dirichlet_energy;
  pt.disk_energy = disk_energy(p);
  pt.energy_identity_gap = p.energy_identity_gap;
  pt.s_hat = p.s_hat;
  pt.step_count = p.step_count;
  return pt;
}

BranchCurve sweep_branch(const Eigen::ArrayXd& mu_grid, const BranchConfig& cfg) {
  cfg.validate();
  check_grid(mu_grid);

  const std::size_t n = std::size_t(mu_grid.size());
  std::vector<BranchPoint> slots(n);
  std::vector<std::string> errors(n);
  std::vector<char> ok(n, 0);

  const auto solve_node = [&](std::size_t i) {
    try {
      slots[i] = solve_mu(mu_grid[Eigen::Index(i)], cfg);
      ok[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  const int jobs = std::min<int>(cfg.jobs, int(n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) solve_node(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(jobs));
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) solve_node(i);
      });
    for (auto& th : pool) th.join();
  }

  BranchCurve curve;
  curve.mu_min = mu_grid[0];
  curve.mu_max = mu_grid[mu_grid.size() - 1];
  curve.nodes_requested = int(n);
  curve.spacing = "log-spaced, 4x densified on (0.5, 4)";
  for (std::size_t i = 0; i < n; ++i) {
    if (ok[i])
      curve.points.push_back(slots[i]);
    else
      curve.failures.push_back({mu_grid[Eigen::Index(i)], errors[i]});
  }
  if (curve.points.empty()) throw SolverError("sweep_branch: every grid node failed");
  annotate_maximum(curve);
  return curve;
}

SharpResult find_lambda_sharp(BranchCurve& curve, const BranchConfig& cfg) {
  cfg.validate();
  const auto& pts = curve.points;
  if (pts.size() < 3) throw SolverError("find_lambda_sharp: need at least 3 curve points");

  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i].dirichlet_energy > pts[best].dirichlet_energy) best = i;
  if (best == 0 || best + 1 == pts.size())
    throw SolverError(
        "find_lambda_sharp: sampled maximum sits on the grid boundary; extend the grid");

  int solves = 0;
  const auto value = [&](double mu) {
    ++solves;
    return solve_mu(mu, cfg).dirichlet_energy;
  };

  // Golden-section search on the bracketing interval.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = pts[best - 1].mu, b = pts[best + 1].mu;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = value(c), fd = value(d);
  while (b - a > cfg.sharp_bracket_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = value(d);
    }
  }
  SharpResult res;
  res.mu_sharp = 0.5 * (a + b);
  res.lambda_sharp = value(res.mu_sharp);
  res.solves = solves;
  // The refined value can only improve on the sampled one; keep the better.
  if (res.lambda_sharp < curve.lambda_sharp) {
    res.lambda_sharp = curve.lambda_sharp;
    res.mu_sharp = curve.mu_sharp;
  }
  curve.mu_sharp = res.mu_sharp;
  curve.lambda_sharp = res.lambda_sharp;
  curve.sharp_refined = true;
  return res;
}

LevelCount count_solutions(double level, const BranchCurve& curve, const BranchConfig& cfg) {
  cfg.validate();
  if (!(level > 0) || !std::isfinite(level))
    throw std::invalid_argument("count_solutions: level must be positive and finite");
  if (curve.points.size() < 2)
    throw SolverError("count_solutions: need at least 2 curve points");

  LevelCount out;
  out.level = level;
  if (curve.lambda_sharp > 0 && std::abs(level - curve.lambda_sharp) < cfg.level_warn_tol) {
    std::ostringstream msg;
    msg << "level is within " << cfg.level_warn_tol
        << " of the computed maximum; the two near-fold crossings may be unresolvable";
    out.warning = msg.str();
  }

  const auto& pts = curve.points;
  const auto gap = [&](const BranchPoint& p) { return p.dirichlet_energy - level; };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double ga = gap(pts[i]), gb = gap(pts[i + 1]);
    if (ga == 0.0) {
      out.crossings.push_back(pts[i].mu);
      continue;
    }
    if (i + 2 == pts.size() && gb == 0.0) out.crossings.push_back(pts[i + 1].mu);
    if (!(ga * gb < 0)) continue;
    double lo = pts[i].mu, hi = pts[i + 1].mu, glo = ga;
    while (hi - lo > cfg.count_mu_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = solve_mu(mid, cfg).dirichlet_energy - level;
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((glo < 0) == (gm < 0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    out.crossings.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace mtb
