#include "mtb/decompose.hpp"

#include "mtb/bubble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace mtb {

namespace {

/// Tolerances of the pointwise certificates: strict inequalities with a tiny
/// allowance for roundoff in the comparison itself.
constexpr double kDecaySlack = 1e-9;
constexpr double kDensitySlack = 1e-9;
/// Central values below this sit outside the asymptotic regime the
/// certificates describe.
constexpr double kAsymptoticMu = 6.0;

/// u at radius r from the profile, falling back to the handoff series below
/// the start radius.
double profile_u(const RadialProfile& p, double r) {
  const double s = std::log(r);
  if (s >= p.s_start) return p.state_at(s)[kU];
  const double r2 = r * r;
  return p.mu - r2 / p.mu + ShootConfig::series_b(p.mu) * r2 * r2;
}

/// mass accumulator at radius r, with the same series fallback.
double profile_mass_acc(const RadialProfile& p, double r) {
  const double s = std::log(r);
  if (s >= p.s_start) return p.state_at(s)[kMassAcc];
  const double r2 = r * r;
  return 2 * r2 - 2 * (1 + 1 / (p.mu * p.mu)) * r2 * r2;
}

}  // namespace

BlowupDecomposition decompose(const RadialProfile& profile, double r_cmp, int n) {
  if (!(r_cmp > 0) || !(std::log(r_cmp) <= profile.s_hat + 1e-12))
    throw std::invalid_argument("decompose: r_cmp must lie in (0, tau_hat]");
  if (n < 8) throw std::invalid_argument("decompose: grid too small");

  BlowupDecomposition d;
  d.mu = profile.mu;
  d.r_cmp = r_cmp;
  d.r_grid.resize(n);
  d.eta_num.resize(n);
  d.eta0_vals.resize(n);
  d.w_num.resize(n);
  d.w_vals.resize(n);
  d.phi_res.resize(n);

  const double mu = profile.mu, mu2 = mu * mu;
  const double r_lo = std::min(1e-3, 0.5 * r_cmp);
  const double llo = std::log(r_lo), lhi = std::log(r_cmp);
  d.r_grid[0] = 0.0;
  for (int i = 1; i < n; ++i) d.r_grid[i] = std::exp(llo + (lhi - llo) * (i - 1) / double(n - 2));
  d.r_grid[n - 1] = r_cmp;

  double sup = 0;
  for (int i = 0; i < n; ++i) {
    const double r = d.r_grid[i];
    const double e_num = (r == 0.0) ? 0.0 : mu * (profile_u(profile, r) - mu);
    const double e0 = eta0(r);
    const double wv = w_closed_form(r);
    const double wn = mu2 * (e_num - e0);
    d.eta_num[i] = e_num;
    d.eta0_vals[i] = e0;
    d.w_num[i] = wn;
    d.w_vals[i] = wv;
    d.phi_res[i] = e_num - e0 - wv / mu2;
    sup = std::max(sup, std::abs(wn - wv));
  }
  d.sup_err_w = sup;
  return d;
}

DecayCheckResult decay_check(const RadialProfile& profile, int samples_per_segment) {
  if (samples_per_segment < 1) throw std::invalid_argument("decay_check: samples_per_segment < 1");

  DecayCheckResult res;
  res.mu = profile.mu;
  res.window_lo = find_R0();
  res.asymptotic = profile.mu >= kAsymptoticMu;
  if (!res.asymptotic)
    res.warning = "asymptotic regime not reached (mu < 6): certificates are indicative only";

  const double s_lo = std::log(res.window_lo);
  if (s_lo >= profile.s_hat) {
    std::ostringstream msg;
    msg << "comparison window [R0, tau_hat] is empty (tau_hat = " << profile.tau_hat << ")";
    res.warning = res.warning.empty() ? msg.str() : res.warning + "; " + msg.str();
    return res;
  }

  const double mu = profile.mu, mu2 = mu * mu;
  double max_violation = -std::numeric_limits<double>::infinity();
  double max_ratio = 0;
  for (const auto& seg : profile.segments) {
    if (seg.s1() < s_lo) continue;
    const double a = std::max(seg.s0, s_lo);
    const double b = std::min(seg.s1(), profile.s_hat);
    if (!(b > a)) continue;
    for (int j = 0; j <= samples_per_segment; ++j) {
      const double s = a + (b - a) * j / double(samples_per_segment);
      const OdeState y = seg.eval(s);
      const double u = y[kU];
      max_violation = std::max(max_violation, mu * (u - mu) - eta0_log_radius(s));
      // (2s)^2 r^2 f with f = u g(u): all exponentials fused and bounded.
      const double dens =
          (2 * s) * (2 * s) * (4 * u * u / mu2) * std::exp(u * u - mu2 + 2 * s);
      max_ratio = std::max(max_ratio, dens / 16.0);
    }
  }
  res.max_decay_violation = max_violation;
  res.max_density_ratio = max_ratio;
  res.decay_ok = max_violation <= kDecaySlack;
  res.density_ok = max_ratio <= 1.0 + kDensitySlack;
  return res;
}

QuantizationProfile quantization_profile(const RadialProfile& profile,
                                         const Eigen::ArrayXd& R_grid) {
  constexpr double four_pi = 4 * std::numbers::pi;
  QuantizationProfile q;
  q.mu = profile.mu;
  q.R_grid = R_grid;
  const Eigen::Index n = R_grid.size();
  if (n == 0) throw std::invalid_argument("quantization_profile: empty grid");
  q.P.resize(n);
  q.bubble_pred.resize(n);
  q.tail_bound.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double R = R_grid[i];
    if (!(R > 0) || !(std::log(R) <= profile.s_hat + 1e-12))
      throw std::invalid_argument("quantization_profile: R outside (0, tau_hat]");
    q.P[i] = 2 * std::numbers::pi * profile_mass_acc(profile, R);
    q.bubble_pred[i] = four_pi * R * R / (1 + R * R);
    q.tail_bound[i] =
        R > 1 ? 8 * four_pi / std::log(R) : std::numeric_limits<double>::infinity();
  }
  q.total_mass = profile.nonlinear_mass;
  return q;
}

}  // namespace mtb
