#include "mtb/io.hpp"

#include "mtb/bubble.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace mtb {

namespace {

/// Densest spacing a profile table needs; long far-field steps are split.
constexpr double kTableMaxDs = 0.25;

constexpr double kFourPi = 4 * std::numbers::pi;
/// Squared first zero of the Bessel function J0: the small-mu limit of the
/// recovered eigenvalue.
constexpr double kBesselJ0Sq = 5.7831859629467840;

void append_profile_row(NumericTable& t, const RadialProfile& p, double s) {
  const OdeState y = p.state_at(s);
  const double u = y[kU];
  const double mu2 = p.mu * p.mu;
  t.columns[0].push_back(s);
  t.columns[1].push_back(std::exp(s));
  t.columns[2].push_back(u);
  t.columns[3].push_back(y[kV]);
  // f_density = u g(u) = (4 u^2 / mu^2) e^{u^2 - mu^2}: bounded by 4 e^{-1} e.
  t.columns[4].push_back((4 * u * u / mu2) * std::exp(u * u - mu2));
}

}  // namespace

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

NumericTable profile_table(const RadialProfile& p) {
  NumericTable t;
  t.names = {"s", "r", "u", "u_s", "f_density"};
  t.columns.resize(t.names.size());
  for (const auto& seg : p.segments) {
    const double hi = std::min(seg.s1(), p.s_hat);
    if (!(hi > seg.s0)) break;
    const int nsub = std::max(1, int(std::ceil((hi - seg.s0) / kTableMaxDs)));
    for (int j = 0; j < nsub; ++j) append_profile_row(t, p, seg.s0 + (hi - seg.s0) * j / nsub);
  }
  append_profile_row(t, p, p.s_hat);
  return t;
}

NumericTable branch_table(const BranchCurve& curve) {
  NumericTable t;
  t.names = {"mu", "log_lambda_mu", "lambda_mu", "Lambda", "E_value", "energy_identity_gap"};
  t.columns.resize(t.names.size());
  for (const auto& p : curve.points) {
    t.columns[0].push_back(p.mu);
    t.columns[1].push_back(p.log_lambda_mu);
    t.columns[2].push_back(p.lambda_mu);
    t.columns[3].push_back(p.dirichlet_energy);
    t.columns[4].push_back(p.disk_energy);
    t.columns[5].push_back(p.energy_identity_gap);
  }
  return t;
}

NumericTable decomposition_table(const BlowupDecomposition& d) {
  NumericTable t;
  t.names = {"r", "eta_num", "eta0", "w_num", "w", "phi_res"};
  t.columns.resize(t.names.size());
  for (Eigen::Index i = 0; i < d.r_grid.size(); ++i) {
    t.columns[0].push_back(d.r_grid[i]);
    t.columns[1].push_back(d.eta_num[i]);
    t.columns[2].push_back(d.eta0_vals[i]);
    t.columns[3].push_back(d.w_num[i]);
    t.columns[4].push_back(d.w_vals[i]);
    t.columns[5].push_back(d.phi_res[i]);
  }
  return t;
}

NumericTable quantization_table(const QuantizationProfile& q) {
  NumericTable t;
  t.names = {"R", "P", "bubble_pred", "tail_bound"};
  t.columns.resize(t.names.size());
  for (Eigen::Index i = 0; i < q.R_grid.size(); ++i) {
    t.columns[0].push_back(q.R_grid[i]);
    t.columns[1].push_back(q.P[i]);
    t.columns[2].push_back(q.bubble_pred[i]);
    t.columns[3].push_back(q.tail_bound[i]);
  }
  return t;
}

void write_table(const NumericTable& table, const std::string& path, TableFormat format) {
  std::string out;
  if (format == TableFormat::csv) {
    for (std::size_t c = 0; c < table.names.size(); ++c) {
      if (c) out += ',';
      out += table.names[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += fmt_g17(table.columns[c][r]);
      }
      out += '\n';
    }
  } else {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < table.rows(); ++r) {
      nlohmann::ordered_json row;
      for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const double v = table.columns[c][r];
        if (std::isfinite(v))
          row[table.names[c]] = v;
        else
          row[table.names[c]] = fmt_g17(v);  // JSON has no inf literal
      }
      rows.push_back(std::move(row));
    }
    out = rows.dump(2);
    out += '\n';
  }
  write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

nlohmann::ordered_json solve_summary(const BranchPoint& pt, const RadialProfile& profile) {
  nlohmann::ordered_json j;
  j["mu"] = pt.mu;
  j["log_lambda_mu"] = pt.log_lambda_mu;
  j["lambda_mu"] = pt.lambda_mu;
  j["Lambda"] = pt.dirichlet_energy;
  j["E_value"] = pt.disk_energy;
  j["energy_identity_gap"] = pt.energy_identity_gap;
  j["s_hat"] = profile.s_hat;
  j["tau_hat"] = profile.tau_hat;
  j["s_start"] = profile.s_start;
  j["step_count"] = profile.step_count;
  j["max_local_error"] = profile.max_local_error;
  return j;
}

nlohmann::ordered_json branch_summary(const BranchCurve& curve) {
  nlohmann::ordered_json j;
  j["mu_sharp"] = curve.mu_sharp;
  j["lambda_sharp"] = curve.lambda_sharp;
  j["four_pi"] = kFourPi;
  j["margin_over_four_pi"] = curve.lambda_sharp - kFourPi;
  j["sharp_refined"] = curve.sharp_refined;
  j["local_maxima"] = curve.local_maxima;

  nlohmann::ordered_json grid;
  grid["mu_min"] = curve.mu_min;
  grid["mu_max"] = curve.mu_max;
  grid["nodes_requested"] = curve.nodes_requested;
  grid["nodes_solved"] = curve.points.size();
  grid["spacing"] = curve.spacing;
  j["grid"] = std::move(grid);

  if (!curve.points.empty()) {
    // The recovered eigenvalue at the low end tracks the squared first Bessel
    // zero, not 2 pi; report all three so the reader can compare.
    nlohmann::ordered_json small;
    small["mu"] = curve.points.front().mu;
    small["lambda_mu"] = std::exp(curve.points.front().log_lambda_mu);
    small["bessel_j0_squared"] = kBesselJ0Sq;
    small["two_pi"] = 2 * std::numbers::pi;
    j["small_mu_limit"] = std::move(small);
  }

  nlohmann::ordered_json fails = nlohmann::ordered_json::array();
  for (const auto& f : curve.failures) {
    nlohmann::ordered_json e;
    e["mu"] = f.mu;
    e["message"] = f.message;
    fails.push_back(std::move(e));
  }
  j["failures"] = std::move(fails);
  return j;
}

nlohmann::ordered_json count_summary(const LevelCount& count, const BranchCurve& curve) {
  nlohmann::ordered_json j;
  j["Lambda"] = count.level;
  j["count"] = count.crossings.size();
  std::string regime;
  if (count.level <= kFourPi)
    regime = "at or below four_pi";
  else if (curve.lambda_sharp > 0 && count.level > curve.lambda_sharp)
    regime = "above lambda_sharp";
  else
    regime = "between four_pi and lambda_sharp";
  j["regime"] = regime;
  j["crossings"] = count.crossings;
  j["lambda_sharp"] = curve.lambda_sharp;
  j["four_pi"] = kFourPi;
  if (!count.warning.empty()) j["warning"] = count.warning;
  return j;
}

nlohmann::ordered_json asym_report(const BlowupDecomposition& d, const DecayCheckResult& decay,
                                   const QuantizationProfile& q) {
  nlohmann::ordered_json j;
  j["mu"] = d.mu;
  j["sup_err_w"] = d.sup_err_w;
  j["r_cmp"] = d.r_cmp;
  j["decay_ok"] = decay.decay_ok;
  j["density_ok"] = decay.density_ok;
  j["asymptotic"] = decay.asymptotic;
  if (!decay.warning.empty()) j["warning"] = decay.warning;
  j["max_decay_violation"] = decay.max_decay_violation;
  j["max_density_ratio"] = decay.max_density_ratio;
  j["R0"] = decay.window_lo;
  nlohmann::ordered_json flux;
  for (const double r : {10.0, 100.0, 1000.0}) {
    // 2 pi r w'(r): converges to -4 pi, the curvature deficit of the bubble.
    flux[fmt_g17(r)] = 2 * std::numbers::pi * r * w_prime(r);
  }
  j["flux_at_r"] = std::move(flux);
  j["total_mass"] = q.total_mass;
  j["four_pi"] = kFourPi;
  return j;
}

}  // namespace mtb
