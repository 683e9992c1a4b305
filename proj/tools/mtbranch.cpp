// Command-line driver: solve single profiles, sweep the branch curve, refine
// its maximum, count level crossings, and run the blow-up diagnostics.
//
// Exit codes: 0 success, 1 numerical failure, 2 usage/configuration error.
// Outputs are deterministic: repeated runs with the same inputs produce
// byte-identical files, independent of --jobs.

#include "mtb/bubble.hpp"
#include "mtb/io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>

namespace {

constexpr double kFourPi = 4 * std::numbers::pi;

struct CommonOpts {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int jobs = 1;
  std::string out;  // output prefix; empty -> "<seed-dir>/<subcommand>"
  std::string format = "csv";
};

struct GridOpts {
  double mu_min = 1e-3;
  double mu_max = 24.0;
  int nodes = 400;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--rel-tol", c.rel_tol, "Relative tolerance of the adaptive stepper")
      ->capture_default_str();
  cmd->add_option("--abs-tol", c.abs_tol, "Absolute tolerance of the adaptive stepper")
      ->capture_default_str();
  cmd->add_option("--jobs", c.jobs, "Worker threads for sweeps")->capture_default_str();
  cmd->add_option("--out", c.out, "Output path prefix (default: <seed-dir>/<subcommand>)");
  cmd->add_option("--format", c.format, "Table file format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_grid(CLI::App* cmd, GridOpts& g) {
  cmd->add_option("--mu-min", g.mu_min, "Lower end of the mu grid")->capture_default_str();
  cmd->add_option("--mu-max", g.mu_max, "Upper end of the mu grid")->capture_default_str();
  cmd->add_option("--nodes", g.nodes, "Base node count of the mu grid")->capture_default_str();
}

std::string out_prefix(const CommonOpts& c, const std::string& subcommand) {
  if (!c.out.empty()) return c.out;
  const char* seed = std::getenv("MT_BRANCH_SEED_DIR");
  const std::string dir = (seed && *seed) ? seed : ".";
  return dir + "/" + subcommand;
}

mtb::TableFormat table_format(const CommonOpts& c) {
  return c.format == "json" ? mtb::TableFormat::json : mtb::TableFormat::csv;
}

std::string table_path(const CommonOpts& c, const std::string& prefix, const std::string& stem) {
  return prefix + "_" + stem + (c.format == "json" ? ".json" : ".csv");
}

mtb::BranchConfig branch_config(const CommonOpts& c) {
  mtb::BranchConfig cfg;
  cfg.rel_tol = c.rel_tol;
  cfg.abs_tol = c.abs_tol;
  cfg.jobs = c.jobs;
  return cfg;
}

void write_json(const std::string& path, const nlohmann::ordered_json& j) {
  mtb::write_text_file(path, j.dump(2) + "\n");
}

int cmd_solve(const CommonOpts& c, double mu) {
  const mtb::BranchConfig cfg = branch_config(c);
  const mtb::RadialProfile profile = mtb::integrate_profile(cfg.shoot_for(mu));
  mtb::BranchPoint pt;
  pt.mu = mu;
  pt.log_lambda_mu = profile.log_lambda_mu;
  pt.lambda_mu = std::exp(profile.log_lambda_mu);
  pt.dirichlet_energy = profile.dirichlet_energy;
  pt.disk_energy = mtb::disk_energy(profile);
  pt.energy_identity_gap = profile.energy_identity_gap;
  pt.s_hat = profile.s_hat;
  pt.step_count = profile.step_count;

  const std::string prefix = out_prefix(c, "solve");
  mtb::write_table(mtb::profile_table(profile), table_path(c, prefix, "profile"), table_format(c));
  write_json(prefix + "_summary.json", mtb::solve_summary(pt, profile));

  std::cout << "mu            " << mtb::fmt_g17(mu) << "\n"
            << "s_hat         " << mtb::fmt_g17(profile.s_hat) << "\n"
            << "log_lambda_mu " << mtb::fmt_g17(profile.log_lambda_mu) << "\n"
            << "lambda_mu     " << mtb::fmt_g17(pt.lambda_mu) << "\n"
            << "Lambda        " << mtb::fmt_g17(pt.dirichlet_energy) << "\n"
            << "E_value       " << mtb::fmt_g17(pt.disk_energy) << "\n"
            << "identity_gap  " << mtb::fmt_g17(pt.energy_identity_gap) << "\n";
  return 0;
}

mtb::BranchCurve run_sweep(const CommonOpts& c, const GridOpts& g) {
  const Eigen::ArrayXd grid = mtb::default_mu_grid(g.mu_min, g.mu_max, g.nodes);
  return mtb::sweep_branch(grid, branch_config(c));
}

void report_failures(const mtb::BranchCurve& curve) {
  for (const auto& f : curve.failures)
    std::cerr << "warning: node mu = " << mtb::fmt_g17(f.mu) << " failed: " << f.message << "\n";
  if (curve.local_maxima > 1)
    std::cerr << "warning: sampled curve has " << curve.local_maxima
              << " interior local maxima; the refined maximum may not be global\n";
}

int cmd_sweep(const CommonOpts& c, const GridOpts& g) {
  const mtb::BranchCurve curve = run_sweep(c, g);
  report_failures(curve);
  const std::string prefix = out_prefix(c, "sweep");
  mtb::write_table(mtb::branch_table(curve), table_path(c, prefix, "branch"), table_format(c));
  write_json(prefix + "_summary.json", mtb::branch_summary(curve));
  std::cout << "nodes_solved  " << curve.points.size() << "\n"
            << "failures      " << curve.failures.size() << "\n"
            << "mu_sharp_est  " << mtb::fmt_g17(curve.mu_sharp) << "\n"
            << "Lambda_max    " << mtb::fmt_g17(curve.lambda_sharp) << "\n";
  return 0;
}

int cmd_sharp(const CommonOpts& c, const GridOpts& g) {
  mtb::BranchCurve curve = run_sweep(c, g);
  report_failures(curve);
  mtb::find_lambda_sharp(curve, branch_config(c));
  const std::string prefix = out_prefix(c, "sharp");
  mtb::write_table(mtb::branch_table(curve), table_path(c, prefix, "branch"), table_format(c));
  write_json(prefix + "_summary.json", mtb::branch_summary(curve));
  std::cout << "Lambda_sharp  " << mtb::fmt_g17(curve.lambda_sharp) << "\n"
            << "mu_sharp      " << mtb::fmt_g17(curve.mu_sharp) << "\n"
            << "four_pi       " << mtb::fmt_g17(kFourPi) << "\n"
            << "margin        " << mtb::fmt_g17(curve.lambda_sharp - kFourPi) << "\n";
  return 0;
}

int cmd_count(const CommonOpts& c, const GridOpts& g, double level) {
  mtb::BranchCurve curve = run_sweep(c, g);
  report_failures(curve);
  mtb::find_lambda_sharp(curve, branch_config(c));
  const mtb::LevelCount count = mtb::count_solutions(level, curve, branch_config(c));
  const std::string prefix = out_prefix(c, "count");
  const nlohmann::ordered_json j = mtb::count_summary(count, curve);
  write_json(prefix + "_summary.json", j);
  if (!count.warning.empty()) std::cerr << "warning: " << count.warning << "\n";
  std::cout << "Lambda        " << mtb::fmt_g17(level) << "\n"
            << "count         " << count.crossings.size() << "\n"
            << "regime        " << j["regime"].get<std::string>() << "\n";
  for (const double mu : count.crossings) std::cout << "crossing_mu   " << mtb::fmt_g17(mu) << "\n";
  return 0;
}

int cmd_asym(const CommonOpts& c, double mu, double r_max) {
  const mtb::BranchConfig cfg = branch_config(c);
  const mtb::RadialProfile profile = mtb::integrate_profile(cfg.shoot_for(mu));

  const double r_cmp = std::min(r_max, profile.tau_hat * (1 - 1e-12));
  const mtb::BlowupDecomposition d = mtb::decompose(profile, r_cmp);
  const mtb::DecayCheckResult decay = mtb::decay_check(profile);

  const double R_hi = std::min(1e4, profile.tau_hat * (1 - 1e-12));
  const int nq = 64;
  Eigen::ArrayXd R_grid(nq);
  for (int i = 0; i < nq; ++i)
    R_grid[i] = std::exp(std::log(1.0) + (std::log(R_hi) - std::log(1.0)) * i / double(nq - 1));
  const mtb::QuantizationProfile q = mtb::quantization_profile(profile, R_grid);

  const std::string prefix = out_prefix(c, "asym");
  mtb::write_table(mtb::decomposition_table(d), table_path(c, prefix, "decomp"), table_format(c));
  mtb::write_table(mtb::quantization_table(q), table_path(c, prefix, "quant"), table_format(c));
  write_json(prefix + "_report.json", mtb::asym_report(d, decay, q));

  if (!decay.warning.empty()) std::cerr << "warning: " << decay.warning << "\n";
  std::cout << "mu            " << mtb::fmt_g17(mu) << "\n"
            << "sup_err_w     " << mtb::fmt_g17(d.sup_err_w) << "\n"
            << "decay_ok      " << (decay.decay_ok ? "true" : "false") << "\n"
            << "density_ok    " << (decay.density_ok ? "true" : "false") << "\n"
            << "R0            " << mtb::fmt_g17(decay.window_lo) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Branch of positive radial critical points on the unit disk"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value configuration file");
  app.allow_config_extras(false);

  CommonOpts copt[5];
  GridOpts gopt[5];
  double mu_solve = 1.0, mu_asym = 8.0, level = 13.0, r_max = 50.0;

  CLI::App* solve = app.add_subcommand("solve", "Shoot one profile and report its invariants");
  solve->add_option("--mu", mu_solve, "Central value u(0)")->required();
  add_common(solve, copt[0]);

  CLI::App* sweep = app.add_subcommand("sweep", "Solve the branch over a mu grid");
  add_grid(sweep, gopt[1]);
  add_common(sweep, copt[1]);

  CLI::App* sharp = app.add_subcommand("sharp", "Sweep, then refine the curve maximum");
  add_grid(sharp, gopt[2]);
  add_common(sharp, copt[2]);

  CLI::App* count = app.add_subcommand("count", "Count solutions of Lambda(mu) = Lambda");
  count->add_option("--Lambda", level, "Dirichlet energy level")->required();
  add_grid(count, gopt[3]);
  add_common(count, copt[3]);

  CLI::App* asym = app.add_subcommand("asym", "Blow-up decomposition and certificates");
  asym->add_option("--mu", mu_asym, "Central value u(0)")->required();
  asym->add_option("--R-max", r_max, "Comparison window cap")->capture_default_str();
  add_common(asym, copt[4]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(copt[0], mu_solve);
    if (sweep->parsed()) return cmd_sweep(copt[1], gopt[1]);
    if (sharp->parsed()) return cmd_sharp(copt[2], gopt[2]);
    if (count->parsed()) return cmd_count(copt[3], gopt[3], level);
    if (asym->parsed()) return cmd_asym(copt[4], mu_asym, r_max);
    std::cerr << "error: no subcommand selected\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
