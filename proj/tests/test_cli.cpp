#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end checks of the command-line driver: spawns the real binary
// (path in MTBRANCH_BIN) in a scratch directory (MTBRANCH_TMP) and inspects
// exit codes, stdout, and the files it writes.

#include "mtb/branch.hpp"

#include "json.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr, merged
};

const char* required_env(const char* name) {
  const char* v = std::getenv(name);
  REQUIRE_MESSAGE(v != nullptr, name << " must be set by the test harness");
  return v;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = required_env("MTBRANCH_TMP");
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string bin = required_env("MTBRANCH_BIN");
  const std::string cmd = env_prefix + "\"" + bin + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE_MESSAGE(bool(f), "cannot open " << p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

std::string prefix(const std::string& stem) { return (work_dir() / stem).string(); }

}  // namespace

TEST_CASE("solve: writes profile table and summary matching the library") {
  const auto res = run_cli("solve --mu 1.5 --out " + prefix("s15"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("Lambda") != std::string::npos);
  CHECK(res.output.find("s_hat") != std::string::npos);

  REQUIRE(fs::exists(prefix("s15") + "_profile.csv"));
  REQUIRE(fs::exists(prefix("s15") + "_summary.json"));

  const auto j = read_json(prefix("s15") + "_summary.json");
  const mtb::BranchPoint pt = mtb::solve_mu(1.5);
  CHECK(j.at("Lambda").get<double>() == pt.dirichlet_energy);
  CHECK(j.at("lambda_mu").get<double>() == pt.lambda_mu);
  CHECK(j.at("E_value").get<double>() == pt.disk_energy);
  CHECK(j.at("s_hat").get<double>() == pt.s_hat);

  const std::string header = read_file(prefix("s15") + "_profile.csv").substr(0, 24);
  CHECK(header.rfind("s,r,u,u_s,f_density", 0) == 0);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("solve --mu -1 --out " + prefix("bad")).exit_code == 2);
  CHECK(run_cli("solve --mu 1 --no-such-flag").exit_code == 2);
  CHECK(run_cli("count --mu-min 1 --mu-max 2").exit_code == 2);  // missing --Lambda
  CHECK(run_cli("").exit_code == 2);                             // missing subcommand
  CHECK(run_cli("solve --mu 1 --format xml").exit_code == 2);
  CHECK(run_cli("solve --mu 1 --rel-tol 0 --out " + prefix("bad")).exit_code == 2);
}

TEST_CASE("sweep outputs are byte-identical across runs and job counts") {
  const std::string args = "sweep --mu-min 1 --mu-max 8 --nodes 12 ";
  CHECK(run_cli(args + "--out " + prefix("swA")).exit_code == 0);
  CHECK(run_cli(args + "--out " + prefix("swB")).exit_code == 0);
  CHECK(run_cli(args + "--jobs 4 --out " + prefix("swC")).exit_code == 0);

  const std::string a = read_file(prefix("swA") + "_branch.csv");
  CHECK(a == read_file(prefix("swB") + "_branch.csv"));
  CHECK(a == read_file(prefix("swC") + "_branch.csv"));
  CHECK(read_file(prefix("swA") + "_summary.json") ==
        read_file(prefix("swC") + "_summary.json"));
  CHECK(a.rfind("mu,log_lambda_mu,lambda_mu,Lambda,E_value,energy_identity_gap", 0) == 0);
}

TEST_CASE("sharp: refines the maximum and reports the margin over 4 pi") {
  const auto res = run_cli("sharp --mu-min 3 --mu-max 5 --nodes 25 --out " + prefix("sh"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("Lambda_sharp") != std::string::npos);
  CHECK(res.output.find("four_pi") != std::string::npos);

  const auto j = read_json(prefix("sh") + "_summary.json");
  CHECK(j.at("sharp_refined").get<bool>());
  CHECK(j.at("lambda_sharp").get<double>() == doctest::Approx(12.7039139298).epsilon(1e-7));
  CHECK(j.at("mu_sharp").get<double>() == doctest::Approx(3.984597).epsilon(1e-3));
  CHECK(j.at("margin_over_four_pi").get<double>() > 0.13);
}

TEST_CASE("count: two solutions between 4 pi and the maximum") {
  const auto res = run_cli(
      "count --Lambda 12.6351422720624 --mu-min 0.001 --mu-max 24 --nodes 60 --out " +
      prefix("ct"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("count         2") != std::string::npos);
  CHECK(res.output.find("regime        between four_pi and lambda_sharp") != std::string::npos);

  const auto j = read_json(prefix("ct") + "_summary.json");
  CHECK(j.at("count").get<int>() == 2);
  REQUIRE(j.at("crossings").size() == 2);
  const double m0 = j.at("crossings")[0].get<double>();
  const double m1 = j.at("crossings")[1].get<double>();
  CHECK(m0 > 3.0);
  CHECK(m0 < 4.0);
  CHECK(m1 > 4.0);
  CHECK(m1 < 6.0);
}

TEST_CASE("asym: decomposition, certificates, and quantization files") {
  const auto res = run_cli("asym --mu 8 --R-max 5 --out " + prefix("as"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("decay_ok      true") != std::string::npos);
  CHECK(res.output.find("density_ok    true") != std::string::npos);

  REQUIRE(fs::exists(prefix("as") + "_decomp.csv"));
  REQUIRE(fs::exists(prefix("as") + "_quant.csv"));
  const auto j = read_json(prefix("as") + "_report.json");
  CHECK(j.at("sup_err_w").get<double>() == doctest::Approx(5.2688e-3).epsilon(1e-3));
  CHECK(j.at("r_cmp").get<double>() == 5.0);
  CHECK(j.at("decay_ok").get<bool>());
  CHECK(j.at("R0").get<double>() == doctest::Approx(8.2473405142).epsilon(1e-9));
  CHECK(j.at("four_pi").get<double>() == doctest::Approx(12.5663706143592).epsilon(1e-13));
}

TEST_CASE("asym warns outside the asymptotic regime") {
  const auto res = run_cli("asym --mu 3 --R-max 5 --out " + prefix("as3"));
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("warning") != std::string::npos);
  CHECK(res.output.find("mu < 6") != std::string::npos);
}

TEST_CASE("config file values apply, command line wins") {
  const fs::path cfg = work_dir() / "opts.ini";
  {
    std::ofstream f(cfg);
    f << "[solve]\n"
      << "out=" << prefix("fromcfg") << "\n";
  }
  const auto res = run_cli("--config " + cfg.string() + " solve --mu 1");
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(prefix("fromcfg") + "_summary.json"));

  fs::remove(prefix("fromcfg") + "_summary.json");
  fs::remove(prefix("fromcfg") + "_profile.csv");
  const auto res2 = run_cli("--config " + cfg.string() + " solve --mu 1 --out " + prefix("cli"));
  CHECK(res2.exit_code == 0);
  CHECK(fs::exists(prefix("cli") + "_summary.json"));
  CHECK_FALSE(fs::exists(prefix("fromcfg") + "_summary.json"));

  const fs::path bad = work_dir() / "bad.ini";
  {
    std::ofstream f(bad);
    f << "[solve]\n"
      << "no_such_option=1\n";
  }
  CHECK(run_cli("--config " + bad.string() + " solve --mu 1").exit_code == 2);
}

TEST_CASE("without --out, files land in the seed directory") {
  const fs::path seed = work_dir() / "seed";
  fs::create_directories(seed);
  const auto res = run_cli("solve --mu 1", "MT_BRANCH_SEED_DIR=\"" + seed.string() + "\" ");
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(seed / "solve_summary.json"));
  CHECK(fs::exists(seed / "solve_profile.csv"));
}

TEST_CASE("json table format") {
  const auto res = run_cli("solve --mu 2 --format json --out " + prefix("js"));
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(prefix("js") + "_profile.json"));
  const auto rows = nlohmann::json::parse(read_file(prefix("js") + "_profile.json"));
  REQUIRE(rows.is_array());
  REQUIRE(rows.size() > 10);
  CHECK(rows[0].contains("s"));
  CHECK(rows[0].contains("f_density"));
  // Same summary content regardless of the table format.
  const auto j = read_json(prefix("js") + "_summary.json");
  CHECK(j.at("mu").get<double>() == 2.0);
}
