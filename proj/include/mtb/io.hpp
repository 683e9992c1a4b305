#pragma once
// Deterministic serialization: numeric tables (CSV or JSON) written with 17
// significant digits so every double round-trips bit-for-bit, plus the JSON
// summaries emitted by the command-line driver.  Repeated runs with the same
// inputs produce byte-identical files.

#include "mtb/branch.hpp"
#include "mtb/decompose.hpp"
#include "mtb/shoot.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace mtb {

/// Shortest exact decimal form of x ("%.17g"): parses back to the same bits.
std::string fmt_g17(double x);

enum class TableFormat { csv, json };

/// Column-oriented all-double table with a fixed header.
struct NumericTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Dense samples of a profile: s, r, u, u_s, f_density.  Long far-field steps
/// are subdivided so plots stay smooth; the last row sits exactly at s_hat.
NumericTable profile_table(const RadialProfile& profile);

/// One row per branch node: mu, log_lambda_mu, lambda_mu, Lambda, E_value,
/// energy_identity_gap.
NumericTable branch_table(const BranchCurve& curve);

/// One row per comparison radius: r, eta_num, eta0, w_num, w, phi_res.
NumericTable decomposition_table(const BlowupDecomposition& d);

/// One row per probe radius: R, P, bubble_pred, tail_bound.
NumericTable quantization_table(const QuantizationProfile& q);

/// Write the table as <path>; CSV uses comma separators and a header row,
/// JSON an array of row objects in header order.
void write_table(const NumericTable& table, const std::string& path, TableFormat format);

void write_text_file(const std::string& path, const std::string& content);

/// JSON summaries (ordered keys, deterministic serialization).
nlohmann::ordered_json solve_summary(const BranchPoint& pt, const RadialProfile& profile);
nlohmann::ordered_json branch_summary(const BranchCurve& curve);
nlohmann::ordered_json count_summary(const LevelCount& count, const BranchCurve& curve);
nlohmann::ordered_json asym_report(const BlowupDecomposition& d, const DecayCheckResult& decay,
                                   const QuantizationProfile& q);

}  // namespace mtb
