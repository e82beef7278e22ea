#pragma once
// Convergence reports and their JSON / CSV serialization.

#include <map>
#include <string>
#include <vector>

#include "json.hpp"  // vendored nlohmann/json

namespace nlab {

// One row per k. Columns that do not apply to an experiment hold NaN and are
// written as null (JSON) or empty (CSV).
struct ReportRow {
  int k = 0;
  double cut_norm_gap;
  double mass_gap;
  double integral_gap;
  double min_k;
  double min_limit;
  double minimizer_dist;
  std::string verdict;
  std::map<std::string, double> extras;

  ReportRow();
};

struct Verdict {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ConvergenceReport {
  std::string experiment;
  std::string family;
  std::vector<ReportRow> rows;  // sorted by k
  std::string exponent_of;      // column the decay exponent was fitted to
  double fitted_exponent;
  std::vector<Verdict> verdicts;
  std::map<std::string, double> scalars;
  std::vector<std::string> notes;

  ConvergenceReport();
  bool all_pass() const;
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {"k",         "cut_norm_gap", "mass_gap",
                                                "integral_gap", "min_k",     "min_limit",
                                                "minimizer_dist", "verdict"};
  return cols;
}

// Least-squares slope of -log(gap) against log(k) over the last ceil(len/2)
// rows with gap > 1e-12. +inf when every gap in that window is <= 1e-12,
// NaN when fewer than two usable points remain.
double fitted_decay_exponent(const std::vector<int>& ks, const std::vector<double>& gaps);

nlohmann::json to_json(const ConvergenceReport& r);
std::string to_csv(const ConvergenceReport& r);

// Schema check for a serialized report; returns one message per problem,
// each prefixed with a JSON pointer.
std::vector<std::string> validate_report_json(const nlohmann::json& j);

}  // namespace nlab
