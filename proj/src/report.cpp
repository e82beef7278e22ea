#include "nlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool is_number_or_null(const nlohmann::json& j) {
  return j.is_null() || j.is_number() || (j.is_string() && (j == "inf" || j == "-inf"));
}

}  // namespace

ReportRow::ReportRow()
    : cut_norm_gap(kNaN),
      mass_gap(kNaN),
      integral_gap(kNaN),
      min_k(kNaN),
      min_limit(kNaN),
      minimizer_dist(kNaN) {}

ConvergenceReport::ConvergenceReport() : fitted_exponent(kNaN) {}

bool ConvergenceReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

double fitted_decay_exponent(const std::vector<int>& ks, const std::vector<double>& gaps) {
  const std::size_t len = std::min(ks.size(), gaps.size());
  if (len == 0) return kNaN;
  const std::size_t window = (len + 1) / 2;
  std::vector<double> lx;
  std::vector<double> ly;
  bool all_tiny = true;
  for (std::size_t i = len - window; i < len; ++i) {
    if (!(gaps[i] <= 1e-12)) all_tiny = false;
    if (gaps[i] > 1e-12 && std::isfinite(gaps[i]) && ks[i] > 0) {
      lx.push_back(std::log(static_cast<double>(ks[i])));
      ly.push_back(std::log(gaps[i]));
    }
  }
  if (all_tiny) return std::numeric_limits<double>::infinity();
  if (lx.size() < 2) return kNaN;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return kNaN;
  return -sxy / sxx;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json j;
  j["experiment"] = r.experiment;
  j["family"] = r.family;
  j["exponent_of"] = r.exponent_of;
  j["fitted_exponent"] = number(r.fitted_exponent);
  j["all_pass"] = r.all_pass();
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& row : r.rows) {
    nlohmann::json o;
    o["k"] = row.k;
    o["cut_norm_gap"] = number(row.cut_norm_gap);
    o["mass_gap"] = number(row.mass_gap);
    o["integral_gap"] = number(row.integral_gap);
    o["min_k"] = number(row.min_k);
    o["min_limit"] = number(row.min_limit);
    o["minimizer_dist"] = number(row.minimizer_dist);
    o["verdict"] = row.verdict;
    nlohmann::json extras = nlohmann::json::object();
    for (const auto& [key, v] : row.extras) extras[key] = number(v);
    o["extras"] = extras;
    rows.push_back(o);
  }
  j["rows"] = rows;
  nlohmann::json verdicts = nlohmann::json::array();
  for (const Verdict& v : r.verdicts)
    verdicts.push_back({{"name", v.name},
                        {"pass", v.pass},
                        {"observed", number(v.observed)},
                        {"tolerance", number(v.tolerance)},
                        {"detail", v.detail}});
  j["verdicts"] = verdicts;
  nlohmann::json scalars = nlohmann::json::object();
  for (const auto& [key, v] : r.scalars) scalars[key] = number(v);
  j["scalars"] = scalars;
  j["notes"] = r.notes;
  return j;
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const ReportRow& row : r.rows) {
    os << row.k << ',' << csv_number(row.cut_norm_gap) << ',' << csv_number(row.mass_gap) << ','
       << csv_number(row.integral_gap) << ',' << csv_number(row.min_k) << ','
       << csv_number(row.min_limit) << ',' << csv_number(row.minimizer_dist) << ','
       << row.verdict << '\n';
  }
  return os.str();
}

std::vector<std::string> validate_report_json(const nlohmann::json& j) {
  std::vector<std::string> errs;
  if (!j.is_object()) return {"/: report must be an object"};
  auto need = [&](const char* key, auto pred, const char* what) {
    if (!j.contains(key) || !pred(j[key])) errs.push_back(std::string("/") + key + ": expected " + what);
  };
  need("experiment", [](const auto& v) { return v.is_string(); }, "string");
  need("family", [](const auto& v) { return v.is_string(); }, "string");
  need("exponent_of", [](const auto& v) { return v.is_string(); }, "string");
  need("fitted_exponent", is_number_or_null, "number or null");
  need("all_pass", [](const auto& v) { return v.is_boolean(); }, "boolean");
  need("scalars", [](const auto& v) { return v.is_object(); }, "object");
  need("notes", [](const auto& v) { return v.is_array(); }, "array");
  need("rows", [](const auto& v) { return v.is_array(); }, "array");
  need("verdicts", [](const auto& v) { return v.is_array(); }, "array");
  if (j.contains("rows") && j["rows"].is_array()) {
    int prev_k = std::numeric_limits<int>::min();
    for (std::size_t i = 0; i < j["rows"].size(); ++i) {
      const auto& row = j["rows"][i];
      const std::string at = "/rows/" + std::to_string(i);
      if (!row.is_object()) {
        errs.push_back(at + ": expected object");
        continue;
      }
      if (!row.contains("k") || !row["k"].is_number_integer()) {
        errs.push_back(at + "/k: expected integer");
      } else {
        const int k = row["k"].get<int>();
        if (k < prev_k) errs.push_back(at + "/k: rows must be sorted by k");
        prev_k = k;
      }
      for (const char* c : {"cut_norm_gap", "mass_gap", "integral_gap", "min_k", "min_limit",
                            "minimizer_dist"})
        if (!row.contains(c) || !is_number_or_null(row[c]))
          errs.push_back(at + "/" + c + ": expected number or null");
      if (!row.contains("verdict") || !row["verdict"].is_string())
        errs.push_back(at + "/verdict: expected string");
      if (!row.contains("extras") || !row["extras"].is_object())
        errs.push_back(at + "/extras: expected object");
    }
  }
  if (j.contains("verdicts") && j["verdicts"].is_array()) {
    for (std::size_t i = 0; i < j["verdicts"].size(); ++i) {
      const auto& v = j["verdicts"][i];
      const std::string at = "/verdicts/" + std::to_string(i);
      if (!v.is_object() || !v.contains("name") || !v["name"].is_string() || !v.contains("pass") ||
          !v["pass"].is_boolean() || !v.contains("observed") || !is_number_or_null(v["observed"]) ||
          !v.contains("tolerance") || !is_number_or_null(v["tolerance"]))
        errs.push_back(at + ": expected {name, pass, observed, tolerance, detail}");
    }
  }
  return errs;
}

}  // namespace nlab
