#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "nlab/cli.hpp"
#include "parse.hpp"

namespace nlab::cli {

using json = nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(errors.empty() ? "invalid config" : errors.front()),
      errors_(std::move(errors)) {}

std::vector<std::string> command_names() {
  return {"capacity", "continuity", "cutnorm", "eval", "gamma", "minimize", "mosco",
          "semicontinuity"};
}

namespace {

using Errors = std::vector<std::string>;
using Check = std::function<void(const json&, const std::string&, Errors&)>;

std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
  return s;
}

Check string_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    if (!v.is_string()) e.push_back(at + ": expected string");
  };
}

Check enum_check(std::vector<std::string> allowed) {
  return [allowed = std::move(allowed)](const json& v, const std::string& at, Errors& e) {
    if (!v.is_string()) {
      e.push_back(at + ": expected string");
    } else if (std::find(allowed.begin(), allowed.end(), v.get<std::string>()) == allowed.end()) {
      e.push_back(at + ": '" + v.get<std::string>() + "' is not one of " + join(allowed));
    }
  };
}

Check number_check(double lo = -std::numeric_limits<double>::infinity(), bool strict_lo = false) {
  return [lo, strict_lo](const json& v, const std::string& at, Errors& e) {
    if (!v.is_number()) {
      e.push_back(at + ": expected number");
      return;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) e.push_back(at + ": must be finite");
    else if (strict_lo ? !(x > lo) : !(x >= lo))
      e.push_back(at + ": must be " + (strict_lo ? "> " : ">= ") + std::to_string(lo));
  };
}

Check integer_check(long lo, long hi = std::numeric_limits<int>::max()) {
  return [lo, hi](const json& v, const std::string& at, Errors& e) {
    if (!v.is_number_integer()) {
      e.push_back(at + ": expected integer");
      return;
    }
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
      e.push_back(at + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  };
}

Check bool_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    if (!v.is_boolean()) e.push_back(at + ": expected boolean");
  };
}

void check_object(const json& v, const std::string& at, Errors& e,
                  const std::map<std::string, std::pair<Check, bool>>& fields) {
  if (!v.is_object()) {
    e.push_back(at + ": expected object");
    return;
  }
  for (const auto& [key, spec] : fields) {
    if (v.contains(key)) spec.first(v[key], at + "/" + key, e);
    else if (spec.second) e.push_back(at + "/" + key + ": required");
  }
  for (const auto& item : v.items())
    if (!fields.count(item.key())) e.push_back(at + "/" + item.key() + ": unknown key");
}

Check grid_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    check_object(v, at, e,
                 {{"dim", {integer_check(1, 2), true}},
                  {"n", {integer_check(1, Grid::kMaxNodesPerAxis1D), true}}});
  };
}

Check number_list_check(std::size_t min_len) {
  return [min_len](const json& v, const std::string& at, Errors& e) {
    if (!v.is_array()) {
      e.push_back(at + ": expected array of numbers");
      return;
    }
    if (v.size() < min_len) e.push_back(at + ": needs at least " + std::to_string(min_len) + " entries");
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
        e.push_back(at + "/" + std::to_string(i) + ": expected finite number");
  };
}

Check k_list_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    if (!v.is_array() || v.empty()) {
      e.push_back(at + ": expected non-empty array of integers");
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i)
      integer_check(1)(v[i], at + "/" + std::to_string(i), e);
  };
}

Check points_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    if (!v.is_array() || v.empty()) {
      e.push_back(at + ": expected non-empty array of points");
      return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pt = at + "/" + std::to_string(i);
      if (!v[i].is_array() || v[i].empty() || v[i].size() > 2) {
        e.push_back(pt + ": expected [x] or [x, y]");
        continue;
      }
      number_list_check(1)(v[i], pt, e);
    }
  };
}

template <class Make>
Check integrand_check(std::vector<std::string> ids, Make make) {
  return [ids = std::move(ids), make](const json& v, const std::string& at, Errors& e) {
    const std::size_t before = e.size();
    check_object(v, at, e, {{"id", {enum_check(ids), true}}, {"params", {number_list_check(0), false}}});
    if (e.size() != before) return;
    try {
      make(v);
    } catch (const std::exception& ex) {
      e.push_back(at + "/params: " + ex.what());
    }
  };
}

Check expect_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    check_object(v, at, e,
                 {{"value", {number_check(), true}}, {"tolerance", {number_check(0.0), true}}});
  };
}

Check family_params_check() {
  return [](const json& v, const std::string& at, Errors& e) {
    check_object(v, at, e,
                 {{"alpha", {number_check(0.0, true), false}},
                  {"beta", {number_check(0.0, true), false}},
                  {"center", {number_list_check(2), false}}});
  };
}

std::vector<std::string> measure_source_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, desc] : list_fixtures()) ids.push_back(id);
  return ids;
}

using FieldMap = std::map<std::string, std::pair<Check, bool>>;

FieldMap common_fields() {
  return {{"command", {enum_check(command_names()), true}},
          {"grid", {grid_check(), true}},
          {"p", {number_check(1.0, true), false}},
          {"seed", {integer_check(0, std::numeric_limits<int>::max()), false}},
          {"output_dir", {string_check(), true}},
          {"name", {string_check(), false}}};
}

FieldMap command_fields(const std::string& cmd) {
  const Check pair = integrand_check(pair_integrand_ids(), detail::pair_integrand_of);
  const Check local = integrand_check(local_integrand_ids(), detail::local_integrand_of);
  const Check kinds = enum_check({"oscillation", "concentration", "stationary"});
  const Check families = enum_check(family_ids());
  if (cmd == "cutnorm")
    return {{"fixture", {enum_check(measure_source_ids()), true}},
            {"k", {integer_check(1), false}},
            {"subtract_limit", {bool_check(), false}},
            {"method", {enum_check({"exact", "alternating", "bruteforce", "graphon_subset",
                                    "graphon_alternating"}),
                        false}},
            {"restarts", {integer_check(1, 1000), false}},
            {"budget", {integer_check(1), false}},
            {"family_params", {family_params_check(), false}},
            {"expect", {expect_check(), false}}};
  if (cmd == "capacity")
    return {{"points", {points_check(), true}}, {"expect", {expect_check(), false}}};
  if (cmd == "eval")
    return {{"fixture", {enum_check(measure_source_ids()), true}},
            {"k", {integer_check(1), false}},
            {"pair_integrand", {pair, true}},
            {"local_integrand", {local, false}},
            {"forcing", {number_check(), false}},
            {"family_params", {family_params_check(), false}},
            {"expect", {expect_check(), false}}};
  if (cmd == "minimize")
    return {{"family", {families, true}},
            {"k", {integer_check(1), false}},
            {"pair_integrand", {pair, true}},
            {"local_integrand", {local, false}},
            {"forcing", {number_check(), false}},
            {"restarts", {integer_check(1, 1000), false}},
            {"max_iter", {integer_check(0), false}},
            {"box", {number_check(0.0, true), false}},
            {"family_params", {family_params_check(), false}},
            {"expect", {expect_check(), false}}};
  if (cmd == "continuity")
    return {{"family", {families, true}},
            {"pair_integrand", {pair, true}},
            {"u_kind", {kinds, false}},
            {"v_kind", {kinds, false}},
            {"k_list", {k_list_check(), true}},
            {"tolerance", {number_check(0.0), false}},
            {"family_params", {family_params_check(), false}}};
  if (cmd == "semicontinuity")
    return {{"family", {families, true}},
            {"pair_integrand", {pair, true}},
            {"u_kind", {kinds, false}},
            {"k_list", {k_list_check(), true}},
            {"tolerance", {number_check(0.0), false}},
            {"family_params", {family_params_check(), false}}};
  if (cmd == "gamma")
    return {{"family", {families, true}},
            {"pair_integrand", {pair, true}},
            {"forcing", {number_check(), false}},
            {"k_list", {k_list_check(), true}},
            {"restarts", {integer_check(1, 1000), false}},
            {"max_iter", {integer_check(0), false}},
            {"relative_tolerance", {number_check(0.0), false}},
            {"liminf_tolerance", {number_check(0.0), false}},
            {"min_exponent", {number_check(), false}},
            {"fine_n", {integer_check(0, Grid::kMaxNodesPerAxis1D), false}},
            {"fine_k", {integer_check(1), false}},
            {"fine_tolerance", {number_check(0.0), false}},
            {"family_params", {family_params_check(), false}}};
  if (cmd == "mosco")
    return {{"family", {families, true}},
            {"pair_integrand", {pair, true}},
            {"forcing", {number_check(), false}},
            {"k_list", {k_list_check(), true}},
            {"restarts", {integer_check(1, 1000), false}},
            {"max_iter", {integer_check(0), false}},
            {"energy_tolerance", {number_check(0.0), false}},
            {"min_exponent", {number_check(), false}},
            {"family_params", {family_params_check(), false}}};
  return {};
}

}  // namespace

std::vector<std::string> validate_config(const json& config) {
  Errors e;
  if (!config.is_object()) return {"/: config must be a JSON object"};
  FieldMap fields = common_fields();
  std::string cmd;
  if (config.contains("command") && config["command"].is_string()) cmd = config["command"];
  for (auto& kv : command_fields(cmd)) fields.insert(std::move(kv));
  check_object(config, "", e, fields);
  if (cmd == "gamma" && config.contains("fine_n") && config["fine_n"].is_number_integer() &&
      config["fine_n"].get<long long>() > 0 && !config.contains("fine_k"))
    e.push_back("/fine_k: required when fine_n > 0");
  for (std::string& msg : e)
    if (msg.rfind(": ", 0) == 0) msg = "/" + msg;  // root-level messages
  return e;
}

namespace detail {

GridPtr grid_of(const json& c) { return make_grid(c["grid"]["dim"].get<int>(), c["grid"]["n"].get<int>()); }

double p_of(const json& c) { return c.value("p", 2.0); }

std::uint64_t seed_of(const json& c) { return c.value("seed", std::uint64_t{0}); }

FamilyParams family_params_of(const json& c) {
  FamilyParams fp;
  fp.p = p_of(c);
  if (c.contains("family_params")) {
    const json& f = c["family_params"];
    fp.alpha = f.value("alpha", fp.alpha);
    fp.beta = f.value("beta", fp.beta);
    if (f.contains("center")) fp.center = Point{f["center"][0].get<double>(), f["center"][1].get<double>()};
  }
  return fp;
}

PairIntegrand pair_integrand_of(const json& spec) {
  const std::vector<double> params = spec.value("params", std::vector<double>{});
  return make_pair_integrand(spec["id"].get<std::string>(), params);
}

LocalIntegrand local_integrand_of(const json& spec) {
  const std::vector<double> params = spec.value("params", std::vector<double>{});
  return make_local_integrand(spec["id"].get<std::string>(), params);
}

SequenceKind kind_of(const std::string& s) {
  if (s == "concentration") return SequenceKind::concentration;
  if (s == "stationary") return SequenceKind::stationary;
  return SequenceKind::oscillation;
}

std::vector<int> k_list_of(const json& c) { return c["k_list"].get<std::vector<int>>(); }

}  // namespace detail
}  // namespace nlab::cli
