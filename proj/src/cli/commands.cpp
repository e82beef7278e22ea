#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "nlab/cli.hpp"
#include "nlab/cut_norm.hpp"
#include "nlab/experiments.hpp"
#include "nlab/functionals.hpp"
#include "parse.hpp"

namespace nlab::cli {

using json = nlohmann::json;
using namespace detail;

namespace {

struct Source {
  std::string id;
  PairMeasure measure;
  std::optional<SequenceFamily> family;
};

bool is_family(const std::string& id) {
  for (const auto& f : family_ids())
    if (f == id) return true;
  return false;
}

// Named measure, or a family member (k given) / family limit (k absent).
Source resolve_measure(const json& c, const GridPtr& grid) {
  const std::string id = c["fixture"];
  const FamilyParams fp = family_params_of(c);
  if (!is_family(id)) {
    Fixture fx = example_fixture(id, grid, fp);
    if (c.contains("k") || c.value("subtract_limit", false))
      throw std::invalid_argument("fixture '" + id + "' is a single measure; k and subtract_limit do not apply");
    return {id, *fx.measure, std::nullopt};
  }
  SequenceFamily fam = make_family(id, grid, fp);
  if (!c.contains("k")) {
    if (c.value("subtract_limit", false))
      throw std::invalid_argument("subtract_limit requires k");
    return {id, fam.limit_measure, fam};
  }
  PairMeasure mk = fam.measure(c["k"].get<int>());
  if (c.value("subtract_limit", false)) mk = cut_distance_inputs(mk, fam.limit_measure);
  return {id, std::move(mk), std::move(fam)};
}

Forcing forcing_of(const json& c) {
  if (!c.contains("forcing")) return {};
  const double h = c["forcing"];
  return [h](const Point&) { return h; };
}

void add_expectation(const json& c, ConvergenceReport& rep, const std::string& key) {
  if (!c.contains("expect")) return;
  const double want = c["expect"]["value"];
  const double tol = c["expect"]["tolerance"];
  const double got = rep.scalars.at(key);
  std::ostringstream d;
  d << std::setprecision(10) << key << " = " << got << ", expected " << want;
  rep.verdicts.push_back(Verdict{"expected_" + key, std::abs(got - want) <= tol,
                                 std::abs(got - want), tol, d.str()});
}

ConvergenceReport single(const std::string& cmd, const std::string& id) {
  ConvergenceReport rep;
  rep.experiment = cmd;
  rep.family = id;
  return rep;
}

ConvergenceReport run_cutnorm(const json& c) {
  const GridPtr grid = grid_of(c);
  const double p = p_of(c);
  const std::uint64_t seed = seed_of(c);
  const Source src = resolve_measure(c, grid);
  const std::string method = c.value("method", p == 2.0 ? "exact" : "alternating");
  ConvergenceReport rep = single("cutnorm", src.id);
  rep.notes.push_back("method: " + method);
  if (method == "graphon_subset" || method == "graphon_alternating") {
    const GraphonCutResult r =
        graphon_cut_norm(src.measure,
                         method == "graphon_subset" ? GraphonMode::subset_exact : GraphonMode::alternating,
                         seed, c.value("restarts", 16));
    rep.scalars["value"] = r.value;
    rep.scalars["exact"] = r.exact ? 1.0 : 0.0;
  } else {
    if (method == "exact" && p != 2.0)
      throw std::invalid_argument("method 'exact' requires p = 2");
    const CutNormResult r =
        method == "exact"         ? cut_norm_exact_p2(src.measure)
        : method == "alternating" ? cut_norm_alternating(src.measure, p, seed, c.value("restarts", 8))
                                  : cut_norm_bruteforce(src.measure, p, c.value("budget", 100000L), seed);
    rep.scalars["value"] = r.value;
    rep.scalars["lower_bound"] = r.lower_bound ? 1.0 : 0.0;
    rep.scalars["evaluations"] = static_cast<double>(r.evaluations);
    rep.scalars["hit_cap"] = r.hit_cap ? 1.0 : 0.0;
  }
  rep.scalars["p"] = p;
  rep.scalars["mass"] = total_mass(src.measure);
  add_expectation(c, rep, "value");
  return rep;
}

ConvergenceReport run_capacity(const json& c) {
  const GridPtr grid = grid_of(c);
  const double p = p_of(c);
  std::set<int> nodes;
  for (const json& pt : c["points"]) {
    if (static_cast<int>(pt.size()) != grid->dim())
      throw std::invalid_argument("capacity: point dimension does not match the grid");
    Point x{pt[0].get<double>(), grid->dim() == 2 ? pt[1].get<double>() : 0.0};
    nodes.insert(grid->nearest_node(x));
  }
  const std::vector<int> idx(nodes.begin(), nodes.end());
  const CapacityResult r = capacity(grid, idx, p);
  ConvergenceReport rep = single("capacity", "");
  rep.scalars["value"] = r.value;
  rep.scalars["nodes"] = static_cast<double>(idx.size());
  rep.scalars["iterations"] = r.status.iterations;
  rep.scalars["p"] = p;
  rep.verdicts.push_back(Verdict{"solver_converged", r.status.converged, r.status.residual,
                                 kSolverTolerance, "final residual"});
  add_expectation(c, rep, "value");
  return rep;
}

ConvergenceReport run_eval(const json& c) {
  const GridPtr grid = grid_of(c);
  const double p = p_of(c);
  const Source src = resolve_measure(c, grid);
  const PairIntegrand f = pair_integrand_of(c["pair_integrand"]);
  const LocalIntegrand g = c.contains("local_integrand")
                               ? local_integrand_of(c["local_integrand"])
                               : make_local_integrand("abs_pow", std::vector<double>{p});
  const GridFunction u = default_base(grid);
  ConvergenceReport rep = single("eval", src.id);
  rep.scalars["double_integral"] = double_integral(src.measure, f, u, u);
  rep.scalars["G"] = eval_G(g, u);
  if (!src.measure.is_signed()) {
    std::optional<GridFunction> h;
    if (const Forcing fo = forcing_of(c)) h = GridFunction::sample(grid, fo);
    rep.scalars["F"] = eval_F(src.measure, f, u);
    rep.scalars["energy"] = eval_energy(Energy{src.measure, f, g, h}, u);
  }
  rep.notes.push_back("evaluated at u = prod_a x_a (1 - x_a)");
  add_expectation(c, rep, c.contains("local_integrand") || src.measure.is_signed() ? "double_integral" : "F");
  return rep;
}

ConvergenceReport run_minimize(const json& c) {
  const GridPtr grid = grid_of(c);
  const SequenceFamily fam = make_family(c["family"].get<std::string>(), grid, family_params_of(c));
  const bool has_k = c.contains("k");
  const int k = has_k ? c["k"].get<int>() : 0;
  const PairMeasure mu = has_k ? fam.measure(k) : fam.limit_measure;
  const LocalIntegrand g = c.contains("local_integrand") ? local_integrand_of(c["local_integrand"])
                           : has_k                       ? fam.local(k)
                                                         : fam.limit_local;
  std::optional<GridFunction> h;
  if (const Forcing fo = forcing_of(c)) h = GridFunction::sample(grid, fo);
  MinimizeOptions opts;
  opts.restarts = c.value("restarts", opts.restarts);
  opts.seed = seed_of(c);
  opts.max_iter = c.value("max_iter", opts.max_iter);
  if (c.contains("box")) opts.box = c["box"].get<double>();
  const MinimizeResult r = minimize_energy(Energy{mu, pair_integrand_of(c["pair_integrand"]), g, h}, opts);
  ConvergenceReport rep = single("minimize", fam.id);
  const MinimizeDiagnostics& d = r.diagnostics;
  rep.scalars["value"] = r.value;
  rep.scalars["k"] = k;
  rep.scalars["iterations"] = d.iterations;
  rep.scalars["stationarity"] = d.stationarity;
  rep.scalars["best_restart"] = d.best_restart;
  rep.scalars["hit_cap"] = d.hit_cap ? 1.0 : 0.0;
  rep.scalars["trivial"] = d.trivial ? 1.0 : 0.0;
  rep.verdicts.push_back(Verdict{"converged", d.converged, d.stationarity, opts.tolerance,
                                 "stationarity of the best restart"});
  if (!has_k) rep.notes.push_back("limit energy (no k given)");
  add_expectation(c, rep, "value");
  return rep;
}

SequenceFamily family_of(const json& c) {
  return make_family(c["family"].get<std::string>(), grid_of(c), family_params_of(c));
}

ConvergenceReport run_continuity(const json& c) {
  ContinuityOptions o;
  o.tolerance = c.value("tolerance", o.tolerance);
  o.seed = seed_of(c);
  return continuity_experiment(family_of(c), pair_integrand_of(c["pair_integrand"]),
                               kind_of(c.value("u_kind", "oscillation")),
                               kind_of(c.value("v_kind", "oscillation")), k_list_of(c), o);
}

ConvergenceReport run_semicontinuity(const json& c) {
  SemicontinuityOptions o;
  o.tolerance = c.value("tolerance", o.tolerance);
  o.seed = seed_of(c);
  return semicontinuity_experiment(family_of(c), pair_integrand_of(c["pair_integrand"]),
                                   kind_of(c.value("u_kind", "concentration")), k_list_of(c), o);
}

ConvergenceReport run_gamma(const json& c) {
  GammaOptions o;
  o.restarts = c.value("restarts", o.restarts);
  o.seed = seed_of(c);
  o.max_iter = c.value("max_iter", o.max_iter);
  o.relative_tolerance = c.value("relative_tolerance", o.relative_tolerance);
  o.liminf_tolerance = c.value("liminf_tolerance", o.liminf_tolerance);
  if (c.contains("min_exponent")) o.min_exponent = c["min_exponent"].get<double>();
  o.fine_n = c.value("fine_n", 0);
  o.fine_k = c.value("fine_k", 0);
  o.fine_tolerance = c.value("fine_tolerance", o.fine_tolerance);
  return gamma_experiment(family_of(c), pair_integrand_of(c["pair_integrand"]), forcing_of(c),
                          k_list_of(c), o);
}

ConvergenceReport run_mosco(const json& c) {
  MoscoOptions o;
  o.restarts = c.value("restarts", o.restarts);
  o.seed = seed_of(c);
  o.max_iter = c.value("max_iter", o.max_iter);
  o.energy_tolerance = c.value("energy_tolerance", o.energy_tolerance);
  o.min_exponent = c.value("min_exponent", o.min_exponent);
  return mosco_check(family_of(c), pair_integrand_of(c["pair_integrand"]), forcing_of(c),
                     k_list_of(c), o);
}

bool write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  return static_cast<bool>(os);
}

}  // namespace

ConvergenceReport execute(const json& c) {
  if (auto errs = validate_config(c); !errs.empty()) throw ConfigError(std::move(errs));
  const std::string cmd = c["command"];
  try {
    if (cmd == "cutnorm") return run_cutnorm(c);
    if (cmd == "capacity") return run_capacity(c);
    if (cmd == "eval") return run_eval(c);
    if (cmd == "minimize") return run_minimize(c);
    if (cmd == "continuity") return run_continuity(c);
    if (cmd == "semicontinuity") return run_semicontinuity(c);
    if (cmd == "gamma") return run_gamma(c);
    return run_mosco(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError({std::string("/: ") + e.what()});
  }
}

int run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  json c;
  {
    std::ifstream is(config_path);
    if (!is) {
      err << "error: cannot open " << config_path.string() << "\n";
      return kExitConfigError;
    }
    try {
      c = json::parse(is);
    } catch (const json::parse_error& e) {
      err << "error: /: " << e.what() << "\n";
      return kExitConfigError;
    }
  }
  ConvergenceReport rep;
  try {
    rep = execute(c);
  } catch (const ConfigError& e) {
    for (const auto& m : e.errors()) err << "config error: " << m << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const std::filesystem::path dir = c["output_dir"].get<std::string>();
  const std::string stem = c.value("name", c["command"].get<std::string>());
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "error: cannot create " << dir.string() << ": " << ec.message() << "\n";
    return kExitConfigError;
  }
  if (!write_file(dir / (stem + ".json"), to_json(rep).dump(2) + "\n") ||
      !write_file(dir / (stem + ".csv"), to_csv(rep))) {
    err << "error: cannot write reports to " << dir.string() << "\n";
    return kExitConfigError;
  }

  out << rep.experiment << (rep.family.empty() ? "" : " " + rep.family) << "\n";
  for (const auto& [key, v] : rep.scalars) out << "  " << key << " = " << std::setprecision(10) << v << "\n";
  for (const Verdict& v : rep.verdicts)
    out << "  " << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << "\n";
  return rep.all_pass() ? kExitPass : kExitAssertionFailure;
}

std::string fixtures_table() {
  const auto rows = list_fixtures();
  std::size_t w = 0;
  for (const auto& [id, d] : rows) w = std::max(w, id.size());
  std::ostringstream os;
  for (const auto& [id, d] : rows) os << std::left << std::setw(static_cast<int>(w + 2)) << id << d << "\n";
  return os.str();
}

}  // namespace nlab::cli
