#include "nlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nlab/cut_norm.hpp"
#include "nlab/parallel.hpp"

namespace nlab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<int> normalized_k_list(std::vector<int> ks, const char* what) {
  if (ks.empty()) throw std::invalid_argument(std::string(what) + ": k_list is empty");
  for (int k : ks)
    if (k < 1) throw std::invalid_argument(std::string(what) + ": k values must be >= 1");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

std::size_t window_start(const std::vector<int>& ks) {
  const int kmax = ks.back();
  const int window_k = (kmax + 1) / 2;  // ceil(kmax / 2)
  std::size_t i = 0;
  while (i < ks.size() && ks[i] < window_k) ++i;
  return i;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double hypothesis_gap(const PairMeasure& mu_k, const PairMeasure& mu, double p,
                      std::uint64_t seed) {
  if (mu.grid().num_nodes() > kExactCutNormMaxNodes) return kNaN;
  return cut_distance(mu_k, mu, p, seed);
}

void fill_hypotheses(ConvergenceReport& rep, const std::vector<int>& ks) {
  std::vector<double> gaps;
  for (const ReportRow& r : rep.rows) gaps.push_back(r.cut_norm_gap);
  rep.scalars["cut_norm_gap_exponent"] = fitted_decay_exponent(ks, gaps);
}

// Gap sequence decreasing over its last three entries (values <= 1e-14 count
// as converged).
Verdict decreasing_tail(const std::vector<double>& gaps, const std::string& name) {
  Verdict v{name, true, 0.0, 0.0, ""};
  if (gaps.size() < 3) {
    v.pass = false;
    v.detail = "needs at least three k values";
    return v;
  }
  const std::size_t n = gaps.size();
  for (std::size_t i = n - 3; i + 1 < n; ++i)
    if (!(gaps[i + 1] < gaps[i] || gaps[i + 1] <= 1e-14)) v.pass = false;
  v.observed = gaps[n - 1];
  v.detail = "last three gaps " + fmt(gaps[n - 3]) + ", " + fmt(gaps[n - 2]) + ", " + fmt(gaps[n - 1]);
  return v;
}

double relative_gap(double m, double ref) {
  const double scale = std::abs(ref);
  return scale > 1e-300 ? std::abs(m - ref) / scale : std::abs(m - ref);
}

struct Minimum {
  GridFunction u;
  double value;
  bool converged;
  bool hit_cap;
};

Minimum minimize(const PairMeasure& mu, const PairIntegrand& f, const LocalIntegrand& g,
                 const Forcing& forcing, int restarts, std::uint64_t seed, int max_iter) {
  const GridPtr& gp = mu.grid_ptr();
  std::optional<GridFunction> h;
  if (forcing) h = GridFunction::sample(gp, forcing);
  const Energy e{mu, f, g, h};
  MinimizeOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  opts.max_iter = max_iter;
  MinimizeResult r = minimize_energy(e, opts);
  return {std::move(r.u), r.value, r.diagnostics.converged, r.diagnostics.hit_cap};
}

double unforced_energy(const PairMeasure& mu, const PairIntegrand& f, const LocalIntegrand& g,
                       const GridFunction& u) {
  return eval_F(mu, f, u) + eval_G(g, u);
}

double forced_energy(const PairMeasure& mu, const PairIntegrand& f, const LocalIntegrand& g,
                     const Forcing& forcing, const GridFunction& u) {
  std::optional<GridFunction> h;
  if (forcing) h = GridFunction::sample(mu.grid_ptr(), forcing);
  return eval_energy(Energy{mu, f, g, h}, u);
}

void require_nonnegative_family(const SequenceFamily& fam, const std::vector<int>& ks,
                                const char* what) {
  if (fam.limit_measure.is_signed())
    throw std::invalid_argument(std::string(what) + ": limit measure must be nonnegative");
  (void)ks;
}

}  // namespace

GridFunction default_base(const GridPtr& grid) {
  return GridFunction::sample(grid, [&](const Point& x) {
    double v = x[0] * (1.0 - x[0]);
    if (grid->dim() == 2) v *= x[1] * (1.0 - x[1]);
    return v;
  });
}

double cut_distance(const PairMeasure& mu_k, const PairMeasure& mu, double p, std::uint64_t seed) {
  const PairMeasure d = cut_distance_inputs(mu_k, mu);
  if (p == 2.0) return cut_norm_exact_p2(d).value;
  return cut_norm_alternating(d, p, seed, 4).value;
}

ConvergenceReport continuity_experiment(const SequenceFamily& family, const PairIntegrand& f,
                                        SequenceKind u_kind, SequenceKind v_kind,
                                        const std::vector<int>& k_list,
                                        const ContinuityOptions& opts) {
  const std::vector<int> ks = normalized_k_list(k_list, "continuity_experiment");
  const GridPtr& gp = family.grid;
  const double p = family.params.p;
  const GridFunction u = opts.base_u ? *opts.base_u : default_base(gp);
  const GridFunction v = opts.base_v ? *opts.base_v : default_base(gp);
  require_same_grid(*gp, u.grid(), "continuity_experiment");
  require_same_grid(*gp, v.grid(), "continuity_experiment");

  const PairMeasure& mu = family.limit_measure;
  const double i_inf = double_integral(mu, f, u, v);
  const double mass_inf = total_mass(mu);

  ConvergenceReport rep;
  rep.experiment = "continuity";
  rep.family = family.id;
  rep.exponent_of = "integral_gap";
  rep.rows.resize(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    const int k = ks[i];
    const PairMeasure mu_k = family.measure(k);
    const GridFunction uk = weak_test_sequence(u_kind, k, u, p);
    const GridFunction vk = weak_test_sequence(v_kind, k, v, p);
    const double ik = double_integral(mu_k, f, uk, vk);
    ReportRow& row = rep.rows[i];
    row.k = k;
    row.cut_norm_gap = hypothesis_gap(mu_k, mu, p, opts.seed);
    row.mass_gap = std::abs(total_mass(mu_k) - mass_inf);
    row.integral_gap = std::abs(ik - i_inf);
    row.verdict = row.integral_gap <= opts.tolerance ? "within_tol" : "above_tol";
    row.extras["I_k"] = ik;
  });

  std::vector<double> gaps;
  for (const ReportRow& r : rep.rows) gaps.push_back(r.integral_gap);
  rep.fitted_exponent = fitted_decay_exponent(ks, gaps);
  fill_hypotheses(rep, ks);
  rep.scalars["I_inf"] = i_inf;
  rep.scalars["p"] = p;
  rep.verdicts.push_back(decreasing_tail(gaps, "integral_gap_decreasing"));
  rep.verdicts.push_back(Verdict{"integral_gap_at_max_k", gaps.back() <= opts.tolerance,
                                 gaps.back(), opts.tolerance,
                                 "|I_k - I_inf| at k=" + std::to_string(ks.back())});
  if (!f.bound && f.kernel != PairKernel::product)
    rep.notes.push_back("f is not declared bounded");
  return rep;
}

ConvergenceReport semicontinuity_experiment(const SequenceFamily& family, const PairIntegrand& f,
                                            SequenceKind u_kind, const std::vector<int>& k_list,
                                            const SemicontinuityOptions& opts) {
  if (!f.nonnegative)
    throw std::invalid_argument("semicontinuity_experiment: f must be nonnegative");
  const std::vector<int> ks = normalized_k_list(k_list, "semicontinuity_experiment");
  const GridPtr& gp = family.grid;
  const double p = family.params.p;
  const GridFunction u = opts.base ? *opts.base : default_base(gp);
  require_same_grid(*gp, u.grid(), "semicontinuity_experiment");
  const PairMeasure& mu = family.limit_measure;
  const double i_inf = double_integral(mu, f, u, u);
  const double mass_inf = total_mass(mu);

  ConvergenceReport rep;
  rep.experiment = "semicontinuity";
  rep.family = family.id;
  rep.exponent_of = "integral_gap";
  rep.rows.resize(ks.size());
  std::vector<double> values(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    const int k = ks[i];
    const PairMeasure mu_k = family.measure(k);
    const GridFunction uk = weak_test_sequence(u_kind, k, u, p);
    const double ik = double_integral(mu_k, f, uk, uk);
    values[i] = ik;
    ReportRow& row = rep.rows[i];
    row.k = k;
    row.cut_norm_gap = hypothesis_gap(mu_k, mu, p, opts.seed);
    row.mass_gap = std::abs(total_mass(mu_k) - mass_inf);
    row.integral_gap = std::abs(ik - i_inf);
    row.verdict = ik >= i_inf - opts.tolerance ? "above_limit" : "below_limit";
    row.extras["I_k"] = ik;
    row.extras["I_k_minus_I_inf"] = ik - i_inf;
  });

  std::vector<double> gaps;
  for (const ReportRow& r : rep.rows) gaps.push_back(r.integral_gap);
  rep.fitted_exponent = fitted_decay_exponent(ks, gaps);
  fill_hypotheses(rep, ks);
  const std::size_t w0 = window_start(ks);
  const double window_min = *std::min_element(values.begin() + static_cast<long>(w0), values.end());
  const double all_min = *std::min_element(values.begin(), values.end());
  rep.scalars["I_inf"] = i_inf;
  rep.scalars["window_min_I_k"] = window_min;
  rep.scalars["min_I_k"] = all_min;
  rep.scalars["window_start_k"] = ks[w0];
  rep.verdicts.push_back(Verdict{"liminf_window", window_min >= i_inf - opts.tolerance,
                                 window_min - i_inf, opts.tolerance,
                                 "min_{k >= " + std::to_string(ks[w0]) + "} I_k - I_inf"});
  rep.verdicts.push_back(Verdict{"min_over_all_k", all_min >= i_inf - opts.tolerance,
                                 all_min - i_inf, opts.tolerance, "min_k I_k - I_inf"});
  rep.notes.push_back("liminf replaced by the minimum over a finite window of k");
  return rep;
}

ConvergenceReport gamma_experiment(const SequenceFamily& family, const PairIntegrand& f,
                                   const Forcing& forcing, const std::vector<int>& k_list,
                                   const GammaOptions& opts) {
  const std::vector<int> ks = normalized_k_list(k_list, "gamma_experiment");
  require_nonnegative_family(family, ks, "gamma_experiment");
  const double p = family.params.p;
  const PairMeasure& mu = family.limit_measure;

  const Minimum lim = minimize(mu, f, family.limit_local, forcing, opts.restarts, opts.seed,
                               opts.max_iter);
  const double e0_lim = unforced_energy(mu, f, family.limit_local, lim.u);

  ConvergenceReport rep;
  rep.experiment = "gamma";
  rep.family = family.id;
  rep.exponent_of = "integral_gap";
  rep.rows.resize(ks.size());
  std::vector<double> e0_min(ks.size());
  std::vector<double> e0_osc(ks.size(), kNaN);
  std::vector<char> converged(ks.size(), 1);
  parallel_for(ks.size(), [&](std::size_t i) {
    const int k = ks[i];
    const PairMeasure mu_k = family.measure(k);
    const LocalIntegrand g_k = family.local(k);
    const Minimum mk = minimize(mu_k, f, g_k, forcing, opts.restarts, opts.seed, opts.max_iter);
    converged[i] = mk.converged;
    e0_min[i] = unforced_energy(mu_k, f, g_k, mk.u);
    ReportRow& row = rep.rows[i];
    row.k = k;
    row.cut_norm_gap = hypothesis_gap(mu_k, mu, p, opts.seed);
    row.mass_gap = std::abs(total_mass(mu_k) - total_mass(mu));
    row.min_k = mk.value;
    row.min_limit = lim.value;
    row.integral_gap = relative_gap(mk.value, lim.value);
    row.minimizer_dist = sobolev_norm(mk.u - lim.u, p);
    row.extras["unforced_energy_at_minimizer"] = e0_min[i];
    row.extras["converged"] = mk.converged ? 1.0 : 0.0;
    if (lim.u.grid().n() + 1 >= 8 * k) {
      const GridFunction osc = weak_test_sequence(SequenceKind::oscillation, k, lim.u, p);
      e0_osc[i] = unforced_energy(mu_k, f, g_k, osc);
      row.extras["unforced_energy_oscillating"] = e0_osc[i];
    }
    row.verdict = row.integral_gap <= opts.relative_tolerance ? "within_tol" : "above_tol";
  });

  std::vector<double> gaps;
  for (const ReportRow& r : rep.rows) gaps.push_back(r.integral_gap);
  rep.fitted_exponent = fitted_decay_exponent(ks, gaps);
  fill_hypotheses(rep, ks);
  rep.scalars["m_inf"] = lim.value;
  rep.scalars["limit_unforced_energy"] = e0_lim;
  rep.scalars["p"] = p;

  rep.verdicts.push_back(Verdict{"min_value_gap_at_max_k", gaps.back() <= opts.relative_tolerance,
                                 gaps.back(), opts.relative_tolerance,
                                 "|m_k - m_inf| / |m_inf| at k=" + std::to_string(ks.back())});
  const std::size_t w0 = window_start(ks);
  auto window_min = [&](const std::vector<double>& xs) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = w0; i < xs.size(); ++i)
      if (!std::isnan(xs[i])) m = std::min(m, xs[i]);
    return m;
  };
  const double lm = window_min(e0_min);
  rep.verdicts.push_back(Verdict{"liminf_along_minimizers", e0_lim <= lm + opts.liminf_tolerance,
                                 e0_lim - lm, opts.liminf_tolerance,
                                 "(F+G)(u*) - min_{k >= " + std::to_string(ks[w0]) +
                                     "} (F_k+G_k)(u_k*)"});
  const double lo = window_min(e0_osc);
  if (std::isfinite(lo))
    rep.verdicts.push_back(Verdict{"liminf_along_oscillations", e0_lim <= lo + opts.liminf_tolerance,
                                   e0_lim - lo, opts.liminf_tolerance,
                                   "(F+G)(u*) - min_k (F_k+G_k)(u* + osc_k)"});
  if (opts.min_exponent)
    rep.verdicts.push_back(Verdict{"min_value_decay_exponent",
                                   rep.fitted_exponent >= *opts.min_exponent, rep.fitted_exponent,
                                   *opts.min_exponent, "fitted on the last half of k_list"});

  if (opts.fine_n > 0) {
    if (opts.fine_k < 1) throw std::invalid_argument("gamma_experiment: fine_k must be >= 1");
    const SequenceFamily fine = make_family(family.id, make_grid(1, opts.fine_n), family.params);
    const Minimum mf = minimize(fine.measure(opts.fine_k), f, fine.local(opts.fine_k), forcing,
                                1, opts.seed, opts.max_iter);
    const double rel = relative_gap(mf.value, lim.value);
    rep.scalars["fine_grid_min"] = mf.value;
    rep.scalars["fine_grid_n"] = opts.fine_n;
    rep.scalars["fine_grid_k"] = opts.fine_k;
    rep.verdicts.push_back(Verdict{"fine_grid_cross_check", rel <= opts.fine_tolerance, rel,
                                   opts.fine_tolerance,
                                   "|m_fine - m_inf| / |m_inf| with n=" + std::to_string(opts.fine_n) +
                                       ", k=" + std::to_string(opts.fine_k)});
  }
  if (!lim.converged) rep.notes.push_back("limit minimization did not reach the stationarity tolerance");
  for (std::size_t i = 0; i < ks.size(); ++i)
    if (!converged[i])
      rep.notes.push_back("minimization at k=" + std::to_string(ks[i]) +
                          " did not reach the stationarity tolerance");
  rep.notes.push_back("liminf replaced by the minimum over a finite window of k");
  return rep;
}

ConvergenceReport mosco_check(const SequenceFamily& family, const PairIntegrand& f,
                              const Forcing& forcing, const std::vector<int>& k_list,
                              const MoscoOptions& opts) {
  const std::vector<int> ks = normalized_k_list(k_list, "mosco_check");
  require_nonnegative_family(family, ks, "mosco_check");
  const double p = family.params.p;
  const PairMeasure& mu = family.limit_measure;
  const Minimum lim = minimize(mu, f, family.limit_local, forcing, opts.restarts, opts.seed,
                               opts.max_iter);
  const double sup = lim.u.values().cwiseAbs().maxCoeff();
  const double lambda = sup > 0.0 ? 2.0 * sup : 1.0;
  const GridFunction lim_trunc = truncate(lim.u, lambda);

  ConvergenceReport rep;
  rep.experiment = "mosco";
  rep.family = family.id;
  rep.exponent_of = "minimizer_dist";
  rep.rows.resize(ks.size());
  std::vector<double> linf(ks.size());
  std::vector<double> trunc_gap(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    const int k = ks[i];
    const PairMeasure mu_k = family.measure(k);
    const LocalIntegrand g_k = family.local(k);
    const Minimum mk = minimize(mu_k, f, g_k, forcing, opts.restarts, opts.seed, opts.max_iter);
    const GridFunction rec = truncate(mk.u, lambda);
    const double e_rec = forced_energy(mu_k, f, g_k, forcing, rec);
    const double e_lim_trunc = forced_energy(mu_k, f, g_k, forcing, lim_trunc);
    const GridFunction diff = rec - lim.u;
    linf[i] = diff.values().cwiseAbs().maxCoeff();
    trunc_gap[i] = relative_gap(e_lim_trunc, lim.value);
    ReportRow& row = rep.rows[i];
    row.k = k;
    row.cut_norm_gap = hypothesis_gap(mu_k, mu, p, opts.seed);
    row.mass_gap = std::abs(total_mass(mu_k) - total_mass(mu));
    row.min_k = e_rec;
    row.min_limit = lim.value;
    row.integral_gap = relative_gap(e_rec, lim.value);
    row.minimizer_dist = sobolev_norm(diff, p);
    row.extras["sup_distance"] = linf[i];
    row.extras["truncated_limit_energy"] = e_lim_trunc;
    row.extras["truncated_limit_energy_gap"] = trunc_gap[i];
    row.verdict = row.integral_gap <= opts.energy_tolerance ? "energy_within_tol" : "energy_above_tol";
  });

  std::vector<double> dists;
  for (const ReportRow& r : rep.rows) dists.push_back(r.minimizer_dist);
  rep.fitted_exponent = fitted_decay_exponent(ks, dists);
  fill_hypotheses(rep, ks);
  rep.scalars["m_inf"] = lim.value;
  rep.scalars["lambda"] = lambda;
  rep.scalars["sup_distance_exponent"] = fitted_decay_exponent(ks, linf);
  rep.scalars["truncated_limit_energy_gap_at_max_k"] = trunc_gap.back();
  const double egap = rep.rows.back().integral_gap;
  rep.verdicts.push_back(Verdict{"recovery_energy_at_max_k", egap <= opts.energy_tolerance, egap,
                                 opts.energy_tolerance,
                                 "|E_k(u_k^rec) - m_inf| / |m_inf| at k=" + std::to_string(ks.back())});
  rep.verdicts.push_back(Verdict{"strong_distance_decay", rep.fitted_exponent >= opts.min_exponent,
                                 rep.fitted_exponent, opts.min_exponent,
                                 "fitted exponent of ||u_k^rec - u*||_{1,p}"});
  rep.notes.push_back("recovery candidates are truncated k-minimizers; the truncated limit "
                      "minimizer is reported in extras for comparison");
  return rep;
}

}  // namespace nlab
