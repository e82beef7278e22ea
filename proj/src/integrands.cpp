#include "nlab/integrands.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nlab {
namespace {

const std::vector<double> kDefaultLambdas = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};

double param(std::string_view id, std::span<const double> params, std::size_t i, double fallback) {
  if (i >= params.size()) return fallback;
  if (!std::isfinite(params[i])) throw std::invalid_argument(std::string(id) + ": non-finite parameter");
  return params[i];
}

void expect_at_most(std::string_view id, std::span<const double> params, std::size_t n) {
  if (params.size() > n)
    throw std::invalid_argument(std::string(id) + ": expected at most " + std::to_string(n) +
                                " parameters, got " + std::to_string(params.size()));
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double PairIntegrand::partial1(double s, double t) const {
  if (d1) return d1(s, t);
  const double e = kFiniteDifferenceStep;
  return (eval(s + e, t) - eval(s - e, t)) / (2.0 * e);
}

double PairIntegrand::partial2(double s, double t) const {
  if (d2) return d2(s, t);
  const double e = kFiniteDifferenceStep;
  return (eval(s, t + e) - eval(s, t - e)) / (2.0 * e);
}

double LocalIntegrand::derivative(const Point& x, int axis, double xi) const {
  if (d_xi) return d_xi(x, axis, xi);
  const double e = kFiniteDifferenceStep;
  return (eval(x, axis, xi + e) - eval(x, axis, xi - e)) / (2.0 * e);
}

PairIntegrand make_pair_integrand(std::string_view id, std::span<const double> params) {
  PairIntegrand f;
  f.id = std::string(id);
  if (id == "abs_diff_pow") {
    expect_at_most(id, params, 1);
    const double p = param(id, params, 0, 2.0);
    if (!(p > 0.0)) throw std::invalid_argument("abs_diff_pow: exponent must be > 0");
    f.eval = [p](double s, double t) { return std::pow(std::abs(s - t), p); };
    f.d1 = [p](double s, double t) {
      const double d = s - t;
      return d == 0.0 ? 0.0 : p * std::pow(std::abs(d), p - 1.0) * sign(d);
    };
    f.d2 = [d1 = f.d1](double s, double t) { return -d1(s, t); };
    f.nonnegative = true;
    f.truncation = TruncationConstants{1.0, 0.0, kDefaultLambdas};
    if (p == 2.0) f.kernel = PairKernel::squared_difference;
  } else if (id == "squared_diff") {
    expect_at_most(id, params, 0);
    f.eval = [](double s, double t) { return (s - t) * (s - t); };
    f.d1 = [](double s, double t) { return 2.0 * (s - t); };
    f.d2 = [](double s, double t) { return 2.0 * (t - s); };
    f.nonnegative = true;
    f.truncation = TruncationConstants{1.0, 0.0, kDefaultLambdas};
    f.kernel = PairKernel::squared_difference;
  } else if (id == "product") {
    expect_at_most(id, params, 0);
    f.eval = [](double s, double t) { return s * t; };
    f.d1 = [](double, double t) { return t; };
    f.d2 = [](double s, double) { return s; };
    f.kernel = PairKernel::product;
  } else if (id == "lorentz") {
    expect_at_most(id, params, 0);
    f.eval = [](double s, double t) { return 1.0 / (1.0 + (s - t) * (s - t)); };
    f.d1 = [](double s, double t) {
      const double d = s - t;
      const double q = 1.0 + d * d;
      return -2.0 * d / (q * q);
    };
    f.d2 = [d1 = f.d1](double s, double t) { return -d1(s, t); };
    f.nonnegative = true;
    f.bound = 1.0;
    f.truncation = TruncationConstants{0.0, 1.0, kDefaultLambdas};
    f.kernel = PairKernel::lorentz;
  } else if (id == "sq_product") {
    expect_at_most(id, params, 0);
    f.eval = [](double s, double t) { return s * s * t * t; };
    f.d1 = [](double s, double t) { return 2.0 * s * t * t; };
    f.d2 = [](double s, double t) { return 2.0 * s * s * t; };
    f.nonnegative = true;
    f.truncation = TruncationConstants{1.0, 0.0, kDefaultLambdas};
  } else if (id == "constant") {
    expect_at_most(id, params, 1);
    const double c = param(id, params, 0, 1.0);
    f.eval = [c](double, double) { return c; };
    f.d1 = [](double, double) { return 0.0; };
    f.d2 = f.d1;
    f.nonnegative = c >= 0.0;
    f.bound = std::abs(c);
    if (c >= 0.0) f.truncation = TruncationConstants{0.0, c, kDefaultLambdas};
  } else if (id == "zero") {
    expect_at_most(id, params, 0);
    f.eval = [](double, double) { return 0.0; };
    f.d1 = [](double, double) { return 0.0; };
    f.d2 = f.d1;
    f.nonnegative = true;
    f.bound = 0.0;
    f.truncation = TruncationConstants{0.0, 0.0, kDefaultLambdas};
  } else {
    throw std::invalid_argument("unknown pair integrand id '" + std::string(id) + "'");
  }
  return f;
}

std::vector<std::string> pair_integrand_ids() {
  return {"abs_diff_pow", "constant", "lorentz", "product", "sq_product", "squared_diff", "zero"};
}

double two_phase_coefficient(double x, double alpha, double beta, int k) noexcept {
  const double y = k * x;
  const double frac = y - std::floor(y);
  return frac < 0.5 ? alpha : beta;
}

LocalIntegrand make_local_integrand(std::string_view id, std::span<const double> params) {
  LocalIntegrand g;
  g.id = std::string(id);
  const double p = param(id, params, 0, 2.0);
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument(std::string(id) + ": exponent must satisfy 1 < p < inf");
  g.p = p;
  // Coefficient field alpha(x); g = alpha(x)|xi|^p for every built-in family.
  std::function<double(const Point&)> alpha;
  if (id == "abs_pow") {
    expect_at_most(id, params, 1);
    alpha = [](const Point&) { return 1.0; };
    g.c0 = g.c1 = 1.0;
  } else if (id == "scaled_abs_pow") {
    expect_at_most(id, params, 2);
    const double c = param(id, params, 1, 1.0);
    if (!(c > 0.0)) throw std::invalid_argument("scaled_abs_pow: c must be > 0");
    alpha = [c](const Point&) { return c; };
    g.c0 = g.c1 = c;
  } else if (id == "weighted_abs_pow") {
    expect_at_most(id, params, 3);
    const double lo = param(id, params, 1, 1.0);
    const double hi = param(id, params, 2, 1.0);
    if (!(lo > 0.0) || !(hi > 0.0))
      throw std::invalid_argument("weighted_abs_pow: coefficients must be > 0");
    alpha = [lo, hi](const Point& x) { return lo + (hi - lo) * x[0]; };
    g.c0 = std::min(lo, hi);
    g.c1 = std::max(lo, hi);
  } else if (id == "two_phase") {
    expect_at_most(id, params, 4);
    const double a = param(id, params, 1, 1.0);
    const double b = param(id, params, 2, 1.0);
    const double kk = param(id, params, 3, 1.0);
    if (!(a > 0.0) || !(b > 0.0))
      throw std::invalid_argument("two_phase: coefficients must be > 0");
    if (kk < 1.0 || kk != std::floor(kk))
      throw std::invalid_argument("two_phase: k must be a positive integer");
    const int k = static_cast<int>(kk);
    alpha = [a, b, k](const Point& x) { return two_phase_coefficient(x[0], a, b, k); };
    g.c0 = std::min(a, b);
    g.c1 = std::max(a, b);
  } else {
    throw std::invalid_argument("unknown local integrand id '" + std::string(id) + "'");
  }
  if (p == 2.0) {
    g.eval = [alpha](const Point& x, int, double xi) { return alpha(x) * xi * xi; };
    g.d_xi = [alpha](const Point& x, int, double xi) { return 2.0 * alpha(x) * xi; };
  } else {
    g.eval = [alpha, p](const Point& x, int, double xi) {
      return alpha(x) * std::pow(std::abs(xi), p);
    };
    g.d_xi = [alpha, p](const Point& x, int, double xi) {
      return xi == 0.0 ? 0.0 : alpha(x) * p * std::pow(std::abs(xi), p - 1.0) * sign(xi);
    };
  }
  return g;
}

std::vector<std::string> local_integrand_ids() {
  return {"abs_pow", "scaled_abs_pow", "two_phase", "weighted_abs_pow"};
}

}  // namespace nlab
