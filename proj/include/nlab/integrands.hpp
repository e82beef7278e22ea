#pragma once
// Integrands of the non-local term f(s,t) and the local term g(x, xi).

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nlab/grid.hpp"

namespace nlab {

// Raised when an integrand produces NaN/Inf; carries the offending arguments.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, double s, double t)
      : std::runtime_error(what), s_(s), t_(t) {}
  double s() const noexcept { return s_; }
  double t() const noexcept { return t_; }

 private:
  double s_;
  double t_;
};

// Integrands with a closed-form structure the quadrature loops can exploit.
enum class PairKernel { generic, product, squared_difference, lorentz };

// Constants (a, b, Lambda) of f(tau(s), tau(t)) <= a f(s,t) + b for lambda in Lambda.
struct TruncationConstants {
  double a = 1.0;
  double b = 0.0;
  std::vector<double> lambdas;
};

struct PairIntegrand {
  std::string id;
  std::function<double(double, double)> eval;
  // Optional partial derivatives; central differences are used when empty.
  std::function<double(double, double)> d1;
  std::function<double(double, double)> d2;
  bool nonnegative = false;
  std::optional<double> bound;
  std::optional<TruncationConstants> truncation;
  PairKernel kernel = PairKernel::generic;

  double operator()(double s, double t) const { return eval(s, t); }
  double partial1(double s, double t) const;
  double partial2(double s, double t) const;
};

inline constexpr double kFiniteDifferenceStep = 1e-6;

// Built-in families, addressed by id (bracketed parameters are optional; p
// defaults to 2 and coefficients to 1):
//   abs_diff_pow [p]  |s-t|^p          nonnegative, (a,b) = (1,0)
//   squared_diff      (s-t)^2          nonnegative, (a,b) = (1,0)
//   product           s t              signed; continuity tests only
//   lorentz           1/(1+(s-t)^2)    bounded by 1, (a,b) = (0,1)
//   sq_product        s^2 t^2          nonnegative, (a,b) = (1,0)
//   constant [c]      c
//   zero              0
PairIntegrand make_pair_integrand(std::string_view id, std::span<const double> params = {});
std::vector<std::string> pair_integrand_ids();

// g(x, xi) evaluated per axis-edge: the local energy is
// sum_e h^d g(x_e, axis_e, grad_e u). In 1D this is g(x, u'(x)).
struct LocalIntegrand {
  std::string id;
  std::function<double(const Point&, int, double)> eval;
  std::function<double(const Point&, int, double)> d_xi;  // optional
  double p = 2.0;
  double c0 = 1.0;
  double c1 = 1.0;
  std::function<double(const Point&)> a;  // additive growth term; empty means 0

  double operator()(const Point& x, int axis, double xi) const { return eval(x, axis, xi); }
  double derivative(const Point& x, int axis, double xi) const;
  double growth_offset(const Point& x) const { return a ? a(x) : 0.0; }
};

// Built-in families:
//   abs_pow [p]                         |xi|^p
//   scaled_abs_pow [p, c]               c |xi|^p
//   weighted_abs_pow [p, lo, hi]        alpha(x)|xi|^p, alpha = lo + (hi-lo) x_1
//   two_phase [p, alpha, beta, k]       a(k x_1)|xi|^p, a = alpha on the first half
//                                       of each period, beta on the second
LocalIntegrand make_local_integrand(std::string_view id, std::span<const double> params = {});
std::vector<std::string> local_integrand_ids();

// Two-phase periodic coefficient a(k x): alpha where frac(k x) < 1/2, else beta.
double two_phase_coefficient(double x, double alpha, double beta, int k) noexcept;

}  // namespace nlab
