#pragma once

#include <functional>
#include <utility>
#include <vector>

// Scalar special functions and small numeric utilities used across the
// copula code.  Everything here is deterministic and thread-safe.

namespace vinedep::math {

inline constexpr double pi = 3.14159265358979323846;

// Standard normal density / distribution / quantile.
double norm_pdf(double x);
double norm_cdf(double x);
// Acklam's rational approximation refined with one Halley step; accurate to
// ~1e-15 for p in (1e-300, 1-1e-16).
double norm_quantile(double p);

// Bivariate standard normal CDF P(X <= x, Y <= y) with correlation rho.
// Genz (2004) hybrid quadrature, absolute error below 5e-16.
double bvn_cdf(double x, double y, double rho);

// Regularized incomplete beta function I_x(a, b).
double inc_beta(double a, double b, double x);

// Student t distribution with real dof nu > 0.
double t_pdf(double x, double nu);
double t_logpdf(double x, double nu);
double t_cdf(double x, double nu);
double t_quantile(double p, double nu);

// First Debye function D1(x) = (1/x) * integral_0^x t/(e^t - 1) dt, x > 0.
double debye1(double x);

// Gauss-Legendre nodes/weights on [0, 1].  Cached per n.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const QuadRule& gauss_legendre_01(int n);

// Tanh-sinh (double exponential) quadrature over (a, b).  Handles mild
// endpoint singularities; refines until |delta| <= rel_tol*(1+|I|) or the
// level cap is hit.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, int max_level = 7);

// Brent local minimizer on [a, b].  Returns (argmin, min value).
std::pair<double, double> brent_minimize(const std::function<double(double)>& f,
                                         double a, double b, double tol = 1e-10,
                                         int max_iter = 200);

// Brent root finder on a bracketing interval [a, b] with f(a)*f(b) <= 0.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-13, int max_iter = 200);

}  // namespace vinedep::math
