#pragma once

#include <string>
#include <vector>

#include "vinedep/json_io.hpp"

// Bivariate copula families: CDF, density, h-functions and their inverses,
// Kendall tau <-> parameter maps, maximum-likelihood fitting and AIC/BIC
// family selection.  Clayton and Gumbel cover negative dependence through a
// reflected variant (first margin flipped), serialized as rotation 180.

namespace vinedep {

enum class FamilyTag { independence, gaussian, student_t, clayton, frank, gumbel };
enum class Rotation { none, reflected };

std::string family_name(FamilyTag t);
FamilyTag family_from_string(const std::string& s);

struct Family {
  FamilyTag tag = FamilyTag::independence;
  Rotation rotation = Rotation::none;

  int param_count() const;
  // Admissible closed interval for parameter i.
  std::pair<double, double> param_domain(int i) const;
  bool reflectable() const;  // Clayton/Gumbel only reach tau > 0 unreflected
  std::string display() const;  // e.g. "clayton@180"
};

struct BicopSpec {
  Family family;
  std::vector<double> params;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double tau = 0.0;  // sample tau-b of the data the edge was fitted on
  size_t n = 0;
  bool converged = true;

  json to_json() const;
  static BicopSpec from_json(const json& j);
};

enum class CondVar { first, second };
enum class Criterion { aic, bic };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

// Evaluation.  Arguments may touch [0,1]; boundary values use the exact
// copula limits, interior values are clamped to [1e-10, 1-1e-10].
double bicop_cdf(const Family& f, const std::vector<double>& params, double u, double v);
double bicop_pdf(const Family& f, const std::vector<double>& params, double u, double v);
double bicop_logpdf(const Family& f, const std::vector<double>& params, double u, double v);

// hfunc(f, p, target, given, cond): conditional CDF of the remaining
// variable evaluated at `target`, conditioning on the variable in slot
// `cond` having value `given`.  cond == second means h(u|v) = dC/dv.
double bicop_hfunc(const Family& f, const std::vector<double>& params, double target,
                   double given, CondVar cond);

// Inverse of bicop_hfunc in its first argument: returns t with
// hfunc(t, given, cond) = w.
double bicop_hinv(const Family& f, const std::vector<double>& params, double w,
                  double given, CondVar cond);

// Four-corner rectangle probability
// C(u1,u2) - C(u1l,u2) - C(u1,u2l) + C(u1l,u2l), clamped at 0.
double discrete_prob(const BicopSpec& spec, double u1, double u1_left, double u2,
                     double u2_left);

double param_to_tau(const Family& f, const std::vector<double>& params);
std::vector<double> tau_to_param(const Family& f, double tau);

// Convenience overloads on a fitted spec.
double bicop_cdf(const BicopSpec& s, double u, double v);
double bicop_pdf(const BicopSpec& s, double u, double v);
double bicop_hfunc(const BicopSpec& s, double target, double given, CondVar cond);
double bicop_hinv(const BicopSpec& s, double w, double given, CondVar cond);

// Maximum-likelihood fit of one family: tau-inversion start, bounded 1-D
// (or profiled 2-D for Student t) refinement.  Requires n >= 30.
BicopSpec fit_bicop(const Family& f, const std::vector<double>& u,
                    const std::vector<double>& v);

// Fit every candidate (Clayton/Gumbel in both rotations) and keep the
// criterion minimizer.  Independence joins the pool when |tau| < 0.02.
BicopSpec select_family(const std::vector<double>& u, const std::vector<double>& v,
                        const std::vector<FamilyTag>& candidates, Criterion criterion);

// Candidate sets: default matches the four families used for selection;
// extended adds Gumbel.
std::vector<FamilyTag> default_families();
std::vector<FamilyTag> extended_families();
std::vector<FamilyTag> families_from_string(const std::string& csv);

}  // namespace vinedep
