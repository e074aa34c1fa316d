#include "vinedep/bicop.hpp"

#include <algorithm>
#include <cmath>

#include "vinedep/errors.hpp"
#include "vinedep/math.hpp"

// Family evaluation.  All interior formulas work in log space where the
// natural parameterizations overflow (Clayton/Gumbel at strong dependence).

namespace vinedep {

namespace m = vinedep::math;

namespace {

constexpr double kEdge = 1e-10;           // boundary snap threshold
constexpr double kClampLo = 1e-10;        // interior clamp
constexpr double kClampHi = 1.0 - 1e-10;
constexpr double kFrankIndep = 1e-5;      // |theta| below this acts as independence
constexpr double kClaytonIndep = 1e-5;

double clamp_interior(double u) { return std::clamp(u, kClampLo, kClampHi); }

void check_unit(double u, const char* what) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw NumericError(std::string(what) + ": argument outside [0,1]");
  }
}

// log(e^a + e^b - 1) for a, b >= 0 without overflow.
double log_expsum_m1(double a, double b) {
  double mx = std::max(a, b), mn = std::min(a, b);
  // e^mx + e^mn - 1 = e^mx * (1 + e^(mn-mx) * (1 - e^-mn))
  return mx + std::log1p(std::exp(mn - mx) * (-std::expm1(-mn)));
}

// ---------------------------------------------------------------- gaussian

double gauss_cdf0(double rho, double u, double v) {
  return m::bvn_cdf(m::norm_quantile(u), m::norm_quantile(v), rho);
}

double gauss_logpdf0(double rho, double u, double v) {
  double x = m::norm_quantile(u), y = m::norm_quantile(v);
  double r2 = rho * rho, om = 1.0 - r2;
  return -0.5 * std::log(om) - (r2 * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * om);
}

double gauss_h0(double rho, double t, double g) {
  double x = m::norm_quantile(t), y = m::norm_quantile(g);
  return m::norm_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

double gauss_hinv0(double rho, double w, double g) {
  double z = m::norm_quantile(w), y = m::norm_quantile(g);
  return m::norm_cdf(z * std::sqrt(1.0 - rho * rho) + rho * y);
}

// ---------------------------------------------------------------- student t

double t_cdf_biv(double x, double y, double rho, double nu) {
  // Integrate the conditional CDF over the second margin with the
  // substitution y' = sqrt(nu) tan(phi); the integrand is then smooth on a
  // compact interval and tanh-sinh handles the cos^(nu-1) endpoints.
  double lc = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
              0.5 * std::log(nu * m::pi);
  double cnu = std::exp(lc) * std::sqrt(nu);
  double scale = std::sqrt((nu + 1.0) / (nu * (1.0 - rho * rho)));
  double phi_hi = std::atan(y / std::sqrt(nu));
  auto f = [&](double phi) {
    double cs = std::cos(phi);
    double yp = std::sqrt(nu) * std::tan(phi);
    double arg = (x - rho * yp) * scale * cs;
    return cnu * std::pow(cs, nu - 1.0) * m::t_cdf(arg, nu + 1.0);
  };
  double val = m::tanh_sinh(f, -0.5 * m::pi, phi_hi, 1e-14, 7);
  return std::clamp(val, 0.0, 1.0);
}

double stut_cdf0(double rho, double nu, double u, double v) {
  return t_cdf_biv(m::t_quantile(u, nu), m::t_quantile(v, nu), rho, nu);
}

double stut_logpdf0(double rho, double nu, double u, double v) {
  double x = m::t_quantile(u, nu), y = m::t_quantile(v, nu);
  double om = 1.0 - rho * rho;
  double q = (x * x - 2.0 * rho * x * y + y * y) / (nu * om);
  return std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
         2.0 * std::lgamma(0.5 * (nu + 1.0)) - 0.5 * std::log(om) -
         0.5 * (nu + 2.0) * std::log1p(q) +
         0.5 * (nu + 1.0) * (std::log1p(x * x / nu) + std::log1p(y * y / nu));
}

double stut_h0(double rho, double nu, double t, double g) {
  double x = m::t_quantile(t, nu), y = m::t_quantile(g, nu);
  double den = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
  return m::t_cdf((x - rho * y) / den, nu + 1.0);
}

double stut_hinv0(double rho, double nu, double w, double g) {
  double y = m::t_quantile(g, nu);
  double den = std::sqrt((nu + y * y) * (1.0 - rho * rho) / (nu + 1.0));
  double x = m::t_quantile(w, nu + 1.0) * den + rho * y;
  return m::t_cdf(x, nu);
}

// ---------------------------------------------------------------- clayton

double clay_cdf0(double th, double u, double v) {
  if (th < kClaytonIndep) return u * v;
  double a = -th * std::log(u), b = -th * std::log(v);
  return std::exp(-log_expsum_m1(a, b) / th);
}

double clay_logpdf0(double th, double u, double v) {
  if (th < kClaytonIndep) return 0.0;
  double lu = std::log(u), lv = std::log(v);
  double lse = log_expsum_m1(-th * lu, -th * lv);
  return std::log1p(th) - (1.0 + th) * (lu + lv) - (2.0 + 1.0 / th) * lse;
}

double clay_h0(double th, double t, double g) {
  if (th < kClaytonIndep) return t;
  double lt = std::log(t), lg = std::log(g);
  double lse = log_expsum_m1(-th * lt, -th * lg);
  return std::exp(-(th + 1.0) * lg - (1.0 + 1.0 / th) * lse);
}

double clay_hinv0(double th, double w, double g) {
  if (th < kClaytonIndep) return w;
  double b = -th * std::log(g);                  // log of g^-theta
  double t = b - th / (1.0 + th) * std::log(w);  // log of (w g^(1+theta))^(-theta/(1+theta))
  // u^-theta = e^t - e^b + 1 = e^t (1 - e^(b-t) + e^-t), with t >= b >= 0.
  double log_uth = t + std::log1p(-std::exp(b - t) + std::exp(-t));
  return std::exp(-log_uth / th);
}

// ---------------------------------------------------------------- frank

// The textbook expressions cancel catastrophically when theta(u+v) is large
// (offsets of order e^-theta carried by doubles near -1).  Rewriting
// m + a*b = e^(-th*u)*expm1(-th*v) + e^(-th*v)*expm1(-th*(1-v)) turns every
// denominator into a same-sign sum, exact in all regimes.
double frank_denom(double th, double u, double v) {
  return std::exp(-th * u) * std::expm1(-th * v) +
         std::exp(-th * v) * std::expm1(-th * (1.0 - v));
}

double frank_cdf0(double th, double u, double v) {
  if (std::fabs(th) < kFrankIndep) return u * v;
  // 1 + a*b/m = E/m with E the stable denominator.
  double e = frank_denom(th, u, v);
  double mm = std::expm1(-th);
  return -(std::log(std::fabs(e)) - std::log(std::fabs(mm))) / th;
}

double frank_logpdf0(double th, double u, double v) {
  if (std::fabs(th) < kFrankIndep) return 0.0;
  double e = frank_denom(th, u, v);
  double mm = std::expm1(-th);
  return std::log(std::fabs(th)) + std::log(std::fabs(mm)) - th * (u + v) -
         2.0 * std::log(std::fabs(e));
}

double frank_h0(double th, double t, double g) {
  if (std::fabs(th) < kFrankIndep) return t;
  return std::exp(-th * g) * std::expm1(-th * t) / frank_denom(th, t, g);
}

double frank_hinv0(double th, double w, double g) {
  if (std::fabs(th) < kFrankIndep) return w;
  // u = -(1/th) log[((1-w) e^(-th g) + w e^(-th)) / (w + (1-w) e^(-th g))];
  // both brackets are positive sums, so no digits are lost.
  double eg = std::exp(-th * g);
  double num = (1.0 - w) * eg + w * std::exp(-th);
  double den = w + (1.0 - w) * eg;
  return -(std::log(num) - std::log(den)) / th;
}

// ---------------------------------------------------------------- gumbel

struct GumbelParts {
  double lT;  // log T, T = (tx^th + ty^th)^(1/th)
  double T;
  double ltx, lty;  // log(-log u), log(-log v)
};

GumbelParts gumbel_parts(double th, double u, double v) {
  GumbelParts p;
  double tx = -std::log(u), ty = -std::log(v);
  p.ltx = std::log(tx);
  p.lty = std::log(ty);
  double la = th * p.ltx, lb = th * p.lty;
  double mx = std::max(la, lb);
  double ls = mx + std::log1p(std::exp(std::min(la, lb) - mx));
  p.lT = ls / th;
  p.T = std::exp(p.lT);
  return p;
}

double gum_cdf0(double th, double u, double v) {
  return std::exp(-gumbel_parts(th, u, v).T);
}

double gum_logpdf0(double th, double u, double v) {
  GumbelParts p = gumbel_parts(th, u, v);
  return -p.T + (th - 1.0) * (p.ltx + p.lty) + (1.0 - 2.0 * th) * p.lT +
         std::log(p.T + th - 1.0) - std::log(u) - std::log(v);
}

double gum_h0(double th, double t, double g) {
  GumbelParts p = gumbel_parts(th, t, g);
  return std::exp(-p.T + (1.0 - th) * p.lT + (th - 1.0) * p.lty - std::log(g));
}

// Monotone in t; safeguarded Newton with the density as derivative.
double gum_hinv0(double th, double w, double g) {
  double lo = kClampLo, hi = kClampHi;
  double flo = gum_h0(th, lo, g), fhi = gum_h0(th, hi, g);
  if (w <= flo) return lo;
  if (w >= fhi) return hi;
  double t = std::clamp(w, lo, hi);
  for (int it = 0; it < 200; ++it) {
    double f = gum_h0(th, t, g) - w;
    if (std::fabs(f) < 1e-12) return t;
    if (f > 0.0) hi = t; else lo = t;
    double deriv = std::exp(gum_logpdf0(th, t, g));
    double tn = (deriv > 1e-300 && std::isfinite(deriv)) ? t - f / deriv : t;
    if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
    if (std::fabs(tn - t) < 1e-16 * (1.0 + std::fabs(t))) return tn;
    t = tn;
  }
  throw NumericError("gumbel hinv did not converge (w=" + std::to_string(w) +
                     ", given=" + std::to_string(g) + ")");
}

// Newton polish for closed-form h-inverses; the analytic expressions lose
// several digits at strong dependence, and the h/pdf pair restores them.
template <typename HFn, typename LogPdfFn>
double polish_hinv(HFn h, LogPdfFn logpdf, double t0, double w) {
  double t = std::clamp(t0, kClampLo, kClampHi);
  double best = t;
  double best_err = std::fabs(h(t) - w);
  for (int it = 0; it < 5 && best_err > 1e-13; ++it) {
    double f = h(t) - w;
    double d = std::exp(logpdf(t));
    if (!(d > 1e-300) || !std::isfinite(d)) break;
    double tn = std::clamp(t - f / d, kClampLo, kClampHi);
    if (tn == t) break;
    t = tn;
    double err = std::fabs(h(t) - w);
    if (err < best_err) {
      best_err = err;
      best = t;
    } else {
      break;
    }
  }
  return best;
}

// ------------------------------------------------------- dispatch helpers

void check_params(const Family& f, const std::vector<double>& params) {
  if (static_cast<int>(params.size()) != f.param_count()) {
    throw NumericError("family " + f.display() + ": expected " +
                       std::to_string(f.param_count()) + " parameters");
  }
  for (int i = 0; i < f.param_count(); ++i) {
    auto [lo, hi] = f.param_domain(i);
    if (!(params[i] >= lo && params[i] <= hi)) {
      throw NumericError("family " + f.display() + ": parameter " +
                         std::to_string(i) + " outside domain");
    }
  }
}

double cdf0(FamilyTag tag, const std::vector<double>& p, double u, double v) {
  switch (tag) {
    case FamilyTag::independence: return u * v;
    case FamilyTag::gaussian: return gauss_cdf0(p[0], u, v);
    case FamilyTag::student_t: return stut_cdf0(p[0], p[1], u, v);
    case FamilyTag::clayton: return clay_cdf0(p[0], u, v);
    case FamilyTag::frank: return frank_cdf0(p[0], u, v);
    case FamilyTag::gumbel: return gum_cdf0(p[0], u, v);
  }
  throw NumericError("unknown family");
}

double logpdf0(FamilyTag tag, const std::vector<double>& p, double u, double v) {
  switch (tag) {
    case FamilyTag::independence: return 0.0;
    case FamilyTag::gaussian: return gauss_logpdf0(p[0], u, v);
    case FamilyTag::student_t: return stut_logpdf0(p[0], p[1], u, v);
    case FamilyTag::clayton: return clay_logpdf0(p[0], u, v);
    case FamilyTag::frank: return frank_logpdf0(p[0], u, v);
    case FamilyTag::gumbel: return gum_logpdf0(p[0], u, v);
  }
  throw NumericError("unknown family");
}

double h0(FamilyTag tag, const std::vector<double>& p, double t, double g) {
  switch (tag) {
    case FamilyTag::independence: return t;
    case FamilyTag::gaussian: return gauss_h0(p[0], t, g);
    case FamilyTag::student_t: return stut_h0(p[0], p[1], t, g);
    case FamilyTag::clayton: return clay_h0(p[0], t, g);
    case FamilyTag::frank: return frank_h0(p[0], t, g);
    case FamilyTag::gumbel: return gum_h0(p[0], t, g);
  }
  throw NumericError("unknown family");
}

double hinv0(FamilyTag tag, const std::vector<double>& p, double w, double g) {
  switch (tag) {
    case FamilyTag::independence: return w;
    case FamilyTag::gaussian: return gauss_hinv0(p[0], w, g);
    case FamilyTag::student_t: return stut_hinv0(p[0], p[1], w, g);
    case FamilyTag::clayton:
      return polish_hinv([&](double t) { return clay_h0(p[0], t, g); },
                         [&](double t) { return clay_logpdf0(p[0], t, g); },
                         clay_hinv0(p[0], w, g), w);
    case FamilyTag::frank:
      return polish_hinv([&](double t) { return frank_h0(p[0], t, g); },
                         [&](double t) { return frank_logpdf0(p[0], t, g); },
                         frank_hinv0(p[0], w, g), w);
    case FamilyTag::gumbel: return gum_hinv0(p[0], w, g);
  }
  throw NumericError("unknown family");
}

}  // namespace

std::string family_name(FamilyTag t) {
  switch (t) {
    case FamilyTag::independence: return "independence";
    case FamilyTag::gaussian: return "gaussian";
    case FamilyTag::student_t: return "student_t";
    case FamilyTag::clayton: return "clayton";
    case FamilyTag::frank: return "frank";
    case FamilyTag::gumbel: return "gumbel";
  }
  return "independence";
}

FamilyTag family_from_string(const std::string& s) {
  if (s == "independence" || s == "indep") return FamilyTag::independence;
  if (s == "gaussian" || s == "normal") return FamilyTag::gaussian;
  if (s == "student_t" || s == "student-t" || s == "t") return FamilyTag::student_t;
  if (s == "clayton") return FamilyTag::clayton;
  if (s == "frank") return FamilyTag::frank;
  if (s == "gumbel") return FamilyTag::gumbel;
  throw DataError("unknown copula family: " + s);
}

int Family::param_count() const {
  switch (tag) {
    case FamilyTag::independence: return 0;
    case FamilyTag::student_t: return 2;
    default: return 1;
  }
}

std::pair<double, double> Family::param_domain(int i) const {
  switch (tag) {
    case FamilyTag::gaussian: return {-1.0 + 1e-12, 1.0 - 1e-12};
    case FamilyTag::student_t:
      return i == 0 ? std::pair<double, double>{-1.0 + 1e-12, 1.0 - 1e-12}
                    : std::pair<double, double>{2.0, 50.0};
    case FamilyTag::clayton: return {1e-10, 28.0};
    case FamilyTag::frank: return {-35.0, 35.0};
    case FamilyTag::gumbel: return {1.0, 17.0};
    default: return {0.0, 0.0};
  }
}

bool Family::reflectable() const {
  return tag == FamilyTag::clayton || tag == FamilyTag::gumbel;
}

std::string Family::display() const {
  std::string s = family_name(tag);
  if (rotation == Rotation::reflected) s += "@180";
  return s;
}

std::string to_string(Criterion c) { return c == Criterion::aic ? "aic" : "bic"; }

Criterion criterion_from_string(const std::string& s) {
  if (s == "aic" || s == "AIC") return Criterion::aic;
  if (s == "bic" || s == "BIC") return Criterion::bic;
  throw DataError("unknown criterion: " + s);
}

double bicop_cdf(const Family& f, const std::vector<double>& params, double u, double v) {
  check_params(f, params);
  check_unit(u, "cdf");
  check_unit(v, "cdf");
  if (u <= kEdge || v <= kEdge) return 0.0;
  bool u1 = u >= 1.0 - kEdge, v1 = v >= 1.0 - kEdge;
  if (u1 && v1) return 1.0;
  if (v1) return u;
  if (u1) return v;
  u = clamp_interior(u);
  v = clamp_interior(v);
  if (f.rotation == Rotation::reflected) {
    return v - cdf0(f.tag, params, 1.0 - u, v);
  }
  return cdf0(f.tag, params, u, v);
}

double bicop_logpdf(const Family& f, const std::vector<double>& params, double u, double v) {
  check_params(f, params);
  check_unit(u, "pdf");
  check_unit(v, "pdf");
  u = clamp_interior(u);
  v = clamp_interior(v);
  if (f.rotation == Rotation::reflected) return logpdf0(f.tag, params, 1.0 - u, v);
  return logpdf0(f.tag, params, u, v);
}

double bicop_pdf(const Family& f, const std::vector<double>& params, double u, double v) {
  return std::exp(bicop_logpdf(f, params, u, v));
}

double bicop_hfunc(const Family& f, const std::vector<double>& params, double target,
                   double given, CondVar cond) {
  check_params(f, params);
  check_unit(target, "hfunc");
  check_unit(given, "hfunc");
  if (target <= kEdge) return 0.0;
  if (target >= 1.0 - kEdge) return 1.0;
  target = clamp_interior(target);
  given = clamp_interior(given);
  if (f.rotation == Rotation::reflected) {
    // Base families are exchangeable; the reflection is not.
    if (cond == CondVar::second) return 1.0 - h0(f.tag, params, 1.0 - target, given);
    return h0(f.tag, params, target, 1.0 - given);
  }
  return h0(f.tag, params, target, given);
}

double bicop_hinv(const Family& f, const std::vector<double>& params, double w,
                  double given, CondVar cond) {
  check_params(f, params);
  check_unit(w, "hinv");
  check_unit(given, "hinv");
  w = clamp_interior(w);
  given = clamp_interior(given);
  if (f.rotation == Rotation::reflected) {
    if (cond == CondVar::second) return 1.0 - hinv0(f.tag, params, 1.0 - w, given);
    return hinv0(f.tag, params, w, 1.0 - given);
  }
  return hinv0(f.tag, params, w, given);
}

double bicop_cdf(const BicopSpec& s, double u, double v) {
  return bicop_cdf(s.family, s.params, u, v);
}
double bicop_pdf(const BicopSpec& s, double u, double v) {
  return bicop_pdf(s.family, s.params, u, v);
}
double bicop_hfunc(const BicopSpec& s, double target, double given, CondVar cond) {
  return bicop_hfunc(s.family, s.params, target, given, cond);
}
double bicop_hinv(const BicopSpec& s, double w, double given, CondVar cond) {
  return bicop_hinv(s.family, s.params, w, given, cond);
}

double discrete_prob(const BicopSpec& spec, double u1, double u1_left, double u2,
                     double u2_left) {
  if (u1_left > u1 || u2_left > u2) {
    throw DataError("discrete_prob: left limit exceeds value");
  }
  double p = bicop_cdf(spec, u1, u2) - bicop_cdf(spec, u1_left, u2) -
             bicop_cdf(spec, u1, u2_left) + bicop_cdf(spec, u1_left, u2_left);
  return std::max(p, 0.0);
}

namespace {

double frank_tau_positive(double th) {
  return 1.0 - 4.0 / th * (1.0 - m::debye1(th));
}

}  // namespace

double param_to_tau(const Family& f, const std::vector<double>& params) {
  check_params(f, params);
  double tau = 0.0;
  switch (f.tag) {
    case FamilyTag::independence: tau = 0.0; break;
    case FamilyTag::gaussian:
    case FamilyTag::student_t:
      tau = 2.0 / m::pi * std::asin(params[0]);
      break;
    case FamilyTag::clayton: tau = params[0] / (params[0] + 2.0); break;
    case FamilyTag::gumbel: tau = 1.0 - 1.0 / params[0]; break;
    case FamilyTag::frank: {
      double th = params[0];
      if (std::fabs(th) < kFrankIndep) tau = 0.0;
      else if (th > 0.0) tau = frank_tau_positive(th);
      else tau = -frank_tau_positive(-th);
      break;
    }
  }
  return f.rotation == Rotation::reflected ? -tau : tau;
}

std::vector<double> tau_to_param(const Family& f, double tau) {
  if (f.rotation == Rotation::reflected) {
    Family base{f.tag, Rotation::none};
    return tau_to_param(base, -tau);
  }
  switch (f.tag) {
    case FamilyTag::independence:
      return {};
    case FamilyTag::gaussian:
      if (!(std::fabs(tau) < 1.0)) throw NumericError("gaussian: |tau| must be < 1");
      return {std::sin(0.5 * m::pi * tau)};
    case FamilyTag::student_t:
      if (!(std::fabs(tau) < 1.0)) throw NumericError("student_t: |tau| must be < 1");
      return {std::sin(0.5 * m::pi * tau), 5.0};
    case FamilyTag::clayton: {
      double th = 2.0 * tau / (1.0 - tau);
      if (!(tau > 0.0) || th > 28.0) {
        throw NumericError("clayton: tau outside attainable range (0, 14/15]");
      }
      return {th};
    }
    case FamilyTag::gumbel: {
      if (tau < 0.0 || tau > 1.0 - 1.0 / 17.0) {
        throw NumericError("gumbel: tau outside attainable range [0, 16/17]");
      }
      return {1.0 / (1.0 - tau)};
    }
    case FamilyTag::frank: {
      if (std::fabs(tau) < 1.2e-5) return {tau >= 0.0 ? 1e-4 : -1e-4};
      double tmax = frank_tau_positive(35.0);
      if (std::fabs(tau) > tmax) {
        throw NumericError("frank: tau outside attainable range");
      }
      double a = std::fabs(tau);
      double th = m::brent_root(
          [&](double x) { return frank_tau_positive(x) - a; }, 1e-4, 35.0, 1e-12);
      return {tau > 0.0 ? th : -th};
    }
  }
  throw NumericError("unknown family");
}

json BicopSpec::to_json() const {
  json j;
  j["family"] = family_name(family.tag);
  j["rotation"] = family.rotation == Rotation::reflected ? 180 : 0;
  j["params"] = params;
  j["loglik"] = loglik;
  j["aic"] = aic;
  j["bic"] = bic;
  j["tau"] = tau;
  j["n"] = n;
  j["converged"] = converged;
  return j;
}

BicopSpec BicopSpec::from_json(const json& j) {
  BicopSpec s;
  s.family.tag = family_from_string(j.at("family").get<std::string>());
  s.family.rotation =
      j.value("rotation", 0) == 180 ? Rotation::reflected : Rotation::none;
  s.params = j.at("params").get<std::vector<double>>();
  s.loglik = j.value("loglik", 0.0);
  s.aic = j.value("aic", 0.0);
  s.bic = j.value("bic", 0.0);
  s.tau = j.value("tau", 0.0);
  s.n = j.value("n", static_cast<size_t>(0));
  s.converged = j.value("converged", true);
  return s;
}

}  // namespace vinedep
