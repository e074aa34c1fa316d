#include "vinedep/math.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "vinedep/errors.hpp"

namespace vinedep::math {

double norm_pdf(double x) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("norm_quantile: p outside (0,1)");
  // Acklam's approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1.0 - plow;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= phigh) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley step against the exact CDF.
  double e = norm_cdf(x) - p;
  double u = e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

namespace {

// Genz (2004) bivariate normal upper-tail probability P(X > h, Y > k).
double bvn_upper(double h, double k, double r) {
  static const double w6[] = {0.1713244923791705, 0.3607615730481384,
                              0.4679139345726904};
  static const double x6[] = {0.9324695142031522, 0.6612093864662647,
                              0.2386191860831970};
  static const double w12[] = {0.04717533638651177, 0.1069393259953183,
                               0.1600783285433464,  0.2031674267230659,
                               0.2334925365383547,  0.2491470458134029};
  static const double x12[] = {0.9815606342467191, 0.9041172563704750,
                               0.7699026741943050, 0.5873179542866171,
                               0.3678314989981802, 0.1252334085114692};
  static const double w20[] = {0.01761400713915212, 0.04060142980038694,
                               0.06267204833410906, 0.08327674157670475,
                               0.1019301198172404,  0.1181945319615184,
                               0.1316886384491766,  0.1420961093183821,
                               0.1491729864726037,  0.1527533871307259};
  static const double x20[] = {0.9931285991850949,  0.9639719272779138,
                               0.9122344282513259,  0.8391169718222188,
                               0.7463319064601508,  0.6360536807265150,
                               0.5108670019508271,  0.3737060887154196,
                               0.2277858511416451,  0.07652652113349733};

  const double* wq;
  const double* xq;
  int lg;
  double ar = std::fabs(r);
  if (ar < 0.3) {
    wq = w6; xq = x6; lg = 3;
  } else if (ar < 0.75) {
    wq = w12; xq = x12; lg = 6;
  } else {
    wq = w20; xq = x20; lg = 10;
  }

  double hk = h * k;
  double bvn = 0.0;
  if (ar < 0.925) {
    if (ar > 0.0) {
      double hs = 0.5 * (h * h + k * k);
      double asr = std::asin(r);
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          double sn = std::sin(0.5 * asr * (is * xq[i] + 1.0));
          bvn += wq[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
        }
      }
      bvn *= asr / (4.0 * pi);
    }
    bvn += norm_cdf(-h) * norm_cdf(-k);
  } else {
    if (r < 0.0) {
      k = -k;
      hk = -hk;
    }
    if (ar < 1.0) {
      double as = (1.0 - r) * (1.0 + r);
      double a = std::sqrt(as);
      double bs = (h - k) * (h - k);
      double c = (4.0 - hk) / 8.0;
      double d = (12.0 - hk) / 16.0;
      double asr = -0.5 * (bs / as + hk);
      if (asr > -100.0) {
        bvn = a * std::exp(asr) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 +
               c * d * as * as / 5.0);
      }
      if (-hk < 100.0) {
        double b = std::sqrt(bs);
        double sp = std::sqrt(2.0 * pi) * norm_cdf(-b / a);
        bvn -= std::exp(-0.5 * hk) * sp * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
      }
      a *= 0.5;
      for (int i = 0; i < lg; ++i) {
        for (int is = -1; is <= 1; is += 2) {
          double xs = a * (is * xq[i] + 1.0);
          xs *= xs;
          double rs = std::sqrt(1.0 - xs);
          double asr2 = -0.5 * (bs / xs + hk);
          if (asr2 > -100.0) {
            double sp = 1.0 + c * xs * (1.0 + d * xs);
            double ep = std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs;
            bvn += a * wq[i] * std::exp(asr2) * (ep - sp);
          }
        }
      }
      bvn = -bvn / (2.0 * pi);
    }
    if (r > 0.0) {
      bvn += norm_cdf(-std::max(h, k));
    } else {
      bvn = -bvn;
      if (k > h) bvn += norm_cdf(k) - norm_cdf(h);
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

}  // namespace

double bvn_cdf(double x, double y, double rho) {
  if (!(std::fabs(rho) <= 1.0)) throw NumericError("bvn_cdf: |rho| > 1");
  rho = std::clamp(rho, -1.0 + 1e-15, 1.0 - 1e-15);
  return bvn_upper(-x, -y, rho);
}

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
  const double fpmin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) return h;
  }
  throw NumericError("inc_beta: continued fraction did not converge");
}

}  // namespace

double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
               a * std::log(x) + b * std::log1p(-x);
  double bt = std::exp(lbt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double t_logpdf(double x, double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * pi) - 0.5 * (nu + 1.0) * std::log1p(x * x / nu);
}

double t_pdf(double x, double nu) { return std::exp(t_logpdf(x, nu)); }

double t_cdf(double x, double nu) {
  if (x == 0.0) return 0.5;
  double p = 0.5 * inc_beta(0.5 * nu, 0.5, nu / (nu + x * x));
  return x > 0.0 ? 1.0 - p : p;
}

double t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("t_quantile: p outside (0,1)");
  if (p == 0.5) return 0.0;
  // Cornish-Fisher style start from the normal quantile.
  double z = norm_quantile(p);
  double g1 = (z * z * z + z) / 4.0;
  double g2 = (5.0 * std::pow(z, 5) + 16.0 * z * z * z + 3.0 * z) / 96.0;
  double x = z + g1 / nu + g2 / (nu * nu);
  // Expand a bracket around the start, then safeguarded Newton.
  double lo = x - 1.0, hi = x + 1.0;
  double step = 1.0;
  while (t_cdf(lo, nu) > p) {
    lo -= step;
    step *= 2.0;
    if (lo < -1e300) break;
  }
  step = 1.0;
  while (t_cdf(hi, nu) < p) {
    hi += step;
    step *= 2.0;
    if (hi > 1e300) break;
  }
  for (int it = 0; it < 100; ++it) {
    double f = t_cdf(x, nu) - p;
    if (f > 0.0) hi = x; else lo = x;
    double dfdx = t_pdf(x, nu);
    double xn = (dfdx > 0.0) ? x - f / dfdx : x;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 1e-14 * (1.0 + std::fabs(xn))) return xn;
    x = xn;
  }
  return x;
}

double debye1(double x) {
  if (x <= 0.0) throw NumericError("debye1: requires x > 0");
  if (x < 1e-6) return 1.0 - 0.25 * x + x * x / 36.0;
  const QuadRule& q = gauss_legendre_01(64);
  double s = 0.0;
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    double t = x * q.nodes[i];
    double f = (t < 1e-8) ? 1.0 - 0.5 * t : t / std::expm1(t);
    s += q.weights[i] * f;
  }
  return s;  // (1/x) * integral = sum of weights*f over [0,1] scaling
}

const QuadRule& gauss_legendre_01(int n) {
  static std::map<int, QuadRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  // Newton iteration on Legendre polynomials, mapped to [0, 1].
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  int m = (n + 1) / 2;
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(pi * (i - 0.25) / (n + 0.5));
    double z1, pp;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::fabs(z - z1) > 3e-15);
    double p1 = 1.0, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      double p3 = p2;
      p2 = p1;
      p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
    }
    pp = n * (z * p1 - p2) / (z * z - 1.0);
    rule.nodes[i - 1] = 0.5 * (1.0 - z);
    rule.nodes[n - i] = 0.5 * (1.0 + z);
    double w = 1.0 / ((1.0 - z * z) * pp * pp);  // weight on [0,1]
    rule.weights[i - 1] = w;
    rule.weights[n - i] = w;
  }
  auto [pos, inserted] = cache.emplace(n, std::move(rule));
  return pos->second;
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, int max_level) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  const double tmax = 3.7;  // weights below ~1e-17 past this point
  auto eval = [&](double t) -> double {
    double s = std::sinh(t);
    double u = std::tanh(0.5 * pi * s);
    double x = mid + half * u;
    if (x <= a || x >= b) return 0.0;  // washed out by rounding
    double ch = std::cosh(0.5 * pi * s);
    double w = 0.5 * pi * std::cosh(t) / (ch * ch);
    double fx = f(x);
    return std::isfinite(fx) ? fx * w : 0.0;
  };

  double h = 1.0;
  double sum = eval(0.0);
  for (int k = 1; k * h <= tmax; ++k) sum += eval(k * h) + eval(-k * h);
  double integral = half * h * sum;

  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    double add = 0.0;
    for (int k = 1; k * h <= tmax; k += 2) add += eval(k * h) + eval(-k * h);
    sum += add;
    double next = half * h * sum;
    if (level >= 3 && std::fabs(next - integral) <= rel_tol * (1.0 + std::fabs(next))) {
      return next;
    }
    integral = next;
  }
  return integral;
}

std::pair<double, double> brent_minimize(const std::function<double(double)>& f,
                                         double a, double b, double tol,
                                         int max_iter) {
  const double gold = 0.3819660112501051;
  double x = a + gold * (b - a), w = x, v = x;
  double fx = f(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    double xm = 0.5 * (a + b);
    double tol1 = tol * std::fabs(x) + 1e-12;
    double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    bool parabola_ok = false;
    if (std::fabs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      double etemp = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * etemp) && p > q * (a - x) &&
          p < q * (b - x)) {
        parabola_ok = true;
        d = p / q;
        double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (xm - x >= 0 ? tol1 : -tol1);
      }
    }
    if (!parabola_ok) {
      e = (x >= xm) ? a - x : b - x;
      d = gold * e;
    }
    double u = (std::fabs(d) >= tol1) ? x + d : x + (d >= 0 ? tol1 : -tol1);
    double fu = f(u);
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; w = x; x = u;
      fv = fw; fw = fx; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; w = u; fv = fw; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, fx};
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double tol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw NumericError("brent_root: interval does not bracket a root");
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    double tol1 = 2.0 * 2.22e-16 * std::fabs(b) + 0.5 * tol;
    double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
      double min2 = std::fabs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol1) ? d : (xm >= 0 ? tol1 : -tol1);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

}  // namespace vinedep::math
