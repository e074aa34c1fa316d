#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vinedep/bicop.hpp"
#include "vinedep/dependence.hpp"
#include "vinedep/errors.hpp"
#include "vinedep/math.hpp"
#include "vinedep/parallel.hpp"

// Maximum-likelihood fitting.  Parameters start at the tau-inversion value
// and are refined by bounded Brent search; Student t profiles nu over a
// fixed grid before a local refinement.

namespace vinedep {

namespace m = vinedep::math;

namespace {

constexpr double kBad = 1e100;  // negll for non-finite evaluations
const std::vector<double> kNuGrid = {2.0, 2.5, 3.0, 4.0, 5.0,  7.0,
                                     10.0, 15.0, 20.0, 30.0, 50.0};

std::vector<double> clamp_unit(const std::vector<double>& x) {
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = std::clamp(x[i], 1e-10, 1.0 - 1e-10);
  return out;
}

double finite_or_bad(double negll) {
  return std::isfinite(negll) ? negll : kBad;
}

// ----------------------------------------------------------- gaussian MLE

struct GaussObjective {
  double sxx = 0, syy = 0, sxy = 0;
  size_t n = 0;

  GaussObjective(const std::vector<double>& u, const std::vector<double>& v) {
    n = u.size();
    for (size_t i = 0; i < n; ++i) {
      double x = m::norm_quantile(u[i]), y = m::norm_quantile(v[i]);
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
    }
  }
  double operator()(double rho) const {
    double r2 = rho * rho, om = 1.0 - r2;
    double nll = 0.5 * n * std::log(om) +
                 (r2 * (sxx + syy) - 2.0 * rho * sxy) / (2.0 * om);
    return finite_or_bad(nll);
  }
};

// ----------------------------------------------------------- student t MLE

struct StudentObjective {
  // Quantile-transformed data for one fixed nu.
  std::vector<double> x, y;
  double nu;
  double rho_free;  // terms independent of rho

  StudentObjective(const std::vector<double>& u, const std::vector<double>& v,
                   double nu_in)
      : nu(nu_in) {
    size_t n = u.size();
    x.resize(n);
    y.resize(n);
    double lc = std::lgamma(0.5 * (nu + 2.0)) + std::lgamma(0.5 * nu) -
                2.0 * std::lgamma(0.5 * (nu + 1.0));
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
      x[i] = m::t_quantile(u[i], nu);
      y[i] = m::t_quantile(v[i], nu);
      s += std::log1p(x[i] * x[i] / nu) + std::log1p(y[i] * y[i] / nu);
    }
    rho_free = static_cast<double>(n) * lc + 0.5 * (nu + 1.0) * s;
  }
  double operator()(double rho) const {
    double om = 1.0 - rho * rho;
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      double q = (x[i] * x[i] - 2.0 * rho * x[i] * y[i] + y[i] * y[i]) / (nu * om);
      s += std::log1p(q);
    }
    double ll = rho_free - 0.5 * x.size() * std::log(om) - 0.5 * (nu + 2.0) * s;
    return finite_or_bad(-ll);
  }
};

// --------------------------------------------------- one-parameter families

double archimedean_negll(FamilyTag tag, double theta, const std::vector<double>& u,
                         const std::vector<double>& v) {
  Family f{tag, Rotation::none};
  std::vector<double> p{theta};
  double s = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    s -= bicop_logpdf(f, p, u[i], v[i]);
    if (!std::isfinite(s)) return kBad;
  }
  return s;
}

struct FitContext {
  std::vector<double> a, b;  // clamped (and possibly reflected) data
  double tau_base = 0.0;     // sample tau in the base orientation
};

std::vector<double> init_params(const Family& f, double tau_base) {
  Family base{f.tag, Rotation::none};
  try {
    std::vector<double> p = tau_to_param(base, tau_base);
    for (int i = 0; i < base.param_count(); ++i) {
      auto [lo, hi] = base.param_domain(i);
      p[i] = std::clamp(p[i], lo, hi);
    }
    return p;
  } catch (const std::exception&) {
    switch (f.tag) {
      case FamilyTag::gaussian: return {0.0};
      case FamilyTag::student_t: return {0.0, 10.0};
      case FamilyTag::clayton: return {0.05};
      case FamilyTag::frank: return {tau_base >= 0.0 ? 0.5 : -0.5};
      case FamilyTag::gumbel: return {1.05};
      default: return {};
    }
  }
}

}  // namespace

BicopSpec fit_bicop(const Family& f, const std::vector<double>& u,
                    const std::vector<double>& v) {
  if (u.size() != v.size()) throw DataError("fit_bicop: length mismatch");
  if (u.size() < 30) throw DataError("fit_bicop: need at least 30 observations");

  const size_t n = u.size();
  BicopSpec spec;
  spec.family = f;
  spec.n = n;
  spec.tau = kendall_tau(u, v);

  FitContext ctx;
  ctx.a = clamp_unit(u);
  ctx.b = clamp_unit(v);
  if (f.rotation == Rotation::reflected) {
    for (double& x : ctx.a) x = 1.0 - x;
    ctx.tau_base = -spec.tau;
  } else {
    ctx.tau_base = spec.tau;
  }

  const int k = f.param_count();
  if (k == 0) {
    spec.params = {};
    spec.loglik = 0.0;
    spec.aic = 0.0;
    spec.bic = 0.0;
    return spec;
  }

  std::vector<double> p0 = init_params(f, ctx.tau_base);
  std::vector<double> best = p0;
  double best_negll = kBad;

  switch (f.tag) {
    case FamilyTag::gaussian: {
      GaussObjective obj(ctx.a, ctx.b);
      auto [rho, fmin] = m::brent_minimize([&](double r) { return obj(r); },
                                           -0.9999, 0.9999, 1e-10);
      double f0 = obj(p0[0]);
      if (fmin <= f0) {
        best = {rho};
        best_negll = fmin;
      } else {
        best = p0;
        best_negll = f0;
      }
      break;
    }
    case FamilyTag::student_t: {
      // The grid contains the tau-inversion start (nu = 5) and each grid
      // step maximizes over rho, so the result never undercuts the start.
      for (size_t gi = 0; gi < kNuGrid.size(); ++gi) {
        StudentObjective obj(ctx.a, ctx.b, kNuGrid[gi]);
        auto [rho, fmin] = m::brent_minimize([&](double r) { return obj(r); },
                                             -0.9999, 0.9999, 1e-9);
        if (fmin < best_negll) {
          best_negll = fmin;
          best = {rho, kNuGrid[gi]};
        }
      }
      // Local refinement of nu between the neighbors of the grid optimum.
      size_t bi = std::lower_bound(kNuGrid.begin(), kNuGrid.end(), best[1]) -
                  kNuGrid.begin();
      double lo = kNuGrid[bi == 0 ? 0 : bi - 1];
      double hi = kNuGrid[std::min(bi + 1, kNuGrid.size() - 1)];
      if (hi > lo) {
        auto profile = [&](double nu) {
          StudentObjective obj(ctx.a, ctx.b, nu);
          return m::brent_minimize([&](double r) { return obj(r); }, -0.9999,
                                   0.9999, 1e-8)
              .second;
        };
        auto [nu_ref, f_ref] = m::brent_minimize(profile, lo, hi, 5e-3, 12);
        if (f_ref < best_negll) {
          StudentObjective obj(ctx.a, ctx.b, nu_ref);
          auto [rho, fmin] = m::brent_minimize([&](double r) { return obj(r); },
                                               -0.9999, 0.9999, 1e-9);
          best_negll = fmin;
          best = {rho, nu_ref};
        }
      }
      break;
    }
    case FamilyTag::clayton:
    case FamilyTag::frank:
    case FamilyTag::gumbel: {
      double lo, hi;
      if (f.tag == FamilyTag::clayton) {
        lo = 1e-6;
        hi = 28.0;
      } else if (f.tag == FamilyTag::frank) {
        lo = -35.0;
        hi = 35.0;
      } else {
        lo = 1.0;
        hi = 17.0;
      }
      auto obj = [&](double th) {
        return archimedean_negll(f.tag, th, ctx.a, ctx.b);
      };
      double th0 = std::clamp(p0[0], lo, hi);
      auto [th, fmin] = m::brent_minimize(obj, lo, hi, 1e-9);
      double f0 = obj(th0);
      if (fmin <= f0) {
        best = {th};
        best_negll = fmin;
      } else {
        best = {th0};
        best_negll = f0;
      }
      break;
    }
    default:
      break;
  }

  if (best_negll >= kBad) {
    // Optimizer never found a finite likelihood: keep the tau-inversion
    // estimate and flag the fit.
    spec.params = p0;
    spec.converged = false;
    double nll = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double lp = bicop_logpdf(f, spec.params, u[i], v[i]);
      nll -= std::isfinite(lp) ? lp : 0.0;
    }
    spec.loglik = -nll;
  } else {
    spec.params = best;
    spec.loglik = -best_negll;
  }

  spec.aic = 2.0 * k - 2.0 * spec.loglik;
  spec.bic = k * std::log(static_cast<double>(n)) - 2.0 * spec.loglik;
  return spec;
}

std::vector<FamilyTag> default_families() {
  return {FamilyTag::gaussian, FamilyTag::frank, FamilyTag::clayton,
          FamilyTag::student_t};
}

std::vector<FamilyTag> extended_families() {
  auto f = default_families();
  f.push_back(FamilyTag::gumbel);
  return f;
}

std::vector<FamilyTag> families_from_string(const std::string& csv) {
  std::vector<FamilyTag> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                 : comma - pos);
    size_t b = tok.find_first_not_of(" \t");
    if (b != std::string::npos) {
      size_t e = tok.find_last_not_of(" \t");
      out.push_back(family_from_string(tok.substr(b, e - b + 1)));
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw DataError("empty family list");
  return out;
}

BicopSpec select_family(const std::vector<double>& u, const std::vector<double>& v,
                        const std::vector<FamilyTag>& candidates, Criterion criterion) {
  if (candidates.empty()) throw DataError("select_family: no candidates");
  double tau_hat = kendall_tau(u, v);

  std::vector<Family> pool;
  auto push_unique = [&](Family f) {
    for (const auto& g : pool) {
      if (g.tag == f.tag && g.rotation == f.rotation) return;
    }
    pool.push_back(f);
  };
  for (FamilyTag tag : candidates) {
    Family f{tag, Rotation::none};
    push_unique(f);
    if (f.reflectable()) push_unique(Family{tag, Rotation::reflected});
  }
  bool has_indep = std::any_of(pool.begin(), pool.end(), [](const Family& f) {
    return f.tag == FamilyTag::independence;
  });
  if (!has_indep && std::fabs(tau_hat) < 0.02) {
    push_unique(Family{FamilyTag::independence, Rotation::none});
  }

  std::vector<BicopSpec> fits(pool.size());
  std::vector<std::string> errors(pool.size());
  parallel_for(pool.size(), [&](size_t i) {
    try {
      fits[i] = fit_bicop(pool[i], u, v);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pool.size(); ++i) {
    if (!errors[i].empty()) continue;
    double score = criterion == Criterion::aic ? fits[i].aic : fits[i].bic;
    if (score < best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    std::string msg = "select_family: all candidate fits failed";
    for (const auto& e : errors) {
      if (!e.empty()) msg += "; " + e;
    }
    throw NumericError(msg);
  }
  return fits[static_cast<size_t>(best)];
}

}  // namespace vinedep
