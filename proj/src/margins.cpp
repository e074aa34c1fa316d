#include "vinedep/margins.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vinedep/errors.hpp"
#include "vinedep/rng.hpp"

namespace vinedep {

std::string to_string(TiePolicy p) {
  return p == TiePolicy::average_rank ? "average_rank" : "jitter";
}

TiePolicy tie_policy_from_string(const std::string& s) {
  if (s == "average_rank" || s == "average-rank") return TiePolicy::average_rank;
  if (s == "jitter") return TiePolicy::jitter;
  throw DataError("unknown tie policy: " + s);
}

MarginalModel fit_marginal(const std::vector<double>& column, const VariableMeta& meta) {
  if (column.empty()) throw DataError("cannot fit marginal of empty column " + meta.name);
  for (double v : column) {
    if (std::isnan(v)) {
      throw DataError("marginal fit requires a fully observed column: " + meta.name);
    }
  }
  MarginalModel m;
  m.variable = meta.name;
  m.kind = meta.kind;
  m.sorted_values = column;
  std::sort(m.sorted_values.begin(), m.sorted_values.end());
  m.n = m.sorted_values.size();
  m.degenerate = m.sorted_values.front() == m.sorted_values.back();
  return m;
}

std::vector<double> pit(const std::vector<double>& column, const MarginalModel& model,
                        TiePolicy policy, uint64_t seed, size_t* n_clamped) {
  if (model.n == 0) throw DataError("pit: empty marginal model");
  const auto& sv = model.sorted_values;
  const double denom = static_cast<double>(model.n) + 1.0;
  const uint64_t stream = rng::stream_of(model.variable);
  size_t clamped = 0;

  std::vector<double> out(column.size());
  for (size_t i = 0; i < column.size(); ++i) {
    double x = column[i];
    if (std::isnan(x)) throw DataError("pit: missing value in column " + model.variable);
    // Tie run of x inside the model support: sorted positions [lo, hi).
    size_t lo = std::lower_bound(sv.begin(), sv.end(), x) - sv.begin();
    size_t hi = std::upper_bound(sv.begin(), sv.end(), x) - sv.begin();
    double rank;
    if (hi == lo) {
      // Not part of the fitted support: clamp to the nearest rank.
      double r = static_cast<double>(lo) + 0.5;
      rank = std::clamp(r, 1.0, static_cast<double>(model.n));
      ++clamped;
    } else if (policy == TiePolicy::average_rank || hi - lo == 1) {
      rank = 0.5 * static_cast<double>(lo + 1 + hi);  // mean of ranks lo+1..hi
    } else {
      // Jitter uniformly over the tie's rank interval (lo, hi].
      double v = rng::u01(seed, stream, static_cast<uint64_t>(i));
      rank = static_cast<double>(lo) + v * static_cast<double>(hi - lo);
    }
    out[i] = rank / denom;
  }
  if (n_clamped) *n_clamped = clamped;
  return out;
}

double inverse_pit_scalar(double u, const MarginalModel& model) {
  if (model.n == 0) throw DataError("inverse_pit: empty marginal model");
  if (!(u > 0.0 && u < 1.0)) throw DataError("inverse_pit: u outside (0,1)");
  double idx = std::ceil(u * static_cast<double>(model.n));
  size_t k = static_cast<size_t>(std::clamp(idx, 1.0, static_cast<double>(model.n)));
  return model.sorted_values[k - 1];
}

std::vector<double> inverse_pit(const std::vector<double>& u, const MarginalModel& model) {
  std::vector<double> out(u.size());
  for (size_t i = 0; i < u.size(); ++i) out[i] = inverse_pit_scalar(u[i], model);
  return out;
}

std::vector<MarginalModel> fit_all_marginals(const DataTable& t) {
  std::vector<MarginalModel> out;
  out.reserve(t.n_cols());
  for (const auto& c : t.columns()) out.push_back(fit_marginal(c.values, c.meta));
  return out;
}

PseudoObs make_pseudo_obs(const DataTable& t, TiePolicy policy, uint64_t seed) {
  PseudoObs u;
  u.names = t.names();
  u.cols.reserve(t.n_cols());
  for (const auto& c : t.columns()) {
    MarginalModel m = fit_marginal(c.values, c.meta);
    u.cols.push_back(pit(c.values, m, policy, seed));
  }
  return u;
}

}  // namespace vinedep
