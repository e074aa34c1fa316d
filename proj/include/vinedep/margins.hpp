#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vinedep/ingest.hpp"

// Empirical probability integral transform: each variable is mapped to
// pseudo-observations rank/(n+1) strictly inside (0,1), and back through the
// empirical quantile function.  Ties are resolved by average rank or by a
// seeded uniform jitter over the tie's rank interval.

namespace vinedep {

enum class TiePolicy { average_rank, jitter };

std::string to_string(TiePolicy p);
TiePolicy tie_policy_from_string(const std::string& s);

struct MarginalModel {
  std::string variable;
  VarKind kind = VarKind::continuous;
  std::vector<double> sorted_values;  // non-decreasing, length n
  size_t n = 0;
  bool degenerate = false;  // constant column
};

struct PseudoObs {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;  // d columns of length n, in (0,1)

  size_t d() const { return cols.size(); }
  size_t n() const { return cols.empty() ? 0 : cols.front().size(); }
};

MarginalModel fit_marginal(const std::vector<double>& column, const VariableMeta& meta);

// Rank transform against `model`.  Values absent from the model support are
// clamped to the nearest rank; `n_clamped` (optional) counts them.
std::vector<double> pit(const std::vector<double>& column, const MarginalModel& model,
                        TiePolicy policy, uint64_t seed, size_t* n_clamped = nullptr);

// Empirical quantile: u -> sorted_values[ceil(u*n)] (type-1 inverse).
std::vector<double> inverse_pit(const std::vector<double>& u, const MarginalModel& model);
double inverse_pit_scalar(double u, const MarginalModel& model);

// Fit + transform every column of a fully observed table.
PseudoObs make_pseudo_obs(const DataTable& t, TiePolicy policy, uint64_t seed);
std::vector<MarginalModel> fit_all_marginals(const DataTable& t);

}  // namespace vinedep
