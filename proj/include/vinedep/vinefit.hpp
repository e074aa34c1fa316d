#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "vinedep/ingest.hpp"
#include "vinedep/margins.hpp"
#include "vinedep/structure.hpp"

// Whole-model bookkeeping: the fitted vine (structure + marginals + fit
// metadata), re-evaluation of the copula log-likelihood on arbitrary data,
// and the conditional-pseudo-observation recursion shared with sampling.

namespace vinedep {

struct FittedVine {
  VineStructure structure;
  std::vector<MarginalModel> marginals;  // empty for uniform-scale models
  size_t n = 0;
  double loglik = 0.0;  // copula-scale pseudo-likelihood
  double aic = 0.0;
  double bic = 0.0;
  TiePolicy tie_policy = TiePolicy::jitter;
  uint64_t seed = 0;
  Criterion criterion = Criterion::aic;
  json curation_log;  // optional, carried through from ingest

  int d() const { return structure.d; }
};

// h-functions of one fitted edge applied in both directions: returns
// (u_{j | D+k}, u_{k | D+j}) for inputs (u_{j|D}, u_{k|D}).
std::pair<std::vector<double>, std::vector<double>> conditional_pseudo_obs(
    const VineEdge& edge, const std::vector<double>& u_left,
    const std::vector<double>& u_right);

// Lookup from (variable, conditioning set) to the unique edge producing
// that conditional pseudo-observation, with the h-function direction.
class EdgeIndex {
 public:
  explicit EdgeIndex(const VineStructure& s);

  struct Entry {
    const VineEdge* edge = nullptr;
    bool target_is_j = true;
  };
  const Entry* find(int var, const std::vector<int>& cond_sorted) const;

 private:
  std::map<std::pair<int, std::vector<int>>, Entry> map_;
};

// Per-row conditional evaluator with memoization; `row` holds the uniform
// value of every variable.
class RowConditional {
 public:
  RowConditional(const EdgeIndex& index, std::vector<double> row);

  double cond(int var, const std::vector<int>& cond_sorted);
  void put(int var, const std::vector<int>& cond_sorted, double value);
  void set_base(int var, double value) { row_[static_cast<size_t>(var)] = value; }
  double base(int var) const { return row_[static_cast<size_t>(var)]; }

 private:
  const EdgeIndex& index_;
  std::vector<double> row_;
  std::map<std::pair<int, std::vector<int>>, double> memo_;
};

// Copula log-density of each row under the fitted structure.
std::vector<double> vine_row_logdensity(const FittedVine& fv, const PseudoObs& u);
double vine_loglik(const FittedVine& fv, const PseudoObs& u);

// (aic, bic) from the total parameter count and stored log-likelihood.
std::pair<double, double> model_criteria(const FittedVine& fv);

// Build + account: structure selection on pseudo-observations.
FittedVine fit_vine(const PseudoObs& u, VineKind kind, const FitSettings& settings,
                    const std::vector<int>* dvine_order = nullptr,
                    CvineTrace* trace = nullptr);

// Full pipeline from a curated table: empirical margins, PIT, vine fit.
FittedVine fit_vine_table(const DataTable& t, VineKind kind, const FitSettings& settings,
                          TiePolicy tie_policy, uint64_t seed,
                          CvineTrace* trace = nullptr);

json model_to_json(const FittedVine& fv);
FittedVine model_from_json(const json& j);

}  // namespace vinedep
