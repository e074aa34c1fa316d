#pragma once

#include <string>
#include <vector>

#include "vinedep/bicop.hpp"
#include "vinedep/margins.hpp"

// Vine tree selection.  R-vines follow Dissmann's greedy construction:
// each tree is a maximum spanning tree under |tau| of the current
// conditional pseudo-observations, restricted to proximity-admissible
// pairs.  C-vines pick the variable with the largest |tau| sum as the star
// center at every level; D-vines take a caller-supplied first-tree path.

namespace vinedep {

enum class VineKind { rvine, cvine, dvine };

std::string to_string(VineKind k);
VineKind vine_kind_from_string(const std::string& s);

struct VineEdge {
  int j = 0, k = 0;          // conditioned pair, j < k (column indices)
  std::vector<int> cond;     // conditioning set, ascending
  int level = 1;             // tree index, 1-based
  double weight = 0.0;       // |tau| of the pair at selection time
  BicopSpec spec;

  std::vector<int> constraint() const;  // {j, k} + cond, ascending
};

struct VineStructure {
  VineKind kind = VineKind::rvine;
  int d = 0;
  std::vector<std::string> names;
  std::vector<std::vector<VineEdge>> trees;

  int total_edges() const;
  int total_params() const;
  double total_loglik() const;

  json to_json() const;
  static VineStructure from_json(const json& j);
  // Graphviz rendering of one tree (node labels are conditioned sets).
  std::string to_dot(size_t tree_index) const;
};

struct FitSettings {
  std::vector<FamilyTag> families = default_families();
  Criterion criterion = Criterion::aic;
  int trunc_level = 0;  // fit Independence above this level; 0 = off
};

// Per-level record of the C-vine center choice (the centrality ranking).
struct CvineLevel {
  int center = 0;
  std::vector<int> conditioning;                 // previous centers
  double score = 0.0;                            // sum of |tau| to the others
  std::vector<std::pair<int, double>> neighbor_taus;
};
struct CvineTrace {
  std::vector<CvineLevel> levels;
};

// Maximum spanning tree of a complete weighted graph; deterministic
// lexicographic tie-break on the (sorted) name pair.
std::vector<std::pair<int, int>> max_spanning_tree(
    const std::vector<std::string>& names,
    const std::vector<std::vector<double>>& weights);

VineStructure build_rvine(const PseudoObs& u, const FitSettings& settings);
VineStructure build_cvine(const PseudoObs& u, const FitSettings& settings,
                          CvineTrace* trace = nullptr);
VineStructure build_dvine(const PseudoObs& u, const std::vector<int>& order,
                          const FitSettings& settings);

struct StructureDiagnostics {
  bool ok = true;
  std::vector<std::string> violations;
};

StructureDiagnostics validate_structure(const VineStructure& s);

}  // namespace vinedep
