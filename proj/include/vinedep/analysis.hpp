#pragma once

#include <string>
#include <vector>

#include "vinedep/ingest.hpp"
#include "vinedep/structure.hpp"
#include "vinedep/vinefit.hpp"

// Dependence mining on fitted vines: ranking variables by the C-vine
// center-selection score, cohort-conditioned re-analysis, and hub-centered
// dependence clusters of the first R-vine tree.

namespace vinedep {

struct CentralityLevel {
  int level = 1;
  std::string center;
  std::vector<std::string> conditioning;  // previous centers (the node label)
  double score = 0.0;                     // sum of |tau| to the other variables
  std::vector<std::pair<std::string, double>> neighbor_taus;
};

struct CentralityRanking {
  std::vector<CentralityLevel> levels;

  json to_json() const;
  std::string to_text() const;
};

// Ordered C-vine centers of the first `levels` trees.
CentralityRanking rank_central_variables(const PseudoObs& u, int levels,
                                         const FitSettings& settings);

struct ConditionSpec {
  std::string variable;
  double value = 0.0;
};

struct AnalysisOptions {
  int levels = 0;                 // 0 = all d-1
  size_t min_subset_rows = 200;
  TiePolicy tie_policy = TiePolicy::jitter;
  uint64_t seed = 0;
  FitSettings fit;
};

// Subset rows matching the condition list, drop the conditioning variables,
// rerun margins + ranking on the remainder.
CentralityRanking conditioned_ranking(const DataTable& t,
                                      const std::vector<ConditionSpec>& condition,
                                      const AnalysisOptions& options);

struct HubNeighbor {
  std::string name;
  std::string family;
  double tau = 0.0;
};

struct HubCluster {
  std::string center;
  int degree = 0;
  double tau_sum = 0.0;
  std::vector<HubNeighbor> neighbors;
};

struct ClusterReport {
  int min_degree = 3;
  std::vector<HubCluster> hubs;
  std::vector<std::string> notes;  // exclusions and warnings

  json to_json() const;
  std::string to_text() const;
};

// Hub-centered star subgraphs of the first tree (pure graph projection).
ClusterReport extract_clusters(const VineStructure& s, int min_degree);

// Graphviz rendering of one hub's star.
std::string cluster_dot(const HubCluster& hub);

struct ComorbidityOptions {
  double min_prevalence = 0.01;
  int min_degree = 3;
  TiePolicy tie_policy = TiePolicy::jitter;
  uint64_t seed = 0;
  FitSettings fit;
};

// R-vine over binary condition indicators plus covariates; returns the
// first-tree clusters.  Indicators below the prevalence floor are excluded
// and noted.
ClusterReport comorbidity_report(const DataTable& t,
                                 const std::vector<std::string>& indicator_vars,
                                 const std::vector<std::string>& covariates,
                                 const ComorbidityOptions& options);

}  // namespace vinedep
