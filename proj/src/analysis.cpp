#include "vinedep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "vinedep/errors.hpp"

namespace vinedep {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

json CentralityRanking::to_json() const {
  json arr = json::array();
  for (const auto& lv : levels) {
    json j;
    j["level"] = lv.level;
    j["center"] = lv.center;
    j["conditioning"] = lv.conditioning;
    j["score"] = lv.score;
    json nb = json::array();
    for (const auto& [name, tau] : lv.neighbor_taus) {
      nb.push_back(json{{"variable", name}, {"tau", tau}});
    }
    j["neighbors"] = std::move(nb);
    arr.push_back(std::move(j));
  }
  return json{{"rankings", std::move(arr)}};
}

std::string CentralityRanking::to_text() const {
  std::string out = "level  center  score  (conditioned on)\n";
  for (const auto& lv : levels) {
    out += std::to_string(lv.level) + "  " + lv.center + "  " + fmt(lv.score);
    if (!lv.conditioning.empty()) {
      out += "  | ";
      for (size_t i = 0; i < lv.conditioning.size(); ++i) {
        if (i) out += ",";
        out += lv.conditioning[i];
      }
    }
    out += "\n";
  }
  return out;
}

CentralityRanking rank_central_variables(const PseudoObs& u, int levels,
                                         const FitSettings& settings) {
  const int d = static_cast<int>(u.d());
  if (levels <= 0) levels = d - 1;
  if (levels > d - 1) {
    throw DataError("rank_central_variables: levels exceeds d-1");
  }
  CvineTrace trace;
  build_cvine(u, settings, &trace);

  CentralityRanking out;
  for (int m = 0; m < levels && m < static_cast<int>(trace.levels.size()); ++m) {
    const CvineLevel& lv = trace.levels[static_cast<size_t>(m)];
    CentralityLevel r;
    r.level = m + 1;
    r.center = u.names[static_cast<size_t>(lv.center)];
    for (int c : lv.conditioning) r.conditioning.push_back(u.names[static_cast<size_t>(c)]);
    r.score = lv.score;
    for (const auto& [var, tau] : lv.neighbor_taus) {
      r.neighbor_taus.emplace_back(u.names[static_cast<size_t>(var)], tau);
    }
    std::sort(r.neighbor_taus.begin(), r.neighbor_taus.end(),
              [](const auto& a, const auto& b) {
                double fa = std::fabs(a.second), fb = std::fabs(b.second);
                if (fa != fb) return fa > fb;
                return a.first < b.first;
              });
    out.levels.push_back(std::move(r));
  }
  return out;
}

CentralityRanking conditioned_ranking(const DataTable& t,
                                      const std::vector<ConditionSpec>& condition,
                                      const AnalysisOptions& options) {
  std::set<std::string> cond_vars;
  for (const auto& c : condition) {
    if (t.index_of(c.variable) < 0) {
      throw DataError("condition variable not in table: " + c.variable);
    }
    cond_vars.insert(c.variable);
  }

  const size_t n = t.n_rows();
  std::vector<char> keep(n, 1);
  for (const auto& c : condition) {
    const Column* col = t.find(c.variable);
    for (size_t i = 0; i < n; ++i) {
      double v = col->values[i];
      if (std::isnan(v) || v != c.value) keep[i] = 0;
    }
  }
  size_t kept = 0;
  for (char k : keep) kept += k;
  if (kept == 0) throw DataError("condition matches no rows");
  if (kept < options.min_subset_rows) {
    throw DataError("conditioned subset has " + std::to_string(kept) +
                    " rows, below the minimum of " +
                    std::to_string(options.min_subset_rows));
  }

  std::vector<Column> cols;
  for (const auto& c : t.columns()) {
    if (cond_vars.count(c.meta.name)) continue;  // constant within the subset
    Column nc;
    nc.meta = c.meta;
    nc.values.reserve(kept);
    for (size_t i = 0; i < n; ++i) {
      if (keep[i]) nc.values.push_back(c.values[i]);
    }
    cols.push_back(std::move(nc));
  }
  if (cols.size() < 2) throw DataError("conditioning leaves fewer than 2 variables");
  DataTable sub = DataTable::from_columns(std::move(cols));
  if (sub.missing_count() != 0) {
    throw DataError("conditioned subset contains missing cells; curate first");
  }
  PseudoObs u = make_pseudo_obs(sub, options.tie_policy, options.seed);
  int levels = options.levels;
  int d = static_cast<int>(u.d());
  if (levels <= 0 || levels > d - 1) levels = d - 1;
  return rank_central_variables(u, levels, options.fit);
}

json ClusterReport::to_json() const {
  json hubs_j = json::array();
  for (const auto& h : hubs) {
    json nb = json::array();
    for (const auto& x : h.neighbors) {
      nb.push_back(json{{"variable", x.name}, {"family", x.family}, {"tau", x.tau}});
    }
    hubs_j.push_back(json{{"center", h.center},
                          {"degree", h.degree},
                          {"tau_sum", h.tau_sum},
                          {"neighbors", std::move(nb)}});
  }
  json j;
  j["min_degree"] = min_degree;
  j["clusters"] = std::move(hubs_j);
  j["notes"] = notes;
  return j;
}

std::string ClusterReport::to_text() const {
  std::string out;
  if (hubs.empty()) {
    out = "no hub reaches degree " + std::to_string(min_degree) + "\n";
  }
  for (const auto& h : hubs) {
    out += h.center + " (degree " + std::to_string(h.degree) + ", sum|tau| " +
           fmt(h.tau_sum) + ")\n";
    for (const auto& x : h.neighbors) {
      out += "  - " + x.name + "  " + x.family + "  tau=" + fmt(x.tau) + "\n";
    }
  }
  for (const auto& n : notes) out += "note: " + n + "\n";
  return out;
}

ClusterReport extract_clusters(const VineStructure& s, int min_degree) {
  if (s.trees.empty()) throw DataError("extract_clusters: structure has no trees");
  ClusterReport report;
  report.min_degree = min_degree;

  std::map<int, std::vector<const VineEdge*>> adjacency;
  for (const auto& e : s.trees[0]) {
    adjacency[e.j].push_back(&e);
    adjacency[e.k].push_back(&e);
  }
  for (const auto& [var, edges] : adjacency) {
    if (static_cast<int>(edges.size()) < min_degree) continue;
    HubCluster hub;
    hub.center = s.names[static_cast<size_t>(var)];
    hub.degree = static_cast<int>(edges.size());
    for (const VineEdge* e : edges) {
      int other = e->j == var ? e->k : e->j;
      HubNeighbor nb;
      nb.name = s.names[static_cast<size_t>(other)];
      nb.family = e->spec.family.display();
      nb.tau = e->spec.tau;
      hub.tau_sum += std::fabs(e->spec.tau);
      hub.neighbors.push_back(std::move(nb));
    }
    std::sort(hub.neighbors.begin(), hub.neighbors.end(),
              [](const HubNeighbor& a, const HubNeighbor& b) {
                double fa = std::fabs(a.tau), fb = std::fabs(b.tau);
                if (fa != fb) return fa > fb;
                return a.name < b.name;
              });
    report.hubs.push_back(std::move(hub));
  }
  std::sort(report.hubs.begin(), report.hubs.end(),
            [](const HubCluster& a, const HubCluster& b) {
              if (a.degree != b.degree) return a.degree > b.degree;
              if (a.tau_sum != b.tau_sum) return a.tau_sum > b.tau_sum;
              return a.center < b.center;
            });
  return report;
}

std::string cluster_dot(const HubCluster& hub) {
  std::string out = "graph cluster {\n  node [shape=ellipse];\n";
  out += "  \"" + hub.center + "\" [style=filled];\n";
  char buf[40];
  for (const auto& nb : hub.neighbors) {
    std::snprintf(buf, sizeof(buf), "%.3f", nb.tau);
    out += "  \"" + hub.center + "\" -- \"" + nb.name + "\" [label=\"" + nb.family +
           ", tau=" + buf + "\"];\n";
  }
  out += "}\n";
  return out;
}

ClusterReport comorbidity_report(const DataTable& t,
                                 const std::vector<std::string>& indicator_vars,
                                 const std::vector<std::string>& covariates,
                                 const ComorbidityOptions& options) {
  std::vector<Column> cols;
  std::vector<std::string> notes;
  for (const auto& name : indicator_vars) {
    const Column* c = t.find(name);
    if (!c) throw DataError("indicator variable not in table: " + name);
    if (c->meta.kind != VarKind::binary) {
      throw DataError("indicator variable must be binary: " + name);
    }
    double mean = 0.0;
    size_t cnt = 0;
    for (double v : c->values) {
      if (std::isnan(v)) throw DataError("indicator has missing cells: " + name);
      if (v != 0.0 && v != 1.0) throw DataError("indicator not coded 0/1: " + name);
      mean += v;
      ++cnt;
    }
    mean /= static_cast<double>(cnt);
    if (mean < options.min_prevalence) {
      notes.push_back("excluded " + name + ": prevalence " + fmt(mean) +
                      " below " + fmt(options.min_prevalence));
      continue;
    }
    cols.push_back(*c);
  }
  for (const auto& name : covariates) {
    const Column* c = t.find(name);
    if (!c) throw DataError("covariate not in table: " + name);
    cols.push_back(*c);
  }
  if (cols.size() < 2) {
    throw DataError("comorbidity analysis needs at least 2 usable variables");
  }
  DataTable sub = DataTable::from_columns(std::move(cols));
  PseudoObs u = make_pseudo_obs(sub, options.tie_policy, options.seed);
  VineStructure s = build_rvine(u, options.fit);
  ClusterReport report = extract_clusters(s, options.min_degree);
  report.notes.insert(report.notes.end(), notes.begin(), notes.end());
  return report;
}

}  // namespace vinedep
