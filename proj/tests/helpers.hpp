#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "vinedep/sample.hpp"
#include "vinedep/structure.hpp"
#include "vinedep/vinefit.hpp"

// Shared test utilities: exhaustive spanning-tree enumeration via Prufer
// sequences, Kolmogorov-Smirnov distances, and hand-built vines for
// simulation oracles.

namespace testutil {

inline vinedep::VineEdge make_edge(int j, int k, std::vector<int> cond, int level,
                                   vinedep::FamilyTag tag, std::vector<double> params,
                                   vinedep::Rotation rot = vinedep::Rotation::none) {
  vinedep::VineEdge e;
  e.j = std::min(j, k);
  e.k = std::max(j, k);
  e.cond = std::move(cond);
  std::sort(e.cond.begin(), e.cond.end());
  e.level = level;
  e.spec.family = {tag, rot};
  e.spec.params = std::move(params);
  e.spec.n = 1000;  // marks the edge as carrying a usable copula
  e.spec.tau = param_to_tau(e.spec.family, e.spec.params);
  return e;
}

// All labeled spanning trees on n nodes from Prufer sequences (n^(n-2)).
inline std::vector<std::vector<std::pair<int, int>>> all_spanning_trees(int n) {
  std::vector<std::vector<std::pair<int, int>>> trees;
  if (n == 2) {
    trees.push_back({{0, 1}});
    return trees;
  }
  std::vector<int> seq(static_cast<size_t>(n - 2), 0);
  for (;;) {
    // Decode the Prufer sequence.
    std::vector<int> degree(static_cast<size_t>(n), 1);
    for (int v : seq) ++degree[static_cast<size_t>(v)];
    std::vector<std::pair<int, int>> edges;
    std::vector<int> deg = degree;
    std::vector<char> used(static_cast<size_t>(n), 0);
    std::vector<int> s = seq;
    for (int v : s) {
      int leaf = -1;
      for (int u = 0; u < n; ++u) {
        if (deg[static_cast<size_t>(u)] == 1 && !used[static_cast<size_t>(u)]) {
          leaf = u;
          break;
        }
      }
      edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
      used[static_cast<size_t>(leaf)] = 1;
      --deg[static_cast<size_t>(v)];
    }
    std::vector<int> last;
    for (int u = 0; u < n; ++u) {
      if (!used[static_cast<size_t>(u)] && deg[static_cast<size_t>(u)] >= 1) last.push_back(u);
    }
    edges.emplace_back(std::min(last[0], last[1]), std::max(last[0], last[1]));
    trees.push_back(std::move(edges));

    // Next sequence.
    int pos = n - 3;
    while (pos >= 0 && seq[static_cast<size_t>(pos)] == n - 1) {
      seq[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++seq[static_cast<size_t>(pos)];
  }
  return trees;
}

// KS distance between a sample and the uniform distribution on (0,1).
inline double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double hi = (static_cast<double>(i) + 1.0) / n - x[i];
    double lo = x[i] - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

// Two-sample KS distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

// Wrap a hand-built structure so it can be sampled.
inline vinedep::FittedVine wrap_vine(vinedep::VineStructure s) {
  vinedep::FittedVine fv;
  fv.n = 1000;
  fv.loglik = s.total_loglik();
  fv.structure = std::move(s);
  return fv;
}

inline vinedep::PseudoObs batch_to_pseudo(const vinedep::SampleBatch& batch,
                                          std::vector<std::string> names) {
  vinedep::PseudoObs u;
  u.names = std::move(names);
  u.cols = batch.uniforms;
  return u;
}

}  // namespace testutil
