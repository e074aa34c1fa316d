#include "vinedep/structure.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "vinedep/dependence.hpp"
#include "vinedep/errors.hpp"
#include "vinedep/parallel.hpp"

namespace vinedep {

namespace {

// Active node of the current tree level: a variable (level 1) or an edge of
// the previous tree, carrying its two directional conditional streams.
struct Node {
  std::vector<int> constraint;  // sorted variable ids
  int ca = 0, cb = 0;           // conditioned pair (equal for level-1 nodes)
  std::vector<double> sa, sb;   // u_{ca | rest}, u_{cb | rest}
  int parent1 = -1, parent2 = -1;  // previous-level node ids (adjacency)
  std::string key;              // canonical label for tie-breaking
};

std::string label_of(const std::vector<std::string>& names, int j, int k,
                     const std::vector<int>& cond) {
  std::string a = names[j], b = names[k];
  if (b < a) std::swap(a, b);
  std::string out = a + "," + b;
  if (!cond.empty()) {
    std::vector<std::string> cn;
    cn.reserve(cond.size());
    for (int c : cond) cn.push_back(names[c]);
    std::sort(cn.begin(), cn.end());
    out += "|";
    for (size_t i = 0; i < cn.size(); ++i) {
      if (i) out += ",";
      out += cn[i];
    }
  }
  return out;
}

struct Candidate {
  int a = 0, b = 0;        // node ids
  int x = 0, y = 0;        // new conditioned pair (x from a, y from b)
  double tau = 0.0;
  std::string key;
  bool valid = false;
};

// Streams of node `nd` for conditioned variable v.
const std::vector<double>& stream_for(const Node& nd, int v) {
  if (v == nd.ca) return nd.sa;
  if (v == nd.cb) return nd.sb;
  throw NumericError("internal: conditioned variable lacks a stream");
}

// Proximity-admissible join of two nodes; fills conditioned pair and tau.
Candidate make_candidate(const std::vector<Node>& nodes, int ia, int ib,
                         const std::vector<std::string>& names) {
  Candidate c;
  c.a = ia;
  c.b = ib;
  const Node& A = nodes[ia];
  const Node& B = nodes[ib];
  std::vector<int> only_a, only_b, both;
  std::set_difference(A.constraint.begin(), A.constraint.end(), B.constraint.begin(),
                      B.constraint.end(), std::back_inserter(only_a));
  std::set_difference(B.constraint.begin(), B.constraint.end(), A.constraint.begin(),
                      A.constraint.end(), std::back_inserter(only_b));
  if (only_a.size() != 1 || only_b.size() != 1) return c;  // not a regular join
  c.x = only_a[0];
  c.y = only_b[0];
  std::set_intersection(A.constraint.begin(), A.constraint.end(), B.constraint.begin(),
                        B.constraint.end(), std::back_inserter(both));
  c.key = label_of(names, c.x, c.y, both);
  c.valid = true;
  return c;
}

BicopSpec independence_spec(size_t n, double tau, bool converged) {
  BicopSpec s;
  s.family = {FamilyTag::independence, Rotation::none};
  s.n = n;
  s.tau = tau;
  s.converged = converged;
  return s;
}

// Fit one selected edge and produce the next-level node.
struct EdgeBuild {
  VineEdge edge;
  Node node;
};

EdgeBuild build_edge(const std::vector<Node>& nodes, const Candidate& c, int level,
                     const FitSettings& settings, const std::vector<std::string>& names,
                     int ia_id, int ib_id) {
  const Node& A = nodes[c.a];
  const Node& B = nodes[c.b];
  int j = std::min(c.x, c.y), k = std::max(c.x, c.y);
  const std::vector<double>& sj = (j == c.x) ? stream_for(A, c.x) : stream_for(B, c.y);
  const std::vector<double>& sk = (k == c.y) ? stream_for(B, c.y) : stream_for(A, c.x);

  EdgeBuild out;
  out.edge.j = j;
  out.edge.k = k;
  std::vector<int> cond;
  std::set_intersection(A.constraint.begin(), A.constraint.end(), B.constraint.begin(),
                        B.constraint.end(), std::back_inserter(cond));
  out.edge.cond = cond;
  out.edge.level = level;
  out.edge.weight = std::fabs(c.tau);

  bool truncate = settings.trunc_level > 0 && level > settings.trunc_level;
  if (truncate) {
    out.edge.spec = independence_spec(sj.size(), c.tau, true);
  } else {
    try {
      out.edge.spec = select_family(sj, sk, settings.families, settings.criterion);
    } catch (const std::exception&) {
      out.edge.spec = independence_spec(sj.size(), c.tau, false);
    }
  }

  // Conditional pseudo-observations for the next level.
  size_t n = sj.size();
  out.node.constraint.clear();
  std::set_union(A.constraint.begin(), A.constraint.end(), B.constraint.begin(),
                 B.constraint.end(), std::back_inserter(out.node.constraint));
  out.node.ca = j;
  out.node.cb = k;
  out.node.sa.resize(n);
  out.node.sb.resize(n);
  for (size_t r = 0; r < n; ++r) {
    out.node.sa[r] = bicop_hfunc(out.edge.spec, sj[r], sk[r], CondVar::second);
    out.node.sb[r] = bicop_hfunc(out.edge.spec, sk[r], sj[r], CondVar::first);
  }
  out.node.parent1 = ia_id;
  out.node.parent2 = ib_id;
  out.node.key = label_of(names, j, k, cond);
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  bool unite(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    parent[ra] = rb;
    return true;
  }
};

// Kruskal on explicit candidates: weight descending, label ascending.
std::vector<int> kruskal(const std::vector<Candidate>& cands, size_t n_nodes) {
  std::vector<int> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double wa = std::fabs(cands[a].tau), wb = std::fabs(cands[b].tau);
    if (wa != wb) return wa > wb;
    return cands[a].key < cands[b].key;
  });
  UnionFind uf(n_nodes);
  std::vector<int> chosen;
  for (int ci : order) {
    if (uf.unite(cands[ci].a, cands[ci].b)) {
      chosen.push_back(ci);
      if (chosen.size() + 1 == n_nodes) break;
    }
  }
  if (chosen.size() + 1 != n_nodes) {
    throw NumericError("spanning tree construction failed: graph not connected");
  }
  return chosen;
}

std::vector<Node> level_one_nodes(const PseudoObs& u) {
  std::vector<Node> nodes(u.d());
  for (size_t i = 0; i < u.d(); ++i) {
    nodes[i].constraint = {static_cast<int>(i)};
    nodes[i].ca = nodes[i].cb = static_cast<int>(i);
    nodes[i].sa = u.cols[i];
    nodes[i].sb = u.cols[i];
    nodes[i].key = u.names[i];
  }
  return nodes;
}

void check_build_inputs(const PseudoObs& u) {
  if (u.d() < 2) throw DataError("vine construction needs at least 2 variables");
  if (u.n() < 30) throw DataError("vine construction needs at least 30 rows");
  for (const auto& col : u.cols) {
    if (col.size() != u.n()) throw DataError("pseudo-observation columns differ in length");
    for (double v : col) {
      if (!(v > 0.0 && v < 1.0)) {
        throw DataError("pseudo-observations must lie strictly inside (0,1)");
      }
    }
  }
}

// Shared R-vine/D-vine engine: tree 1 is either the |tau| MST (R-vine) or a
// forced path (D-vine); every later tree is the MST over admissible joins,
// which for a path is the unique admissible chain.
VineStructure build_sequential(const PseudoObs& u, const FitSettings& settings,
                               VineKind kind, const std::vector<int>* dvine_order) {
  check_build_inputs(u);
  const int d = static_cast<int>(u.d());
  VineStructure vs;
  vs.kind = kind;
  vs.d = d;
  vs.names = u.names;

  std::vector<Node> nodes = level_one_nodes(u);

  for (int level = 1; level < d; ++level) {
    // Admissible pairs: every pair at level 1, shared-parent pairs later.
    std::vector<Candidate> cands;
    for (size_t a = 0; a < nodes.size(); ++a) {
      for (size_t b = a + 1; b < nodes.size(); ++b) {
        if (level > 1) {
          bool share = nodes[a].parent1 == nodes[b].parent1 ||
                       nodes[a].parent1 == nodes[b].parent2 ||
                       nodes[a].parent2 == nodes[b].parent1 ||
                       nodes[a].parent2 == nodes[b].parent2;
          if (!share) continue;
        }
        Candidate c = make_candidate(nodes, static_cast<int>(a), static_cast<int>(b),
                                     u.names);
        if (c.valid) cands.push_back(std::move(c));
      }
    }
    parallel_for(cands.size(), [&](size_t i) {
      Candidate& c = cands[i];
      c.tau = kendall_tau(stream_for(nodes[c.a], c.x), stream_for(nodes[c.b], c.y));
    });

    std::vector<int> chosen;
    if (level == 1 && kind == VineKind::dvine) {
      // Forced path in the supplied order.
      const std::vector<int>& ord = *dvine_order;
      std::map<std::pair<int, int>, int> by_pair;
      for (size_t i = 0; i < cands.size(); ++i) {
        by_pair[{std::min(cands[i].x, cands[i].y), std::max(cands[i].x, cands[i].y)}] =
            static_cast<int>(i);
      }
      for (int i = 0; i + 1 < d; ++i) {
        auto it = by_pair.find({std::min(ord[i], ord[i + 1]), std::max(ord[i], ord[i + 1])});
        if (it == by_pair.end()) throw NumericError("internal: path pair missing");
        chosen.push_back(it->second);
      }
    } else {
      chosen = kruskal(cands, nodes.size());
    }

    std::vector<EdgeBuild> built(chosen.size());
    parallel_for(chosen.size(), [&](size_t i) {
      const Candidate& c = cands[chosen[i]];
      built[i] = build_edge(nodes, c, level, settings, u.names, c.a, c.b);
    });

    // Deterministic edge order inside a tree: by canonical label.
    std::sort(built.begin(), built.end(), [](const EdgeBuild& a, const EdgeBuild& b) {
      return a.node.key < b.node.key;
    });

    // Parent ids (indices into the outgoing node vector) survive the sort,
    // so adjacency checks at the next level stay valid.
    std::vector<VineEdge> tree;
    std::vector<Node> next;
    tree.reserve(built.size());
    next.reserve(built.size());
    for (auto& b : built) {
      tree.push_back(std::move(b.edge));
      next.push_back(std::move(b.node));
    }
    vs.trees.push_back(std::move(tree));
    nodes = std::move(next);
  }
  return vs;
}

}  // namespace

std::string to_string(VineKind k) {
  switch (k) {
    case VineKind::rvine: return "rvine";
    case VineKind::cvine: return "cvine";
    case VineKind::dvine: return "dvine";
  }
  return "rvine";
}

VineKind vine_kind_from_string(const std::string& s) {
  if (s == "rvine" || s == "r-vine" || s == "r") return VineKind::rvine;
  if (s == "cvine" || s == "c-vine" || s == "c") return VineKind::cvine;
  if (s == "dvine" || s == "d-vine" || s == "d") return VineKind::dvine;
  throw DataError("unknown vine kind: " + s);
}

std::vector<int> VineEdge::constraint() const {
  std::vector<int> out = cond;
  out.push_back(j);
  out.push_back(k);
  std::sort(out.begin(), out.end());
  return out;
}

int VineStructure::total_edges() const {
  int n = 0;
  for (const auto& t : trees) n += static_cast<int>(t.size());
  return n;
}

int VineStructure::total_params() const {
  int n = 0;
  for (const auto& t : trees) {
    for (const auto& e : t) n += e.spec.family.param_count();
  }
  return n;
}

double VineStructure::total_loglik() const {
  double s = 0.0;
  for (const auto& t : trees) {
    for (const auto& e : t) s += e.spec.loglik;
  }
  return s;
}

std::vector<std::pair<int, int>> max_spanning_tree(
    const std::vector<std::string>& names,
    const std::vector<std::vector<double>>& weights) {
  const size_t d = names.size();
  if (d < 2) throw DataError("max_spanning_tree: need at least 2 nodes");
  for (const auto& row : weights) {
    if (row.size() != d) throw DataError("max_spanning_tree: weight matrix shape");
    for (double w : row) {
      if (!std::isfinite(w)) throw DataError("max_spanning_tree: non-finite weight");
    }
  }
  struct E {
    int i, j;
    double w;
    std::string key;
  };
  std::vector<E> edges;
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i + 1; j < d; ++j) {
      std::string a = names[i], b = names[j];
      if (b < a) std::swap(a, b);
      edges.push_back({static_cast<int>(i), static_cast<int>(j), weights[i][j], a + "," + b});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const E& a, const E& b) {
    if (a.w != b.w) return a.w > b.w;
    return a.key < b.key;
  });
  UnionFind uf(d);
  std::vector<std::pair<int, int>> out;
  for (const auto& e : edges) {
    if (uf.unite(e.i, e.j)) {
      out.emplace_back(e.i, e.j);
      if (out.size() + 1 == d) break;
    }
  }
  return out;
}

VineStructure build_rvine(const PseudoObs& u, const FitSettings& settings) {
  return build_sequential(u, settings, VineKind::rvine, nullptr);
}

VineStructure build_dvine(const PseudoObs& u, const std::vector<int>& order,
                          const FitSettings& settings) {
  check_build_inputs(u);
  const int d = static_cast<int>(u.d());
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expect(d);
  std::iota(expect.begin(), expect.end(), 0);
  if (sorted != expect) throw DataError("dvine order must be a permutation of the variables");
  return build_sequential(u, settings, VineKind::dvine, &order);
}

VineStructure build_cvine(const PseudoObs& u, const FitSettings& settings,
                          CvineTrace* trace) {
  check_build_inputs(u);
  const int d = static_cast<int>(u.d());
  VineStructure vs;
  vs.kind = VineKind::cvine;
  vs.d = d;
  vs.names = u.names;
  if (trace) trace->levels.clear();

  // Active variables with their current conditional streams.
  std::vector<int> active(d);
  std::iota(active.begin(), active.end(), 0);
  std::vector<std::vector<double>> streams = u.cols;
  std::vector<int> centers;  // accumulated conditioning set

  for (int level = 1; level < d; ++level) {
    const size_t na = active.size();
    // Pairwise |tau| of the active streams.
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t a = 0; a < na; ++a) {
      for (size_t b = a + 1; b < na; ++b) pairs.emplace_back(a, b);
    }
    std::vector<double> tau(pairs.size());
    parallel_for(pairs.size(), [&](size_t p) {
      tau[p] = kendall_tau(streams[pairs[p].first], streams[pairs[p].second]);
    });
    std::vector<std::vector<double>> tm(na, std::vector<double>(na, 0.0));
    for (size_t p = 0; p < pairs.size(); ++p) {
      tm[pairs[p].first][pairs[p].second] = tau[p];
      tm[pairs[p].second][pairs[p].first] = tau[p];
    }

    // Center: max sum of |tau|, ties broken by variable name.
    size_t best = 0;
    double best_score = -1.0;
    for (size_t a = 0; a < na; ++a) {
      double s = 0.0;
      for (size_t b = 0; b < na; ++b) s += std::fabs(tm[a][b]);
      bool better = s > best_score ||
                    (s == best_score && u.names[active[a]] < u.names[active[best]]);
      if (better) {
        best_score = s;
        best = a;
      }
    }
    const int center = active[best];

    if (trace) {
      CvineLevel lv;
      lv.center = center;
      lv.conditioning = centers;
      lv.score = best_score;
      for (size_t b = 0; b < na; ++b) {
        if (b != best) lv.neighbor_taus.emplace_back(active[b], tm[best][b]);
      }
      trace->levels.push_back(std::move(lv));
    }

    // Fit the star edges and condition every other variable on the center.
    std::vector<size_t> others;
    for (size_t b = 0; b < na; ++b) {
      if (b != best) others.push_back(b);
    }
    std::vector<VineEdge> tree(others.size());
    std::vector<std::vector<double>> next_streams(others.size());
    bool truncate = settings.trunc_level > 0 && level > settings.trunc_level;
    parallel_for(others.size(), [&](size_t oi) {
      size_t b = others[oi];
      int other = active[b];
      VineEdge e;
      e.j = std::min(center, other);
      e.k = std::max(center, other);
      e.cond = centers;
      std::sort(e.cond.begin(), e.cond.end());
      e.level = level;
      e.weight = std::fabs(tm[best][b]);
      const auto& sj = (e.j == center) ? streams[best] : streams[b];
      const auto& sk = (e.k == center) ? streams[best] : streams[b];
      if (truncate) {
        e.spec = independence_spec(sj.size(), tm[best][b], true);
      } else {
        try {
          e.spec = select_family(sj, sk, settings.families, settings.criterion);
        } catch (const std::exception&) {
          e.spec = independence_spec(sj.size(), tm[best][b], false);
        }
      }
      // u_{other | centers + center} = h(u_other | u_center).
      std::vector<double> ns(sj.size());
      const auto& target = (e.j == other) ? sj : sk;
      const auto& given = (e.j == center) ? sj : sk;
      CondVar cond = (e.j == center) ? CondVar::first : CondVar::second;
      for (size_t r = 0; r < ns.size(); ++r) {
        ns[r] = bicop_hfunc(e.spec, target[r], given[r], cond);
      }
      next_streams[oi] = std::move(ns);
      tree[oi] = std::move(e);
    });

    // Deterministic order inside the tree: by canonical label.
    std::vector<size_t> perm(tree.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](size_t a, size_t b) {
      return label_of(u.names, tree[a].j, tree[a].k, tree[a].cond) <
             label_of(u.names, tree[b].j, tree[b].k, tree[b].cond);
    });
    std::vector<VineEdge> tree_sorted;
    std::vector<int> next_active;
    std::vector<std::vector<double>> sorted_streams;
    for (size_t p : perm) {
      tree_sorted.push_back(std::move(tree[p]));
      next_active.push_back(active[others[p]]);
      sorted_streams.push_back(std::move(next_streams[p]));
    }
    vs.trees.push_back(std::move(tree_sorted));
    centers.push_back(center);
    active = std::move(next_active);
    streams = std::move(sorted_streams);
  }
  return vs;
}

StructureDiagnostics validate_structure(const VineStructure& s) {
  StructureDiagnostics diag;
  auto fail = [&](const std::string& msg) {
    diag.ok = false;
    diag.violations.push_back(msg);
  };

  const int d = s.d;
  if (d < 1) {
    fail("dimension must be >= 1");
    return diag;
  }
  if (static_cast<int>(s.trees.size()) != std::max(d - 1, 0)) {
    fail("expected " + std::to_string(d - 1) + " trees, found " +
         std::to_string(s.trees.size()));
    return diag;
  }

  auto edge_name = [&](const VineEdge& e) {
    return label_of(s.names, e.j, e.k, e.cond);
  };

  // Constraint sets of the previous tree, keyed canonically.
  std::map<std::vector<int>, int> prev_sets;  // constraint -> node id
  for (int m = 1; m <= static_cast<int>(s.trees.size()); ++m) {
    const auto& tree = s.trees[m - 1];
    if (static_cast<int>(tree.size()) != d - m) {
      fail("tree " + std::to_string(m) + " has " + std::to_string(tree.size()) +
           " edges, expected " + std::to_string(d - m));
      return diag;
    }
    size_t n_nodes = (m == 1) ? static_cast<size_t>(d) : prev_sets.size();
    UnionFind uf(n_nodes);
    std::map<std::vector<int>, int> cur_sets;
    for (const auto& e : tree) {
      if (e.j >= e.k) fail("edge " + edge_name(e) + ": conditioned pair not ordered");
      if (e.j < 0 || e.k >= d) fail("edge " + edge_name(e) + ": variable out of range");
      if (static_cast<int>(e.cond.size()) != m - 1) {
        fail("edge " + edge_name(e) + ": conditioning set size " +
             std::to_string(e.cond.size()) + " at level " + std::to_string(m));
      }
      for (int c : e.cond) {
        if (c == e.j || c == e.k) {
          fail("edge " + edge_name(e) + ": conditioned variable inside conditioning set");
        }
      }
      if (e.level != m) fail("edge " + edge_name(e) + ": level mismatch");

      if (m == 1) {
        if (!uf.unite(e.j, e.k)) fail("tree 1 has a cycle at edge " + edge_name(e));
      } else {
        // Proximity: the constraint set must split into two previous-tree
        // constraint sets overlapping in exactly the conditioning set.
        auto full = e.constraint();
        int pa = -1, pb = -1;
        for (const auto& [set_a, id_a] : prev_sets) {
          if (!std::includes(full.begin(), full.end(), set_a.begin(), set_a.end())) continue;
          for (const auto& [set_b, id_b] : prev_sets) {
            if (id_b <= id_a) continue;
            if (!std::includes(full.begin(), full.end(), set_b.begin(), set_b.end())) continue;
            std::vector<int> uni;
            std::set_union(set_a.begin(), set_a.end(), set_b.begin(), set_b.end(),
                           std::back_inserter(uni));
            if (uni == full) {
              std::vector<int> inter;
              std::set_intersection(set_a.begin(), set_a.end(), set_b.begin(),
                                    set_b.end(), std::back_inserter(inter));
              if (inter == e.cond) {
                pa = id_a;
                pb = id_b;
                break;
              }
            }
          }
          if (pa >= 0) break;
        }
        if (pa < 0) {
          fail("edge " + edge_name(e) + " violates the proximity condition");
        } else if (!uf.unite(pa, pb)) {
          fail("tree " + std::to_string(m) + " has a cycle at edge " + edge_name(e));
        }
      }
      cur_sets.emplace(e.constraint(), static_cast<int>(cur_sets.size()));
    }
    if (cur_sets.size() != tree.size()) {
      fail("tree " + std::to_string(m) + " repeats an edge");
    }

    if (s.kind == VineKind::cvine && !tree.empty()) {
      // Star shape: one variable appears in every conditioned pair.
      bool star = false;
      for (int v : {tree[0].j, tree[0].k}) {
        bool all = true;
        for (const auto& e : tree) {
          if (e.j != v && e.k != v) {
            all = false;
            break;
          }
        }
        if (all && static_cast<int>(tree.size()) == d - m) star = true;
      }
      if (!star) fail("tree " + std::to_string(m) + " is not a star (C-vine)");
    }
    if (s.kind == VineKind::dvine && m == 1) {
      std::vector<int> deg(d, 0);
      for (const auto& e : tree) {
        ++deg[e.j];
        ++deg[e.k];
      }
      for (int v = 0; v < d; ++v) {
        if (deg[v] > 2) fail("first tree degree of " + s.names[v] + " exceeds 2 (D-vine)");
      }
    }
    prev_sets = std::move(cur_sets);
  }
  return diag;
}

json VineStructure::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  j["d"] = d;
  j["names"] = names;
  json trees_j = json::array();
  for (const auto& tree : trees) {
    json tj = json::array();
    for (const auto& e : tree) {
      json ej = e.spec.to_json();
      ej["conditioned"] = {e.j, e.k};
      ej["conditioning"] = e.cond;
      ej["weight"] = e.weight;
      tj.push_back(std::move(ej));
    }
    trees_j.push_back(std::move(tj));
  }
  j["trees"] = std::move(trees_j);
  return j;
}

VineStructure VineStructure::from_json(const json& j) {
  VineStructure s;
  s.kind = vine_kind_from_string(j.at("kind").get<std::string>());
  s.d = j.at("d").get<int>();
  s.names = j.at("names").get<std::vector<std::string>>();
  int level = 1;
  for (const auto& tj : j.at("trees")) {
    std::vector<VineEdge> tree;
    for (const auto& ej : tj) {
      VineEdge e;
      e.spec = BicopSpec::from_json(ej);
      auto cp = ej.at("conditioned").get<std::vector<int>>();
      if (cp.size() != 2) throw DataError("conditioned pair must have 2 entries");
      e.j = cp[0];
      e.k = cp[1];
      e.cond = ej.at("conditioning").get<std::vector<int>>();
      std::sort(e.cond.begin(), e.cond.end());
      e.weight = ej.value("weight", 0.0);
      e.level = level;
      tree.push_back(std::move(e));
    }
    s.trees.push_back(std::move(tree));
    ++level;
  }
  return s;
}

std::string VineStructure::to_dot(size_t tree_index) const {
  if (tree_index >= trees.size()) throw DataError("tree index out of range");
  const auto& tree = trees[tree_index];

  // Nodes of tree m are the edges of tree m-1.  For an edge (j,k|D) at
  // level m >= 2, each endpoint node is the unique previous-tree edge whose
  // conditioned pair contains the respective conditioned variable and whose
  // constraint set lies inside {j,k} U D.
  auto parent_label = [&](const VineEdge& e, int var) -> std::string {
    if (tree_index == 0) return names[var];
    auto full = e.constraint();
    for (const auto& p : trees[tree_index - 1]) {
      if (p.j != var && p.k != var) continue;
      auto pc = p.constraint();
      if (std::includes(full.begin(), full.end(), pc.begin(), pc.end())) {
        return label_of(names, p.j, p.k, p.cond);
      }
    }
    return names[var];
  };

  std::string out = "graph tree" + std::to_string(tree_index + 1) + " {\n";
  out += "  node [shape=ellipse];\n";
  char buf[64];
  for (const auto& e : tree) {
    std::snprintf(buf, sizeof(buf), "%.3f", e.spec.tau);
    out += "  \"" + parent_label(e, e.j) + "\" -- \"" + parent_label(e, e.k) +
           "\" [label=\"" + family_name(e.spec.family.tag) + ", tau=" + buf + "\"];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace vinedep
