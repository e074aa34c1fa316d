#include "vinedep/sample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vinedep/errors.hpp"
#include "vinedep/parallel.hpp"
#include "vinedep/rng.hpp"

namespace vinedep {

namespace {

std::vector<int> sorted_union(std::vector<int> a, int extra) {
  a.push_back(extra);
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

std::vector<SamplerStep> build_sampler_plan(const VineStructure& s) {
  const int d = s.d;
  if (d < 1) throw DataError("sampler: empty structure");

  // Mutable copy of the edge sets; peeling removes one edge per level.
  std::vector<std::vector<const VineEdge*>> remaining(s.trees.size());
  for (size_t m = 0; m < s.trees.size(); ++m) {
    for (const auto& e : s.trees[m]) remaining[m].push_back(&e);
  }

  std::vector<SamplerStep> reversed;
  int top = static_cast<int>(s.trees.size());  // current top level (1-based)
  std::vector<char> removed_var(static_cast<size_t>(d), 0);

  while (top >= 1) {
    if (remaining[static_cast<size_t>(top - 1)].size() != 1) {
      throw NumericError("sampler: top tree does not reduce to a single edge");
    }
    const VineEdge* top_edge = remaining[static_cast<size_t>(top - 1)].front();
    int v = std::max(top_edge->j, top_edge->k);  // deterministic peel choice

    SamplerStep step;
    step.var = v;
    for (int t = 1; t <= top; ++t) {
      auto& level = remaining[static_cast<size_t>(t - 1)];
      const VineEdge* found = nullptr;
      size_t found_at = 0;
      for (size_t i = 0; i < level.size(); ++i) {
        if (level[i]->j == v || level[i]->k == v) {
          if (found) {
            throw NumericError("sampler: variable appears twice at one level; "
                               "structure is not a regular vine");
          }
          found = level[i];
          found_at = i;
        }
      }
      if (!found) {
        throw NumericError("sampler: missing edge for peeled variable");
      }
      int partner = found->j == v ? found->k : found->j;
      // The regular-vine chain property: the level-t conditioning set is
      // exactly the earlier partners.
      std::vector<int> expect(step.partners.begin(), step.partners.end());
      std::sort(expect.begin(), expect.end());
      if (found->cond != expect) {
        throw NumericError("sampler: conditioning sets do not chain; "
                           "structure is not a regular vine");
      }
      step.partners.push_back(partner);
      step.edges.push_back(found);
      step.prefixes.push_back(sorted_union(expect, partner));
      level.erase(level.begin() + static_cast<std::ptrdiff_t>(found_at));
    }
    removed_var[static_cast<size_t>(v)] = 1;
    reversed.push_back(std::move(step));
    --top;
  }

  // The untouched variable is drawn first, unconditionally.
  std::vector<SamplerStep> plan;
  for (int v = 0; v < d; ++v) {
    if (!removed_var[static_cast<size_t>(v)]) {
      SamplerStep first;
      first.var = v;
      plan.push_back(std::move(first));
    }
  }
  if (plan.size() != 1) {
    throw NumericError("sampler: peeling did not leave exactly one root variable");
  }
  for (auto it = reversed.rbegin(); it != reversed.rend(); ++it) plan.push_back(*it);
  return plan;
}

SampleBatch sample_uniform(const FittedVine& fv, size_t n, uint64_t seed) {
  const int d = fv.structure.d;
  auto plan = build_sampler_plan(fv.structure);
  EdgeIndex index(fv.structure);

  SampleBatch batch;
  batch.n = n;
  batch.d = static_cast<size_t>(d);
  batch.seed = seed;
  batch.generator = rng::kGeneratorId;
  batch.uniforms.assign(static_cast<size_t>(d), std::vector<double>(n));

  parallel_for(n, [&](size_t r) {
    RowConditional rc(index, std::vector<double>(static_cast<size_t>(d), 0.5));
    for (size_t s = 0; s < plan.size(); ++s) {
      const SamplerStep& step = plan[s];
      double x = rng::u01(seed, r + 1, s);
      const size_t m = step.partners.size();
      for (size_t t = m; t >= 1; --t) {
        const VineEdge* e = step.edges[t - 1];
        // Value of u_{var | first t partners} before inverting level t.
        rc.put(step.var, step.prefixes[t - 1], x);
        double given = rc.cond(step.partners[t - 1], e->cond);
        x = (step.var == e->j) ? bicop_hinv(e->spec, x, given, CondVar::second)
                               : bicop_hinv(e->spec, x, given, CondVar::first);
      }
      rc.set_base(step.var, x);
      batch.uniforms[static_cast<size_t>(step.var)][r] = x;
    }
  });
  return batch;
}

SampleBatch sample_data_scale(const FittedVine& fv, size_t n, uint64_t seed) {
  if (fv.marginals.size() != static_cast<size_t>(fv.structure.d)) {
    throw DataError("sample_data_scale: the model carries no marginal models");
  }
  SampleBatch batch = sample_uniform(fv, n, seed);
  batch.data_scale.resize(batch.uniforms.size());
  for (size_t c = 0; c < batch.uniforms.size(); ++c) {
    batch.data_scale[c] = inverse_pit(batch.uniforms[c], fv.marginals[c]);
  }
  return batch;
}

std::string batch_to_csv(const SampleBatch& batch, const std::vector<std::string>& names,
                         bool data_scale) {
  const auto& mat = data_scale ? batch.data_scale : batch.uniforms;
  if (mat.empty()) throw DataError("batch_to_csv: requested scale not present");
  std::string out;
  for (size_t c = 0; c < names.size(); ++c) {
    if (c) out += ',';
    out += names[c];
  }
  out += '\n';
  char buf[40];
  for (size_t r = 0; r < batch.n; ++r) {
    for (size_t c = 0; c < mat.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof(buf), "%.12g", mat[c][r]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace vinedep
