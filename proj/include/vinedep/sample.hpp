#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vinedep/vinefit.hpp"

// Synthetic draws from a fitted vine via the inverse Rosenblatt transform.
// The sampling order is derived from the structure alone (peeling the top
// tree), so a model loaded from JSON can be sampled without refitting.

namespace vinedep {

struct SampleBatch {
  size_t n = 0;
  size_t d = 0;
  std::vector<std::vector<double>> uniforms;    // column-major, entries in (0,1)
  std::vector<std::vector<double>> data_scale;  // empty unless requested
  uint64_t seed = 0;
  std::string generator;  // RNG identity, for reproducibility audits
};

// One variable of the sampling order with its h-inverse chain: the level-t
// edge pairs the variable with partner[t-1] given the earlier partners.
struct SamplerStep {
  int var = 0;
  std::vector<int> partners;
  std::vector<const VineEdge*> edges;
  std::vector<std::vector<int>> prefixes;  // sorted partner prefixes, size t
};

std::vector<SamplerStep> build_sampler_plan(const VineStructure& s);

SampleBatch sample_uniform(const FittedVine& fv, size_t n, uint64_t seed);
SampleBatch sample_data_scale(const FittedVine& fv, size_t n, uint64_t seed);

std::string batch_to_csv(const SampleBatch& batch, const std::vector<std::string>& names,
                         bool data_scale);

}  // namespace vinedep
