#pragma once

#include <cstddef>
#include <functional>

// Minimal index-space parallelism.  Work items write to preassigned slots,
// so results never depend on the thread count or interleaving.

namespace vinedep {

// Global worker count used by parallel_for (CLI --threads).  0 = hardware.
void set_thread_count(int n);
int thread_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace vinedep
