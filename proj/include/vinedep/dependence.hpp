#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vinedep/json_io.hpp"
#include "vinedep/margins.hpp"

// Kendall's tau-b with tie correction.  Pair counts come from Knight's
// O(n log n) merge-sort algorithm and are exact integers, so the fast path
// can be checked against brute-force enumeration bit for bit.

namespace vinedep {

struct TauCounts {
  int64_t concordant = 0;
  int64_t discordant = 0;
  int64_t ties_x_only = 0;
  int64_t ties_y_only = 0;
  int64_t ties_both = 0;
  int64_t n = 0;

  bool operator==(const TauCounts&) const = default;
};

TauCounts kendall_counts(const std::vector<double>& x, const std::vector<double>& y);

// tau-b = (C - D) / sqrt((C + D + Tx)(C + D + Ty)).  Throws NumericError
// when either input is constant (the denominator vanishes).
double tau_b_from_counts(const TauCounts& c);
double kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

struct TauMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> tau;  // d x d, symmetric, unit diagonal

  double at(size_t i, size_t j) const { return tau[i][j]; }
  size_t d() const { return names.size(); }

  json to_json() const;
  std::string to_csv() const;
};

TauMatrix tau_matrix(const PseudoObs& u);

}  // namespace vinedep
