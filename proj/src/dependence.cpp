#include "vinedep/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "vinedep/errors.hpp"
#include "vinedep/parallel.hpp"

namespace vinedep {

namespace {

// Inversions of y under merge sort, counting strict descents only.
int64_t merge_count(std::vector<double>& y, std::vector<double>& tmp, size_t lo, size_t hi) {
  if (hi - lo < 2) return 0;
  size_t mid = lo + (hi - lo) / 2;
  int64_t inv = merge_count(y, tmp, lo, mid) + merge_count(y, tmp, mid, hi);
  size_t a = lo, b = mid, k = lo;
  while (a < mid && b < hi) {
    if (y[b] < y[a]) {
      inv += static_cast<int64_t>(mid - a);
      tmp[k++] = y[b++];
    } else {
      tmp[k++] = y[a++];
    }
  }
  while (a < mid) tmp[k++] = y[a++];
  while (b < hi) tmp[k++] = y[b++];
  std::copy(tmp.begin() + lo, tmp.begin() + hi, y.begin() + lo);
  return inv;
}

int64_t tie_pairs(const std::vector<double>& sorted) {
  int64_t total = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    int64_t run = static_cast<int64_t>(j - i);
    total += run * (run - 1) / 2;
    i = j;
  }
  return total;
}

}  // namespace

TauCounts kendall_counts(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("kendall: length mismatch");
  if (x.size() < 2) throw DataError("kendall: need at least 2 observations");
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) throw DataError("kendall: missing value");
  }
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t n0 = n * (n - 1) / 2;

  std::vector<size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    if (y[a] != y[b]) return y[a] < y[b];
    return a < b;
  });

  // Tie pairs in x and in (x, y) from runs of the lexicographic order.
  int64_t n1 = 0, n3 = 0;
  {
    size_t i = 0;
    while (i < idx.size()) {
      size_t j = i;
      while (j < idx.size() && x[idx[j]] == x[idx[i]]) ++j;
      int64_t run = static_cast<int64_t>(j - i);
      n1 += run * (run - 1) / 2;
      size_t a = i;
      while (a < j) {
        size_t b = a;
        while (b < j && y[idx[b]] == y[idx[a]]) ++b;
        int64_t r2 = static_cast<int64_t>(b - a);
        n3 += r2 * (r2 - 1) / 2;
        a = b;
      }
      i = j;
    }
  }

  int64_t n2;
  {
    std::vector<double> ys = y;
    std::sort(ys.begin(), ys.end());
    n2 = tie_pairs(ys);
  }

  // Discordant pairs = strict inversions of y in x-order (ties in x are
  // pre-sorted by y, so they contribute none).
  std::vector<double> yseq(x.size());
  for (size_t i = 0; i < idx.size(); ++i) yseq[i] = y[idx[i]];
  std::vector<double> tmp(yseq.size());
  int64_t discordant = merge_count(yseq, tmp, 0, yseq.size());

  TauCounts c;
  c.n = n;
  c.discordant = discordant;
  c.ties_both = n3;
  c.ties_x_only = n1 - n3;
  c.ties_y_only = n2 - n3;
  c.concordant = n0 - n1 - n2 + n3 - discordant;
  return c;
}

double tau_b_from_counts(const TauCounts& c) {
  const double dx = static_cast<double>(c.concordant + c.discordant + c.ties_x_only);
  const double dy = static_cast<double>(c.concordant + c.discordant + c.ties_y_only);
  if (dx <= 0.0 || dy <= 0.0) {
    throw NumericError("kendall tau undefined: constant input vector");
  }
  return static_cast<double>(c.concordant - c.discordant) / (std::sqrt(dx) * std::sqrt(dy));
}

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  return tau_b_from_counts(kendall_counts(x, y));
}

json TauMatrix::to_json() const {
  json j;
  j["names"] = names;
  j["tau"] = tau;
  return j;
}

std::string TauMatrix::to_csv() const {
  std::string out = "variable";
  for (const auto& n : names) {
    out += ',';
    out += n;
  }
  out += '\n';
  char buf[40];
  for (size_t i = 0; i < names.size(); ++i) {
    out += names[i];
    for (size_t j = 0; j < names.size(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.12g", tau[i][j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

TauMatrix tau_matrix(const PseudoObs& u) {
  const size_t d = u.d();
  if (d < 2) throw DataError("tau_matrix: need at least 2 variables");
  TauMatrix m;
  m.names = u.names;
  m.tau.assign(d, std::vector<double>(d, 1.0));

  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  std::vector<std::string> errors(pairs.size());
  parallel_for(pairs.size(), [&](size_t p) {
    auto [i, j] = pairs[p];
    try {
      double t = kendall_tau(u.cols[i], u.cols[j]);
      m.tau[i][j] = t;
      m.tau[j][i] = t;
    } catch (const std::exception& e) {
      errors[p] = std::string(e.what()) + " (pair " + u.names[i] + ", " + u.names[j] + ")";
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError(e);
  }
  return m;
}

}  // namespace vinedep
