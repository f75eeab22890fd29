#pragma once

// Internal helpers shared by the evaluators and enumerating solvers.

#include <cstddef>
#include <span>
#include <vector>

namespace tmm::detail {

/// Sums the outermost axis of a row-major tensor against `probs`.
inline std::vector<double> contract_outermost(std::span<const double> tensor,
                                              std::span<const double> probs) {
  const std::size_t inner = tensor.size() / probs.size();
  std::vector<double> out(inner, 0.0);
  for (std::size_t a = 0; a < probs.size(); ++a) {
    const double w = probs[a];
    if (w == 0.0) continue;
    const double* row = tensor.data() + a * inner;
    for (std::size_t r = 0; r < inner; ++r) out[r] += w * row[r];
  }
  return out;
}

/// First composition of `total` into counts.size() parts: (total, 0, ..., 0).
inline void first_composition(std::vector<int>& counts, int total) {
  std::fill(counts.begin(), counts.end(), 0);
  counts[0] = total;
}

/// Steps to the next composition in decreasing lexicographic order, which is
/// the order of nondecreasing action sequences read lexicographically.
/// Returns false after (0, ..., 0, total).
inline bool next_composition(std::vector<int>& counts) {
  const std::size_t m = counts.size();
  if (m < 2) return false;
  std::size_t j = m - 1;
  while (j-- > 0) {
    if (counts[j] > 0) break;
    if (j == 0) return false;
  }
  if (counts[j] == 0) return false;
  int tail = 0;
  for (std::size_t k = j + 1; k < m; ++k) {
    tail += counts[k];
    counts[k] = 0;
  }
  --counts[j];
  counts[j + 1] = tail + 1;
  return true;
}

}  // namespace tmm::detail
