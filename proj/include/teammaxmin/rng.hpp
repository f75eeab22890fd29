#pragma once

// Reproducible randomness. std::mt19937_64 and std::seed_seq have output
// sequences fixed by the C++ standard; the distributions below are written
// out by hand because the standard library's are implementation-defined.

#include <cstdint>
#include <random>
#include <vector>

namespace tmm {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Independent stream `stream` of a master seed (e.g. one per restart).
  Rng(std::uint64_t master_seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Flat Dirichlet(1, ..., 1) draw, i.e. uniform on the simplex.
  std::vector<double> simplex_point(int dimension);

 private:
  std::mt19937_64 engine_;
};

}  // namespace tmm
