#include "teammaxmin/rng.hpp"

#include <cmath>

namespace tmm {

namespace {

std::mt19937_64 seeded(std::uint64_t master, std::uint64_t stream, bool with_stream) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(master),
                                   static_cast<std::uint32_t>(master >> 32)};
  if (with_stream) {
    words.push_back(static_cast<std::uint32_t>(stream));
    words.push_back(static_cast<std::uint32_t>(stream >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded(seed, 0, false)) {}

Rng::Rng(std::uint64_t master_seed, std::uint64_t stream)
    : engine_(seeded(master_seed, stream, true)) {}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<double> Rng::simplex_point(int dimension) {
  std::vector<double> out(static_cast<std::size_t>(dimension));
  double sum = 0.0;
  for (double& x : out) {
    // Exponential(1) spacings; 1 - u lies in (0, 1].
    x = -std::log(1.0 - uniform01());
    sum += x;
  }
  if (sum <= 0.0) {
    // Every draw hit u == 0 exactly; fall back to the barycenter.
    for (double& x : out) x = 1.0 / static_cast<double>(dimension);
    return out;
  }
  for (double& x : out) x /= sum;
  return out;
}

}  // namespace tmm
