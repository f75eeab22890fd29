#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "detail.hpp"
#include "teammaxmin/errors.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

namespace {

// Worst-case total-variation distance from a point of the m-simplex to the
// nearest point of the grid with denominator k (largest-remainder rounding).
double rounding_distance(int m, int k) {
  const double lo = std::floor(m / 2.0);
  const double hi = std::ceil(m / 2.0);
  return lo * hi / (static_cast<double>(m) * static_cast<double>(k));
}

std::uint64_t grid_points(int m, int k) {
  // C(k + m - 1, m - 1), saturating.
  unsigned __int128 acc = 1;
  const auto r = static_cast<std::uint64_t>(m - 1);
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (static_cast<std::uint64_t>(k) + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
  }
  return static_cast<std::uint64_t>(acc);
}

struct GridSearch {
  const TeamGame& game;
  const std::vector<int>& resolution;
  std::uint64_t evaluated = 0;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> best_counts;
  std::vector<std::vector<int>> counts;

  void visit(int member, const std::vector<double>& partial) {
    auto& c = counts[static_cast<std::size_t>(member)];
    const int k = resolution[static_cast<std::size_t>(member)];
    detail::first_composition(c, k);
    std::vector<double> probs(c.size());
    do {
      for (std::size_t a = 0; a < c.size(); ++a) {
        probs[a] = static_cast<double>(c[a]) / static_cast<double>(k);
      }
      const auto next = detail::contract_outermost(partial, probs);
      if (member + 1 < game.num_team_members()) {
        visit(member + 1, next);
      } else {
        ++evaluated;
        const double value = *std::min_element(next.begin(), next.end());
        if (value > best) {
          best = value;
          best_counts = counts;
        }
      }
    } while (detail::next_composition(c));
  }
};

}  // namespace

GridOracleResult grid_oracle(const TeamGame& game, double target_error,
                             const GridOracleOptions& options) {
  if (!(target_error > 0.0)) throw StructuralError("target error must be positive");
  const int team = game.num_team_members();
  const double range = game.max_payoff() - game.min_payoff();

  GridOracleResult result;
  double error = 0.0;
  unsigned __int128 total = 1;
  for (int i = 0; i < team; ++i) {
    const int m = game.num_actions(i);
    int k = 1;
    if (m > 1 && range > 0.0) {
      const double needed = team * range * rounding_distance(m, 1) / target_error;
      k = static_cast<int>(std::min(std::ceil(needed), 1e9));
      // Round up so that uniform strategies over up to four actions sit on
      // the grid.
      int step = 1;
      for (int d = 2; d <= std::min(m, 4); ++d) step = std::lcm(step, d);
      k = (k + step - 1) / step * step;
    }
    result.resolution.push_back(k);
    if (m > 1) error += range * rounding_distance(m, k);
    total *= grid_points(m, k);
    if (total > options.max_profiles) {
      throw CapacityError("grid oracle would evaluate more than " +
                          std::to_string(options.max_profiles) + " profiles");
    }
  }

  GridSearch search{game, result.resolution, 0, -std::numeric_limits<double>::infinity(), {}, {}};
  for (int i = 0; i < team; ++i) {
    search.counts.emplace_back(static_cast<std::size_t>(game.num_actions(i)), 0);
  }
  const std::vector<double> full(game.team_utility().begin(), game.team_utility().end());
  search.visit(0, full);

  std::vector<MixedStrategy> strategies;
  for (int i = 0; i < team; ++i) {
    std::vector<double> probs;
    const int k = result.resolution[static_cast<std::size_t>(i)];
    for (int c : search.best_counts[static_cast<std::size_t>(i)]) {
      probs.push_back(static_cast<double>(c) / static_cast<double>(k));
    }
    strategies.emplace_back(i, std::move(probs));
  }
  result.best_profile = TeamProfile(std::move(strategies));
  result.estimate = search.best;
  result.certified_error = error;
  result.profiles_evaluated = search.evaluated;
  return result;
}

}  // namespace tmm
