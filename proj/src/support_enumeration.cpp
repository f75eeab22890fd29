#include <algorithm>
#include <cmath>
#include <limits>

#include "detail.hpp"
#include "teammaxmin/errors.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

EnumerationParams EnumerationParams::make(double epsilon, int max_team_actions) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw StructuralError("epsilon must lie in (0, 1]");
  }
  if (max_team_actions < 1) throw StructuralError("action count must be >= 1");
  const double raw = std::log(static_cast<double>(max_team_actions)) / (2.0 * epsilon * epsilon);
  return {epsilon, std::max(1, static_cast<int>(std::ceil(raw)))};
}

namespace {

// C(n, k) or nullopt on 64-bit overflow.
std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(acc);
}

double log2_binomial(double n, double k) {
  return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
}

struct Enumerator {
  const TeamGame& game;
  int gamma;
  std::optional<std::uint64_t> budget;

  std::uint64_t visited = 0;
  bool exhausted_budget = false;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> best_counts;
  std::vector<std::vector<int>> counts;

  // Depth-first over members; `partial` is the tensor with members < member
  // already contracted.
  void visit(int member, const std::vector<double>& partial) {
    auto& c = counts[static_cast<std::size_t>(member)];
    detail::first_composition(c, gamma);
    std::vector<double> probs(c.size());
    do {
      if (budget && visited >= *budget) {
        exhausted_budget = true;
        return;
      }
      for (std::size_t a = 0; a < c.size(); ++a) {
        probs[a] = static_cast<double>(c[a]) / static_cast<double>(gamma);
      }
      const auto next = detail::contract_outermost(partial, probs);
      if (member + 1 < game.num_team_members()) {
        visit(member + 1, next);
        if (exhausted_budget) return;
      } else {
        ++visited;
        const double value = *std::min_element(next.begin(), next.end());
        if (value > best_value) {
          best_value = value;
          best_counts = counts;
        }
      }
    } while (detail::next_composition(c));
  }
};

}  // namespace

std::optional<std::uint64_t> support_enumeration_candidates(const TeamGame& game, double epsilon) {
  const auto params = EnumerationParams::make(epsilon, game.max_team_actions());
  const auto g = static_cast<std::uint64_t>(params.gamma);
  unsigned __int128 total = 1;
  for (int i = 0; i < game.num_team_members(); ++i) {
    const auto per = binomial(static_cast<std::uint64_t>(game.num_actions(i)) + g - 1, g);
    if (!per) return std::nullopt;
    total *= *per;
    if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(total);
}

double support_enumeration_log2_candidates(int m, int team_size, double epsilon) {
  const auto params = EnumerationParams::make(epsilon, m);
  return team_size * log2_binomial(m + params.gamma - 1.0, params.gamma);
}

SolveReport support_enumeration(const TeamGame& game, double epsilon,
                                const SupportEnumerationOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (!game.payoffs_in_unit_interval()) {
    throw StructuralError("support enumeration requires payoffs in [0,1]; normalize first");
  }
  const auto params = EnumerationParams::make(epsilon, game.max_team_actions());

  Enumerator e{game, params.gamma, options.budget, 0, false,
               -std::numeric_limits<double>::infinity(), {}, {}};
  for (int i = 0; i < game.num_team_members(); ++i) {
    e.counts.emplace_back(static_cast<std::size_t>(game.num_actions(i)), 0);
  }
  const std::vector<double> full(game.team_utility().begin(), game.team_utility().end());
  e.visit(0, full);

  std::vector<MixedStrategy> strategies;
  if (e.best_counts.empty()) {
    // Zero budget: nothing was evaluated, fall back to the first candidate.
    for (int i = 0; i < game.num_team_members(); ++i) {
      strategies.push_back(MixedStrategy::pure(i, game.num_actions(i), 0));
    }
  } else {
    for (int i = 0; i < game.num_team_members(); ++i) {
      std::vector<double> probs;
      for (int c : e.best_counts[static_cast<std::size_t>(i)]) {
        probs.push_back(static_cast<double>(c) / static_cast<double>(params.gamma));
      }
      strategies.emplace_back(i, std::move(probs));
    }
  }
  SolveReport report("support-enum", TeamProfile(std::move(strategies)));
  report.lower_bound = team_value(game, report.witness).value;
  report.upper_bound = std::min(1.0, options.known_upper.value_or(1.0));
  report.upper_bound = std::max(report.upper_bound, report.lower_bound);
  report.iterations = static_cast<std::int64_t>(e.visited);
  report.converged = !e.exhausted_budget;
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

}  // namespace tmm
