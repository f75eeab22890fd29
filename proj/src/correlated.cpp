#include <algorithm>

#include "teammaxmin/errors.hpp"
#include "teammaxmin/lp.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

namespace {

std::vector<int> team_actions(const TeamGame& game) {
  auto all = game.actions_per_player();
  return {all.begin(), all.end() - 1};
}

}  // namespace

CorrelatedSolution correlated_team_maxmin(const TeamGame& game) {
  const PayoffMatrix matrix = to_joint_game(game);
  const LpSolution sol = solve_lp(build_maxmin_lp(matrix));
  if (sol.status != LpStatus::optimal) {
    throw LpError(std::string("correlated maxmin LP reported ") + to_string(sol.status));
  }
  std::span<const double> row_probs(sol.values.data(), matrix.rows);
  return {JointDistribution::from_solver_values(team_actions(game), row_probs),
          sol.values[matrix.rows]};
}

TeamProfile reconstruct_mixed(const JointDistribution& p, const TeamGame& game, int pivot) {
  const int k = game.num_team_members();
  if (pivot < 0 || pivot >= k) {
    throw StructuralError("pivot " + std::to_string(pivot) + " is not a team member");
  }
  const auto team = team_actions(game);
  if (!std::equal(team.begin(), team.end(), p.team_actions().begin(), p.team_actions().end())) {
    throw StructuralError("joint distribution does not match the team's action sets");
  }
  std::vector<MixedStrategy> strategies;
  for (int i = 0; i < k; ++i) {
    if (i == pivot) {
      strategies.push_back(MixedStrategy::from_solver_values(i, p.marginal(i)));
      continue;
    }
    const auto supp = p.support(i);
    if (supp.empty()) throw StructuralError("joint distribution with empty support");
    std::vector<double> probs(static_cast<std::size_t>(game.num_actions(i)), 0.0);
    for (int a : supp) {
      probs[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(supp.size());
    }
    strategies.emplace_back(i, std::move(probs));
  }
  return TeamProfile(std::move(strategies));
}

SolveReport reconstruct_best_pivot(const TeamGame& game) {
  const auto start = std::chrono::steady_clock::now();
  const CorrelatedSolution correlated = correlated_team_maxmin(game);

  std::optional<SolveReport> best;
  for (int pivot = 0; pivot < game.num_team_members(); ++pivot) {
    TeamProfile profile = reconstruct_mixed(correlated.distribution, game, pivot);
    const double value = team_value(game, profile).value;
    if (!best || value > best->lower_bound) {
      best.emplace("reconstruct", std::move(profile));
      best->lower_bound = value;
    }
  }
  best->upper_bound = std::max(correlated.value, best->lower_bound);
  best->iterations = game.num_team_members();
  best->wall_time = std::chrono::steady_clock::now() - start;
  return *best;
}

}  // namespace tmm
