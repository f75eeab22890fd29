#include <algorithm>
#include <limits>

#include "teammaxmin/errors.hpp"
#include "teammaxmin/lp.hpp"
#include "teammaxmin/rng.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

namespace {

TeamProfile random_profile(const TeamGame& game, std::uint64_t seed, int restart) {
  Rng rng(seed, static_cast<std::uint64_t>(restart));
  std::vector<MixedStrategy> strategies;
  for (int i = 0; i < game.num_team_members(); ++i) {
    strategies.push_back(
        MixedStrategy::from_solver_values(i, rng.simplex_point(game.num_actions(i))));
  }
  return TeamProfile(std::move(strategies));
}

struct BestResponse {
  double value;
  MixedStrategy strategy;
};

BestResponse solve_member(const TeamGame& game, const TeamProfile& profile, int member) {
  const LinearProgram lp = build_best_response_lp(game, profile, member);
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal) {
    throw LpError(std::string("best-response LP reported ") + to_string(sol.status));
  }
  const auto m = static_cast<std::size_t>(game.num_actions(member));
  return {sol.values[m],
          MixedStrategy::from_solver_values(member, std::span<const double>(sol.values.data(), m))};
}

}  // namespace

double pure_upper_bound(const TeamGame& game) {
  const PayoffMatrix joint = to_joint_game(game);
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < joint.cols; ++c) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < joint.rows; ++r) best = std::max(best, joint(r, c));
    bound = std::min(bound, best);
  }
  return bound;
}

TeamProfile iterated_lp_start(const TeamGame& game, const IteratedLpOptions& options,
                              int restart) {
  if (const auto* r = std::get_if<RandomInit>(&options.init)) {
    return random_profile(game, r->seed, restart);
  }
  if (restart > 0) return random_profile(game, options.seed, restart);
  return std::visit(
      [&](const auto& init) -> TeamProfile {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, UniformInit>) {
          return TeamProfile::uniform(game);
        } else if constexpr (std::is_same_v<T, PureInit>) {
          return TeamProfile::pure(game, init.action);
        } else if constexpr (std::is_same_v<T, TeamProfile>) {
          return init;
        } else {
          return random_profile(game, init.seed, restart);
        }
      },
      options.init);
}

SolveReport iterated_lp(const TeamGame& game, const IteratedLpOptions& options) {
  if (options.restarts < 1) throw StructuralError("iterated LP needs at least one restart");
  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    options.timeout);
  auto timed_out = [&] { return std::chrono::steady_clock::now() >= deadline; };

  std::optional<SolveReport> best;
  std::int64_t rounds = 0;
  bool converged = true;
  std::vector<std::vector<double>> traces;

  for (int restart = 0; restart < options.restarts; ++restart) {
    if (restart > 0 && timed_out()) {
      converged = false;
      break;
    }
    TeamProfile current = iterated_lp_start(game, options, restart);
    double value = team_value(game, current).value;
    std::vector<double> trace{value};
    bool restart_converged = false;

    for (int round = 0; round < options.max_rounds; ++round) {
      if (timed_out()) break;
      ++rounds;
      std::optional<BestResponse> chosen;
      for (int member = 0; member < game.num_team_members(); ++member) {
        BestResponse br = solve_member(game, current, member);
        if (!chosen || br.value > chosen->value) chosen.emplace(std::move(br));
      }
      if (chosen->value <= value + options.improvement_tol) {
        restart_converged = true;
        break;
      }
      TeamProfile next = current.with(chosen->strategy);
      const double next_value = team_value(game, next).value;
      // An LP optimum that does not reproduce under exact evaluation is
      // treated as convergence rather than a step backwards.
      if (next_value <= value) {
        restart_converged = true;
        break;
      }
      current = std::move(next);
      value = next_value;
      trace.push_back(value);
    }
    if (!restart_converged) converged = false;
    traces.push_back(std::move(trace));
    if (!best || value > best->lower_bound) {
      best.emplace("iterated-lp", current);
      best->lower_bound = value;
    }
    best->restarts_used = restart + 1;
  }

  SolveReport report = std::move(*best);
  report.restarts_used = static_cast<int>(traces.size());
  report.iterations = rounds;
  report.converged = converged;
  report.traces = std::move(traces);
  double upper = pure_upper_bound(game);
  if (options.known_upper) upper = std::min(upper, *options.known_upper);
  report.upper_bound = std::max(upper, report.lower_bound);
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

}  // namespace tmm
