#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "teammaxmin/game.hpp"

namespace tmm {

using Seconds = std::chrono::duration<double>;

/// Sixty minutes, the per-instance budget of the reference protocol.
inline constexpr Seconds kDefaultTimeout{3600.0};

/// Result of any team-maxmin solver. `lower_bound` is the team value of
/// `witness`; `upper_bound` is a valid bound on the team-maxmin value.
struct SolveReport {
  SolveReport(std::string solver_name, TeamProfile witness_profile)
      : solver(std::move(solver_name)), witness(std::move(witness_profile)) {}

  std::string solver;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  TeamProfile witness;
  std::int64_t iterations = 0;
  int restarts_used = 0;
  Seconds wall_time{0.0};
  bool converged = true;
  /// Iterated LP only: team value after every round, one vector per restart.
  std::vector<std::vector<double>> traces;
};

// ---------------------------------------------------------------------------
// Correlated team and reconstruction

struct CorrelatedSolution {
  JointDistribution distribution;
  double value;
};

/// Exact maxmin of the joint-action matrix. Throws CapacityError when the
/// joint game cannot be materialized.
CorrelatedSolution correlated_team_maxmin(const TeamGame& game);

/// Pivot keeps its marginal under p; every other member plays uniformly over
/// its support under p.
TeamProfile reconstruct_mixed(const JointDistribution& p, const TeamGame& game, int pivot);

/// One correlated LP, one reconstruction per pivot, best kept (ties: lowest
/// pivot). upper_bound is the correlated value.
SolveReport reconstruct_best_pivot(const TeamGame& game);

// ---------------------------------------------------------------------------
// Support enumeration over simple (multiset-uniform) strategies

struct EnumerationParams {
  double epsilon;
  int gamma;

  /// gamma = ceil(ln(m) / (2 eps^2)), at least 1.
  static EnumerationParams make(double epsilon, int max_team_actions);
};

struct SupportEnumerationOptions {
  /// Stop after this many candidate profiles (report flagged not converged).
  std::optional<std::uint64_t> budget;
  std::optional<double> known_upper;
};

/// Number of candidate profiles, prod_i C(m_i + gamma - 1, gamma); nullopt if
/// it does not fit in 64 bits.
std::optional<std::uint64_t> support_enumeration_candidates(const TeamGame& game, double epsilon);

/// log2 of C(m + gamma - 1, gamma)^team_size for the homogeneous case.
double support_enumeration_log2_candidates(int m, int team_size, double epsilon);

/// Requires payoffs in [0,1]. `iterations` counts the candidates evaluated.
SolveReport support_enumeration(const TeamGame& game, double epsilon,
                                const SupportEnumerationOptions& options = {});

// ---------------------------------------------------------------------------
// Iterated LP

struct UniformInit {};
struct PureInit {
  int action = 0;
};
/// Every restart draws each member's strategy uniformly from its simplex.
struct RandomInit {
  std::uint64_t seed = 1;
};
using IteratedLpInit = std::variant<UniformInit, PureInit, RandomInit, TeamProfile>;

struct IteratedLpOptions {
  /// Start of the first restart. Later restarts are random draws seeded from
  /// `seed` (or from the RandomInit seed).
  IteratedLpInit init = UniformInit{};
  int restarts = 1;
  Seconds timeout = kDefaultTimeout;
  std::uint64_t seed = 1;
  int max_rounds = 1000;
  double improvement_tol = 1e-9;
  std::optional<double> known_upper;
};

SolveReport iterated_lp(const TeamGame& game, const IteratedLpOptions& options = {});

/// The initial profile used by restart `restart` under `options`.
TeamProfile iterated_lp_start(const TeamGame& game, const IteratedLpOptions& options, int restart);

/// Cheap valid upper bound on the team-maxmin value: min over adversary
/// actions of the best pure team payoff.
double pure_upper_bound(const TeamGame& game);

// ---------------------------------------------------------------------------
// Anytime global optimization

struct GlobalOptions {
  double accuracy = 1e-6;
  Seconds budget = kDefaultTimeout;
  int iterated_restarts = 10;
  std::uint64_t seed = 1;
  bool refine = true;
  /// Node cap for the box refinement; keeps runs reproducible regardless of
  /// machine speed.
  std::int64_t max_nodes = 20000;
  /// Boxes narrower than this in every coordinate are not split further.
  double min_box_width = 1e-9;
};

SolveReport global_optimize(const TeamGame& game, const GlobalOptions& options = {});

// ---------------------------------------------------------------------------
// Brute-force grid oracle

struct GridOracleOptions {
  std::uint64_t max_profiles = 200'000'000;
};

struct GridOracleResult {
  /// Best team value over the grid: a lower bound on the team-maxmin value.
  double estimate = 0.0;
  /// The team-maxmin value lies in [estimate, estimate + certified_error].
  double certified_error = 0.0;
  std::vector<int> resolution;  // grid denominators, one per team member
  std::uint64_t profiles_evaluated = 0;
  std::optional<TeamProfile> best_profile;
};

/// Enumerates every team profile whose probabilities are multiples of
/// 1/resolution_i. Rounding any strategy onto that grid moves it by at most
/// floor(m/2) ceil(m/2) / (m K) in total variation, and the team value is
/// Lipschitz in each member's strategy with the payoff range as constant.
/// Throws CapacityError beyond options.max_profiles.
GridOracleResult grid_oracle(const TeamGame& game, double target_error,
                             const GridOracleOptions& options = {});

}  // namespace tmm
