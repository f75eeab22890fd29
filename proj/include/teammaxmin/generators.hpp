#pragma once

// Worst-case instance families and a random instance generator. Each
// constructor returns the game together with the facts known about it.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teammaxmin/game.hpp"

namespace tmm {

struct Fact {
  double value;
  std::string provenance;
};

struct NotableProfile {
  std::string name;
  TeamProfile team;
  std::optional<MixedStrategy> adversary;
  double expected_value;
  std::string provenance;
};

struct InstanceFacts {
  std::optional<Fact> known_team_maxmin;
  std::optional<Fact> known_correlated_value;
  std::optional<Fact> known_pou;
  std::vector<NotableProfile> notable_profiles;
  /// Optimal probabilities when they are known in closed form.
  std::vector<std::vector<double>> optimal_strategies;
};

struct GeneratedInstance {
  TeamGame game;
  InstanceFacts facts;
};

/// Three players, two actions each; U_T = 1 at (a0,a0,a0) and (a1,a1,a1).
/// Its pure equilibria give the team 0 while the team-maxmin value is 1/4.
GeneratedInstance poa_game();

/// n players with m actions each; U_T = 1 iff every player (adversary
/// included) picks the same action index.
GeneratedInstance diagonal_game(int n, int m);

/// Three players, two actions each; U_T = 1 iff both teammates match,
/// whatever the adversary does.
GeneratedInstance pou_one_game();

/// n - 1 teammates with m actions, an adversary with a single action;
/// U_T = 1 iff all teammates match.
GeneratedInstance coordination_game(int n, int m);

/// Three players, two actions each, whose team-maxmin value is 6 - 4 sqrt(2).
/// With fixed_sign = false the payoffs are negated, reproducing the version
/// in which pure team play already holds the adversary to 0.
GeneratedInstance irrational_game(bool fixed_sign);

/// i.i.d. payoffs uniform on [0,1), fully determined by `seed`.
TeamGame random_team_game(int n, int m, std::uint64_t seed);

/// Names accepted by make_family / the CLI.
std::vector<std::string> family_names();

struct FamilyParams {
  int n = 3;
  int m = 2;
  std::uint64_t seed = 1;
  bool fixed_sign = true;
};

/// Dispatches on the family name; throws InputError for unknown names.
GeneratedInstance make_family(const std::string& family, const FamilyParams& params);

}  // namespace tmm
