#include "teammaxmin/generators.hpp"

#include <cmath>

#include "teammaxmin/errors.hpp"
#include "teammaxmin/rng.hpp"

namespace tmm {

namespace {

std::size_t checked_size(int n, int m) {
  if (n < 2) throw StructuralError("need at least two players");
  if (m < 1) throw StructuralError("need at least one action per player");
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > kMaxTensorEntries / static_cast<std::size_t>(m)) {
      throw CapacityError("instance exceeds the dense tensor limit");
    }
    total *= static_cast<std::size_t>(m);
  }
  return total;
}

GameMetadata meta(std::string name, std::string generator,
                  std::map<std::string, double> params, std::string notes = {}) {
  GameMetadata md;
  md.name = std::move(name);
  md.generator = std::move(generator);
  md.params = std::move(params);
  md.notes = std::move(notes);
  return md;
}

TeamProfile pure_pair(const TeamGame& game, int a0, int a1) {
  const int actions[] = {a0, a1};
  return TeamProfile::pure(game, actions);
}

}  // namespace

GeneratedInstance poa_game() {
  std::vector<double> u(8, 0.0);
  u[0] = 1.0;  // (a0, a0, a0)
  u[7] = 1.0;  // (a1, a1, a1)
  TeamGame game({2, 2, 2}, std::move(u), meta("poa", "poa", {{"n", 3}, {"m", 2}}));

  InstanceFacts facts;
  facts.known_team_maxmin = Fact{0.25, "max_s min(s t, (1-s)(1-t)) attained at s = t = 1/2"};
  facts.known_correlated_value = Fact{0.5, "uniform over the two payoff-1 joint actions"};
  facts.known_pou = Fact{2.0, "0.5 / 0.25"};
  facts.notable_profiles.push_back(
      {"worst-nash-1", pure_pair(game, 1, 1), MixedStrategy::pure(2, 2, 0), 0.0,
       "no unilateral deviation changes the team payoff of 0"});
  facts.notable_profiles.push_back(
      {"worst-nash-2", pure_pair(game, 0, 0), MixedStrategy::pure(2, 2, 1), 0.0,
       "no unilateral deviation changes the team payoff of 0"});
  facts.notable_profiles.push_back({"all-uniform", TeamProfile::uniform(game),
                                    MixedStrategy::uniform(2, 2), 0.25,
                                    "every action earns 1/4 against uniform opponents"});
  facts.optimal_strategies = {{0.5, 0.5}, {0.5, 0.5}};
  return {std::move(game), std::move(facts)};
}

GeneratedInstance diagonal_game(int n, int m) {
  const std::size_t total = checked_size(n, m);
  std::vector<double> u(total, 0.0);
  // Index of (a, a, ..., a) is a * (m^{n-1} + ... + m + 1).
  std::size_t step = 0;
  for (int i = 0; i < n; ++i) step = step * static_cast<std::size_t>(m) + 1;
  for (int a = 0; a < m; ++a) u[static_cast<std::size_t>(a) * step] = 1.0;

  TeamGame game(std::vector<int>(static_cast<std::size_t>(n), m), std::move(u),
                meta("diagonal-n" + std::to_string(n) + "-m" + std::to_string(m), "diagonal",
                     {{"n", n}, {"m", m}}));
  const double md = m;
  InstanceFacts facts;
  facts.known_correlated_value = Fact{1.0 / md, "uniform over the m diagonal joint actions"};
  facts.known_team_maxmin =
      Fact{1.0 / std::pow(md, n - 1), "every member uniform: 1/m^(n-1)"};
  facts.known_pou = Fact{std::pow(md, n - 2), "(1/m) / (1/m^(n-1)) = m^(n-2)"};
  facts.notable_profiles.push_back({"all-uniform", TeamProfile::uniform(game), std::nullopt,
                                    1.0 / std::pow(md, n - 1), "closed form"});
  facts.optimal_strategies.assign(static_cast<std::size_t>(n - 1),
                                  std::vector<double>(static_cast<std::size_t>(m), 1.0 / md));
  return {std::move(game), std::move(facts)};
}

GeneratedInstance pou_one_game() {
  std::vector<double> u(8, 0.0);
  // Teammates match: (a0,a0,*) and (a1,a1,*).
  u[0] = u[1] = u[6] = u[7] = 1.0;
  TeamGame game({2, 2, 2}, std::move(u), meta("pou-one", "pou-one", {{"n", 3}, {"m", 2}}));
  InstanceFacts facts;
  facts.known_team_maxmin = Fact{1.0, "pure profile (a0, a0) earns 1 against any adversary"};
  facts.known_correlated_value = Fact{1.0, "payoffs never exceed 1"};
  facts.known_pou = Fact{1.0, "1 / 1"};
  facts.notable_profiles.push_back(
      {"pure-witness", pure_pair(game, 0, 0), std::nullopt, 1.0, "by construction"});
  facts.optimal_strategies = {{1.0, 0.0}, {1.0, 0.0}};
  return {std::move(game), std::move(facts)};
}

GeneratedInstance coordination_game(int n, int m) {
  checked_size(n - 1, m);
  std::vector<int> actions(static_cast<std::size_t>(n - 1), m);
  actions.push_back(1);
  std::size_t total = 1;
  for (int i = 0; i < n - 1; ++i) total *= static_cast<std::size_t>(m);
  std::vector<double> u(total, 0.0);
  std::size_t step = 0;
  for (int i = 0; i < n - 1; ++i) step = step * static_cast<std::size_t>(m) + 1;
  for (int a = 0; a < m; ++a) u[static_cast<std::size_t>(a) * step] = 1.0;

  TeamGame game(std::move(actions), std::move(u),
                meta("coordination-n" + std::to_string(n) + "-m" + std::to_string(m),
                     "coordination", {{"n", n}, {"m", m}}));
  const double md = m;
  InstanceFacts facts;
  facts.known_team_maxmin = Fact{1.0, "any pure diagonal profile"};
  facts.known_correlated_value = Fact{1.0, "payoffs never exceed 1"};
  facts.known_pou = Fact{1.0, "1 / 1"};
  facts.notable_profiles.push_back({"all-uniform", TeamProfile::uniform(game), std::nullopt,
                                    1.0 / std::pow(md, n - 2),
                                    "m matching outcomes of probability 1/m^(n-1) each"});
  facts.notable_profiles.push_back(
      {"pure-diagonal", TeamProfile::pure(game, 0), std::nullopt, 1.0, "by construction"});
  return {std::move(game), std::move(facts)};
}

GeneratedInstance irrational_game(bool fixed_sign) {
  const double sign = fixed_sign ? 1.0 : -1.0;
  std::vector<double> u(8, 0.0);
  u[0] = sign * 1.0;  // (a0, a0, a0)
  u[7] = sign * 2.0;  // (a1, a1, a1)
  TeamGame game({2, 2, 2}, std::move(u),
                meta(fixed_sign ? "irrational-fixed" : "irrational-flawed", "irrational",
                     {{"n", 3}, {"m", 2}, {"fixed_sign", fixed_sign ? 1.0 : 0.0}}));
  InstanceFacts facts;
  if (fixed_sign) {
    const double root = 2.0 - std::sqrt(2.0);
    facts.known_team_maxmin =
        Fact{6.0 - 4.0 * std::sqrt(2.0),
             "max_{s,t} min(s t, 2 (1-s)(1-t)) at s = t = 2 - sqrt(2), root of s^2 - 4s + 2"};
    facts.optimal_strategies = {{root, 1.0 - root}, {root, 1.0 - root}};
    TeamProfile optimum(
        {MixedStrategy(0, {root, 1.0 - root}), MixedStrategy(1, {root, 1.0 - root})});
    facts.notable_profiles.push_back(
        {"optimum", std::move(optimum), std::nullopt, 6.0 - 4.0 * std::sqrt(2.0), "closed form"});
  } else {
    facts.known_team_maxmin = Fact{0.0, "payoffs are <= 0 and mismatched pure play earns 0"};
    facts.notable_profiles.push_back(
        {"mismatch-01", pure_pair(game, 0, 1), std::nullopt, 0.0, "no payoff-bearing outcome"});
    facts.notable_profiles.push_back(
        {"mismatch-10", pure_pair(game, 1, 0), std::nullopt, 0.0, "no payoff-bearing outcome"});
  }
  return {std::move(game), std::move(facts)};
}

TeamGame random_team_game(int n, int m, std::uint64_t seed) {
  const std::size_t total = checked_size(n, m);
  Rng rng(seed);
  std::vector<double> u(total);
  for (double& x : u) x = rng.uniform01();
  GameMetadata md = meta("random-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" +
                             std::to_string(seed),
                         "random", {{"n", n}, {"m", m}},
                         "payoffs drawn i.i.d. uniform on [0,1) with mt19937_64; "
                         "no per-instance rescaling");
  md.seed = seed;
  return TeamGame(std::vector<int>(static_cast<std::size_t>(n), m), std::move(u), std::move(md));
}

std::vector<std::string> family_names() {
  return {"poa", "diagonal", "pou-one", "coordination", "irrational", "random"};
}

GeneratedInstance make_family(const std::string& family, const FamilyParams& p) {
  if (family == "poa") return poa_game();
  if (family == "diagonal") return diagonal_game(p.n, p.m);
  if (family == "pou-one") return pou_one_game();
  if (family == "coordination") return coordination_game(p.n, p.m);
  if (family == "irrational") return irrational_game(p.fixed_sign);
  if (family == "random") return {random_team_game(p.n, p.m, p.seed), InstanceFacts{}};
  throw InputError("unknown game family '" + family + "'");
}

}  // namespace tmm
