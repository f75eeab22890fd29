#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "teammaxmin/errors.hpp"
#include "teammaxmin/generators.hpp"
#include "teammaxmin/solvers.hpp"

using namespace tmm;

TEST_CASE("price-of-anarchy game") {
  const auto inst = poa_game();
  const auto& g = inst.game;
  CHECK(g.num_players() == 3);
  for (std::size_t i = 0; i < g.num_outcomes(); ++i) {
    CHECK(g.team_utility()[i] == ((i == 0 || i == 7) ? 1.0 : 0.0));
  }
  CHECK(inst.facts.known_team_maxmin->value == 0.25);
  CHECK(inst.facts.known_correlated_value->value == 0.5);
  REQUIRE(inst.facts.notable_profiles.size() == 3);
  for (const auto& np : inst.facts.notable_profiles) {
    auto all = oracle::as_vectors(np.team);
    all.push_back(np.adversary ? std::vector<double>(np.adversary->probs().begin(),
                                                     np.adversary->probs().end())
                               : oracle::uniform(2));
    CHECK(oracle::expected(g, all) == doctest::Approx(np.expected_value));
    for (int p = 0; p < 3; ++p) CHECK(oracle::deviation_gain(g, all, p) <= 1e-12);
  }
}

TEST_CASE("diagonal game") {
  for (auto [n, m] : {std::pair{3, 2}, {3, 3}, {3, 4}, {4, 2}, {2, 3}}) {
    const auto inst = diagonal_game(n, m);
    const auto& g = inst.game;
    CHECK(g.num_outcomes() == static_cast<std::size_t>(std::pow(m, n)));
    oracle::for_each_outcome(oracle::sizes_of(g), [&](const std::vector<int>& a) {
      bool same = true;
      for (int x : a) same = same && x == a[0];
      CHECK(g.utility_at(a) == (same ? 1.0 : 0.0));
    });
    CHECK(correlated_team_maxmin(g).value ==
          doctest::Approx(inst.facts.known_correlated_value->value).epsilon(1e-9));
    CHECK(inst.facts.known_team_maxmin->value == doctest::Approx(std::pow(m, 1 - n)));
    CHECK(inst.facts.known_pou->value == doctest::Approx(std::pow(m, n - 2)));
  }
  CHECK_THROWS_AS(diagonal_game(1, 2), StructuralError);
}

TEST_CASE("unit price-of-uncorrelation and coordination games") {
  const auto one = pou_one_game();
  CHECK(one.facts.known_pou->value == 1.0);
  CHECK(one.facts.known_team_maxmin->value == 1.0);
  const auto coord = coordination_game(3, 3);
  CHECK(coord.game.adversary_actions() == 1);
  CHECK(coord.game.num_outcomes() == 9);
  CHECK(coord.facts.known_team_maxmin->value == 1.0);
}

TEST_CASE("irrational game") {
  const auto fixed = irrational_game(true);
  CHECK(fixed.game.max_payoff() == 2.0);
  CHECK(fixed.facts.known_team_maxmin->value == doctest::Approx(6.0 - 4.0 * std::sqrt(2.0)));
  REQUIRE(fixed.facts.optimal_strategies.size() == 2);
  for (const auto& s : fixed.facts.optimal_strategies) {
    CHECK(s[0] == doctest::Approx(2.0 - std::sqrt(2.0)));
  }
  // The closed form optimum attains the stated value.
  oracle::Strategies team = fixed.facts.optimal_strategies;
  CHECK(oracle::team_value(fixed.game, team) ==
        doctest::Approx(fixed.facts.known_team_maxmin->value).epsilon(1e-12));
  const auto flawed = irrational_game(false);
  CHECK(flawed.facts.known_team_maxmin->value == 0.0);
  CHECK(flawed.game.max_payoff() == 0.0);
}

TEST_CASE("random games") {
  const auto a = random_team_game(3, 5, 7);
  const auto b = random_team_game(3, 5, 7);
  CHECK(std::equal(a.team_utility().begin(), a.team_utility().end(), b.team_utility().begin()));
  for (double x : a.team_utility()) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  const auto s1 = random_team_game(3, 5, 1);
  const auto s2 = random_team_game(3, 5, 2);
  CHECK_FALSE(std::equal(s1.team_utility().begin(), s1.team_utility().end(),
                         s2.team_utility().begin()));
  CHECK(a.metadata().generator == "random");
  CHECK(*a.metadata().seed == 7);
  CHECK(a.metadata().params.at("n") == 3);
  CHECK(a.metadata().params.at("m") == 5);
}

TEST_CASE("make_family dispatch") {
  for (const auto& name : family_names()) {
    const auto inst = make_family(name, FamilyParams{});
    CHECK(inst.game.num_players() >= 2);
    CHECK(inst.game.metadata().generator == name);
  }
  CHECK_THROWS_AS(make_family("gamut", FamilyParams{}), InputError);
}

TEST_CASE("grid oracle agrees with the known team-maxmin values") {
  for (const auto& inst : {poa_game(), diagonal_game(3, 2), diagonal_game(3, 3),
                           pou_one_game(), coordination_game(3, 2), irrational_game(true)}) {
    const double target = inst.game.max_team_actions() > 2 ? 0.05 : 2e-3;
    const auto r = grid_oracle(inst.game, target);
    const double known = inst.facts.known_team_maxmin->value;
    CHECK(r.estimate <= known + 1e-12);
    CHECK(known <= r.estimate + r.certified_error + 1e-12);
  }
}
