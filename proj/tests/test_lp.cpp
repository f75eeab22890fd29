#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "teammaxmin/errors.hpp"
#include "teammaxmin/generators.hpp"
#include "teammaxmin/lp.hpp"
#include "teammaxmin/rng.hpp"

using namespace tmm;

namespace {

PayoffMatrix matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return PayoffMatrix{rows, cols, std::move(values)};
}

PayoffMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  PayoffMatrix M{rows, cols, std::vector<double>(rows * cols)};
  for (double& x : M.values) x = rng.uniform01();
  return M;
}

double maxmin_value(const PayoffMatrix& M) {
  const auto sol = solve_lp(build_maxmin_lp(M));
  REQUIRE(sol.status == LpStatus::optimal);
  return sol.values[M.rows];
}

}  // namespace

TEST_CASE("solve_lp examples") {
  SUBCASE("maximize v with v <= 0.3 and v <= 0.7") {
    LinearProgram lp;
    lp.add_variable(1.0, std::nullopt);
    lp.add_le({1.0}, 0.3);
    lp.add_le({1.0}, 0.7);
    const auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::optimal);
    CHECK(sol.values[0] == doctest::Approx(0.3));
    CHECK(sol.objective_value == doctest::Approx(0.3));
  }
  SUBCASE("x >= 0 and x <= -1 is infeasible") {
    LinearProgram lp;
    lp.add_variable(0.0);
    lp.add_le({1.0}, -1.0);
    CHECK(solve_lp(lp).status == LpStatus::infeasible);
  }
  SUBCASE("matching pennies") {
    const auto M = matrix(2, 2, {1, 0, 0, 1});
    const auto sol = solve_lp(build_maxmin_lp(M));
    CHECK(sol.values[2] == doctest::Approx(0.5));
    CHECK(sol.values[0] == doctest::Approx(0.5));
    CHECK(sol.values[1] == doctest::Approx(0.5));
  }
}

TEST_CASE("solve_lp handles shifts, free variables, equalities and unboundedness") {
  SUBCASE("lower bound shift") {
    // max -x - y with x >= 2, y >= -1, x + y >= 3
    LinearProgram lp;
    lp.add_variable(-1.0, 2.0);
    lp.add_variable(-1.0, -1.0);
    lp.add_le({-1.0, -1.0}, -3.0);
    const auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(-3.0));
    CHECK(sol.values[0] >= 2.0 - 1e-12);
    CHECK(sol.values[1] >= -1.0 - 1e-12);
  }
  SUBCASE("free variable driven negative by an equality") {
    LinearProgram lp;
    lp.add_variable(1.0, std::nullopt);
    lp.add_variable(0.0);
    lp.add_eq({1.0, 1.0}, -2.0);
    lp.add_le({0.0, 1.0}, 5.0);
    const auto sol = solve_lp(lp);
    CHECK(sol.values[0] == doctest::Approx(-2.0));
  }
  SUBCASE("unbounded") {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_variable(0.0);
    lp.add_le({-1.0, 1.0}, 1.0);
    CHECK(solve_lp(lp).status == LpStatus::unbounded);
  }
  SUBCASE("redundant equalities") {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.add_variable(2.0);
    lp.add_eq({1.0, 1.0}, 1.0);
    lp.add_eq({2.0, 2.0}, 2.0);
    const auto sol = solve_lp(lp);
    CHECK(sol.status == LpStatus::optimal);
    CHECK(sol.objective_value == doctest::Approx(2.0));
  }
  SUBCASE("inconsistent dimensions are structural errors") {
    LinearProgram lp;
    lp.add_variable(1.0);
    lp.le_rows.push_back({1.0, 2.0});
    lp.le_rhs.push_back(1.0);
    CHECK_THROWS_AS(solve_lp(lp), StructuralError);
  }
}

TEST_CASE("build_maxmin_lp examples") {
  CHECK(maxmin_value(matrix(1, 1, {0.42})) == doctest::Approx(0.42));
  CHECK(maxmin_value(matrix(1, 1, {-3.0})) == doctest::Approx(-3.0));
  CHECK(maxmin_value(to_joint_game(diagonal_game(3, 2).game)) == doctest::Approx(0.5));
  for (std::size_t m = 2; m <= 6; ++m) {
    PayoffMatrix I{m, m, std::vector<double>(m * m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) I(i, i) = 1.0;
    const auto sol = solve_lp(build_maxmin_lp(I));
    CHECK(sol.values[m] == doctest::Approx(1.0 / static_cast<double>(m)).epsilon(1e-12));
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(sol.values[i] == doctest::Approx(1.0 / static_cast<double>(m)).epsilon(1e-12));
    }
    if (m <= 3) {
      const int steps = static_cast<int>(m) * 20;
      CHECK(oracle::matrix_maxmin_by_grid(I, steps) == doctest::Approx(sol.values[m]));
    }
  }
  CHECK_THROWS_AS(build_maxmin_lp(PayoffMatrix{}), StructuralError);
}

TEST_CASE("maxmin value equals the column player's minmax") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const auto M = random_matrix(5, 5, rng);
    CHECK(std::abs(maxmin_value(M) - oracle::column_minmax_lp(M)) <= 1e-7);
  }
}

TEST_CASE("maxmin value is invariant under row permutations") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto M = random_matrix(4, 3, rng);
    PayoffMatrix P = M;
    const std::size_t perm[] = {2, 0, 3, 1};
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 3; ++c) P(r, c) = M(perm[r], c);
    }
    CHECK(maxmin_value(P) == doctest::Approx(maxmin_value(M)).epsilon(1e-10));
  }
}

TEST_CASE("complement-transpose identity") {
  // Row player's maxmin v on M equals 1 - (row player's maxmin on (1 - M)^T).
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto M = random_matrix(3, 4, rng);
    PayoffMatrix T{4, 3, std::vector<double>(12)};
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 4; ++c) T(c, r) = 1.0 - M(r, c);
    }
    CHECK(maxmin_value(T) == doctest::Approx(1.0 - maxmin_value(M)).epsilon(1e-9));
  }
}

TEST_CASE("build_best_response_lp examples") {
  SUBCASE("team of one reduces to the full maxmin LP") {
    const auto g = random_team_game(2, 4, 3);
    const auto a = solve_lp(build_best_response_lp(g, TeamProfile::uniform(g), 0));
    const auto b = solve_lp(build_maxmin_lp(to_joint_game(g)));
    CHECK(a.values[4] == doctest::Approx(b.values[4]).epsilon(1e-12));
  }
  SUBCASE("coordination game with the other teammate uniform") {
    const auto g = coordination_game(3, 2).game;
    const auto lp = build_best_response_lp(g, TeamProfile::uniform(g), 0);
    CHECK(lp.le_rows.size() == 1);
    CHECK(lp.le_rows[0][0] == doctest::Approx(-0.5));
    CHECK(lp.le_rows[0][1] == doctest::Approx(-0.5));
    CHECK(solve_lp(lp).values[2] == doctest::Approx(0.5));
  }
  SUBCASE("price-of-anarchy game with the second teammate pure on a4") {
    const auto g = poa_game().game;
    const int acts[] = {0, 1};
    const auto lp = build_best_response_lp(g, TeamProfile::pure(g, acts), 0);
    // Columns a5 and a6; rows a1 and a2.
    CHECK(lp.le_rows[0][0] == 0.0);
    CHECK(lp.le_rows[0][1] == 0.0);
    CHECK(lp.le_rows[1][0] == 0.0);
    CHECK(lp.le_rows[1][1] == doctest::Approx(-1.0));
    CHECK(solve_lp(lp).values[2] == doctest::Approx(0.0));
  }
  SUBCASE("invalid member") {
    const auto g = poa_game().game;
    CHECK_THROWS_AS(build_best_response_lp(g, TeamProfile::uniform(g), 2), StructuralError);
  }
}

TEST_CASE("re-optimizing one member never lowers the team value") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_team_game(3 + trial % 2, 3, 500 + trial);
    std::vector<MixedStrategy> s;
    for (int i = 0; i < g.num_team_members(); ++i) {
      s.push_back(MixedStrategy::from_solver_values(i, rng.simplex_point(3)));
    }
    const TeamProfile p(std::move(s));
    const double base = team_value(g, p).value;
    for (int member = 0; member < g.num_team_members(); ++member) {
      const auto sol = solve_lp(build_best_response_lp(g, p, member));
      CHECK(sol.values[3] >= base - 1e-9);
    }
  }
}

TEST_CASE("dump_lp writes a readable LP file") {
  LinearProgram lp;
  lp.add_variable(1.0, std::nullopt, "v");
  lp.add_variable(0.0, 0.0, "x");
  lp.add_le({1.0, -2.0}, 0.0);
  lp.add_eq({0.0, 1.0}, 1.0);
  std::ostringstream out;
  dump_lp(lp, out);
  const std::string text = out.str();
  CHECK(text.find("Maximize") == 0);
  CHECK(text.find("le0: 1 v - 2 x <= 0") != std::string::npos);
  CHECK(text.find("v free") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
