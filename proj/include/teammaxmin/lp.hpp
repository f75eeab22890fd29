#pragma once

// Dense linear programming: a two-phase primal simplex on a full tableau with
// Bland's pivoting rule, plus builders for the zero-sum maxmin LP and the
// single-member best-response LP.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "teammaxmin/game.hpp"

namespace tmm {

/// maximize objective . x
/// s.t.     le_rows[k] . x <= le_rhs[k]
///          eq_rows[k] . x == eq_rhs[k]
///          x_j >= lower_bounds[j]   (std::nullopt = free variable)
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<std::optional<double>> lower_bounds;
  std::vector<std::string> names;  // optional, used by dump_lp

  std::size_t num_variables() const { return objective.size(); }

  /// Appends a variable and returns its index.
  std::size_t add_variable(double objective_coef, std::optional<double> lower = 0.0,
                           std::string name = {});
  void add_le(std::vector<double> row, double rhs);
  void add_eq(std::vector<double> row, double rhs);

  /// Throws StructuralError on inconsistent sizes or non-finite data.
  void validate() const;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective_value = 0.0;
  std::vector<double> values;
  int pivots = 0;
};

struct SimplexOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  /// Residual allowed on the recovered primal point before the result is
  /// declared numerically unreliable.
  double residual_tol = 1e-8;
  int max_pivots = 200000;
};

/// Throws LpError when the pivot limit is hit or the recovered point violates
/// the constraints by more than residual_tol.
LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options = {});

/// Maxmin LP of a row player: variables x_0..x_{rows-1} (row probabilities)
/// followed by the free value variable v at index `rows`.
LinearProgram build_maxmin_lp(const PayoffMatrix& matrix);

/// The maxmin LP of `optimizing_member` with every other team member fixed to
/// its strategy in `profile`; same variable layout as build_maxmin_lp.
LinearProgram build_best_response_lp(const TeamGame& game, const TeamProfile& profile,
                                     int optimizing_member);

/// Writes the LP in CPLEX LP text format for cross-checking elsewhere.
void dump_lp(const LinearProgram& lp, std::ostream& out);

}  // namespace tmm
