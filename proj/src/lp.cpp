#include "teammaxmin/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "teammaxmin/errors.hpp"

namespace tmm {

std::size_t LinearProgram::add_variable(double objective_coef, std::optional<double> lower,
                                        std::string name) {
  objective.push_back(objective_coef);
  lower_bounds.push_back(lower);
  for (auto& row : le_rows) row.push_back(0.0);
  for (auto& row : eq_rows) row.push_back(0.0);
  if (!name.empty() || !names.empty()) {
    names.resize(objective.size() - 1);
    names.push_back(std::move(name));
  }
  return objective.size() - 1;
}

void LinearProgram::add_le(std::vector<double> row, double rhs) {
  le_rows.push_back(std::move(row));
  le_rhs.push_back(rhs);
}

void LinearProgram::add_eq(std::vector<double> row, double rhs) {
  eq_rows.push_back(std::move(row));
  eq_rhs.push_back(rhs);
}

void LinearProgram::validate() const {
  const std::size_t n = num_variables();
  if (lower_bounds.size() != n) throw StructuralError("LP: one lower bound per variable");
  if (!names.empty() && names.size() != n) throw StructuralError("LP: one name per variable");
  if (le_rows.size() != le_rhs.size() || eq_rows.size() != eq_rhs.size()) {
    throw StructuralError("LP: one right-hand side per constraint");
  }
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(objective.begin(), objective.end(), finite)) {
    throw StructuralError("LP: non-finite objective coefficient");
  }
  for (const auto* rows : {&le_rows, &eq_rows}) {
    for (const auto& row : *rows) {
      if (row.size() != n) throw StructuralError("LP: constraint row has the wrong length");
      if (!std::all_of(row.begin(), row.end(), finite)) {
        throw StructuralError("LP: non-finite constraint coefficient");
      }
    }
  }
  if (!std::all_of(le_rhs.begin(), le_rhs.end(), finite) ||
      !std::all_of(eq_rhs.begin(), eq_rhs.end(), finite)) {
    throw StructuralError("LP: non-finite right-hand side");
  }
  for (const auto& lb : lower_bounds) {
    if (lb && !std::isfinite(*lb)) throw StructuralError("LP: non-finite lower bound");
  }
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}

namespace {

// Full-tableau simplex over y >= 0 with equality rows T y = rhs. Columns are
// [structural | slack | artificial]; Bland's rule picks the lowest-index
// improving column and breaks ratio ties by the lowest basic index.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Reduced costs d_j = c_j - c_B B^{-1} A_j and current objective.
  void price(const std::vector<double>& cost) {
    reduced_ = cost;
    objective_ = 0.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) reduced_[c] -= cb * at(r, c);
      objective_ += cb * rhs(r);
    }
  }

  double objective() const { return objective_; }

  void pivot(std::size_t row, std::size_t col) {
    const double p = at(row, col);
    for (std::size_t c = 0; c <= cols_; ++c) at(row, c) /= p;
    at(row, col) = 1.0;
    // Only the nonzero entries of the pivot row change the other rows.
    nonzero_.clear();
    for (std::size_t c = 0; c <= cols_; ++c) {
      if (at(row, c) != 0.0) nonzero_.push_back(c);
    }
    const double* prow = &data_[row * (cols_ + 1)];
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == row) continue;
      double* rr = &data_[r * (cols_ + 1)];
      const double f = rr[col];
      if (f == 0.0) continue;
      for (std::size_t c : nonzero_) rr[c] -= f * prow[c];
      rr[col] = 0.0;
    }
    const double d = reduced_[col];
    if (d != 0.0) {
      for (std::size_t c : nonzero_) {
        if (c < cols_) reduced_[c] -= d * prow[c];
      }
      objective_ += d * rhs(row);
      reduced_[col] = 0.0;
    }
    basis_[row] = col;
  }

  enum class Outcome { optimal, unbounded };

  // Freezes the current contents as the original system [A | b].
  void snapshot() { original_ = data_; }

  // Recomputes B^{-1} [A | b] from the original system for the current basis
  // (Gauss-Jordan with partial pivoting), discarding accumulated round-off.
  void refactor() {
    const std::size_t width = rows_ + cols_ + 1;
    std::vector<double> aug(rows_ * width);
    for (std::size_t r = 0; r < rows_; ++r) {
      double* dst = &aug[r * width];
      const double* src = &original_[r * (cols_ + 1)];
      for (std::size_t k = 0; k < rows_; ++k) dst[k] = src[basis_[k]];
      std::copy(src, src + cols_ + 1, dst + rows_);
    }
    for (std::size_t k = 0; k < rows_; ++k) {
      std::size_t p = k;
      for (std::size_t r = k + 1; r < rows_; ++r) {
        if (std::abs(aug[r * width + k]) > std::abs(aug[p * width + k])) p = r;
      }
      const double pivot = aug[p * width + k];
      if (std::abs(pivot) < 1e-12) throw LpError("simplex: basis became singular");
      if (p != k) {
        std::swap_ranges(aug.begin() + static_cast<std::ptrdiff_t>(p * width),
                         aug.begin() + static_cast<std::ptrdiff_t>((p + 1) * width),
                         aug.begin() + static_cast<std::ptrdiff_t>(k * width));
      }
      double* row_k = &aug[k * width];
      for (std::size_t c = k; c < width; ++c) row_k[c] /= pivot;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (r == k) continue;
        double* row_r = &aug[r * width];
        const double f = row_r[k];
        if (f == 0.0) continue;
        for (std::size_t c = k; c < width; ++c) row_r[c] -= f * row_k[c];
      }
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      std::copy(&aug[r * width + rows_], &aug[r * width + rows_] + cols_ + 1,
                &data_[r * (cols_ + 1)]);
      at(r, basis_[r]) = 1.0;
    }
  }

  // Maximizes `cost` over columns [0, allowed_cols).
  Outcome run(std::size_t allowed_cols, const std::vector<double>& cost,
              const SimplexOptions& opt, int& pivots) {
    // A refactor costs about as much as `rows` pivots.
    const int refactor_interval = std::max(50, static_cast<int>(rows_));
    refactor();
    price(cost);
    int since_refactor = 0;
    while (true) {
      if (since_refactor == refactor_interval) {
        refactor();
        price(cost);
        since_refactor = 0;
      }
      std::size_t entering = allowed_cols;
      for (std::size_t c = 0; c < allowed_cols; ++c) {
        if (reduced_[c] > opt.optimality_tol) {
          entering = c;
          break;
        }
      }
      if (entering == allowed_cols) {
        if (since_refactor == 0) return Outcome::optimal;
        // Confirm optimality on a freshly factored tableau.
        refactor();
        price(cost);
        since_refactor = 0;
        continue;
      }

      const std::size_t leaving = harris_ ? harris_row(entering, opt) : bland_row(entering, opt);
      if (leaving == rows_) return Outcome::unbounded;
      if (++pivots > opt.max_pivots) {
        throw LpError("simplex: pivot limit of " + std::to_string(opt.max_pivots) +
                      " reached");
      }
      pivot(leaving, entering);
      ++since_refactor;
    }
  }

  /// Switches the ratio test to the two-pass Harris rule, which prefers the
  /// largest pivot among near-tied rows.
  void use_harris() { harris_ = true; }

 private:
  // Minimum ratio, ties broken by the lowest basic index.
  std::size_t bland_row(std::size_t entering, const SimplexOptions& opt) const {
    std::size_t leaving = rows_;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows_; ++r) {
      const double a = at(r, entering);
      if (a <= opt.feasibility_tol) continue;
      const double ratio = std::max(rhs(r), 0.0) / a;
      if (leaving == rows_) {
        leaving = r;
        best_ratio = ratio;
        continue;
      }
      const double eps = 1e-12 * std::max(1.0, best_ratio);
      if (ratio < best_ratio - eps) {
        leaving = r;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + eps && basis_[r] < basis_[leaving]) {
        leaving = r;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    return leaving;
  }

  std::size_t harris_row(std::size_t entering, const SimplexOptions& opt) const {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows_; ++r) {
      const double a = at(r, entering);
      if (a <= opt.feasibility_tol) continue;
      bound = std::min(bound, (std::max(rhs(r), 0.0) + opt.feasibility_tol) / a);
    }
    std::size_t leaving = rows_;
    for (std::size_t r = 0; r < rows_; ++r) {
      const double a = at(r, entering);
      if (a <= opt.feasibility_tol || std::max(rhs(r), 0.0) / a > bound) continue;
      if (leaving == rows_ || a > at(leaving, entering)) leaving = r;
    }
    return leaving;
  }

  bool harris_ = false;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<double> original_;
  std::vector<std::size_t> basis_;
  std::vector<double> reduced_;
  std::vector<std::size_t> nonzero_;
  double objective_ = 0.0;
};

struct ColumnMap {
  // Original variable j maps to plus[j] (and minus[j] when free).
  std::vector<std::size_t> plus;
  std::vector<std::optional<std::size_t>> minus;
  std::vector<double> shift;
};

}  // namespace

namespace {

LpSolution solve_once(const LinearProgram& lp, const SimplexOptions& options, bool harris) {
  const std::size_t n = lp.num_variables();

  ColumnMap cmap;
  std::size_t structural = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cmap.plus.push_back(structural++);
    if (lp.lower_bounds[j]) {
      cmap.minus.push_back(std::nullopt);
      cmap.shift.push_back(*lp.lower_bounds[j]);
    } else {
      cmap.minus.push_back(structural++);
      cmap.shift.push_back(0.0);
    }
  }

  const std::size_t n_le = lp.le_rows.size();
  const std::size_t n_eq = lp.eq_rows.size();
  const std::size_t m = n_le + n_eq;

  // Shifted right-hand sides and the sign each row is multiplied by.
  std::vector<double> rhs(m);
  std::vector<double> sign(m, 1.0);
  std::vector<bool> needs_artificial(m, false);
  for (std::size_t r = 0; r < m; ++r) {
    const bool is_le = r < n_le;
    const auto& row = is_le ? lp.le_rows[r] : lp.eq_rows[r - n_le];
    double b = is_le ? lp.le_rhs[r] : lp.eq_rhs[r - n_le];
    for (std::size_t j = 0; j < n; ++j) b -= row[j] * cmap.shift[j];
    if (b < 0.0) {
      sign[r] = -1.0;
      b = -b;
    }
    rhs[r] = b;
    needs_artificial[r] = !is_le || sign[r] < 0.0;
  }
  const auto n_art = static_cast<std::size_t>(
      std::count(needs_artificial.begin(), needs_artificial.end(), true));
  const std::size_t slack0 = structural;
  const std::size_t art0 = slack0 + n_le;
  const std::size_t cols = art0 + n_art;

  Tableau t(m, cols);
  if (harris) t.use_harris();
  std::size_t next_art = art0;
  for (std::size_t r = 0; r < m; ++r) {
    const bool is_le = r < n_le;
    const auto& row = is_le ? lp.le_rows[r] : lp.eq_rows[r - n_le];
    for (std::size_t j = 0; j < n; ++j) {
      t.at(r, cmap.plus[j]) = sign[r] * row[j];
      if (cmap.minus[j]) t.at(r, *cmap.minus[j]) = -sign[r] * row[j];
    }
    if (is_le) t.at(r, slack0 + r) = sign[r];
    t.rhs(r) = rhs[r];
    if (needs_artificial[r]) {
      t.at(r, next_art) = 1.0;
      t.basis()[r] = next_art++;
    } else {
      t.basis()[r] = slack0 + r;
    }
  }

  t.snapshot();

  LpSolution sol;
  double rhs_scale = 1.0;
  for (double b : rhs) rhs_scale = std::max(rhs_scale, b);

  if (n_art > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (std::size_t c = art0; c < cols; ++c) phase1[c] = -1.0;
    t.run(cols, phase1, options, sol.pivots);
    if (t.objective() < -options.feasibility_tol * rhs_scale) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and stay inert.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis()[r] < art0) continue;
      std::size_t best = art0;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(t.at(r, c)) > 1e-7 &&
            (best == art0 || std::abs(t.at(r, c)) > std::abs(t.at(r, best)))) {
          best = c;
        }
      }
      if (best != art0) {
        t.rhs(r) = 0.0;
        t.pivot(r, best);
      }
    }
  }

  std::vector<double> cost(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[cmap.plus[j]] = lp.objective[j];
    if (cmap.minus[j]) cost[*cmap.minus[j]] = -lp.objective[j];
  }
  if (t.run(art0, cost, options, sol.pivots) == Tableau::Outcome::unbounded) {
    sol.status = LpStatus::unbounded;
    return sol;
  }

  std::vector<double> y(cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) y[t.basis()[r]] = std::max(t.rhs(r), 0.0);
  sol.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double v = y[cmap.plus[j]];
    if (cmap.minus[j]) v -= y[*cmap.minus[j]];
    sol.values[j] = cmap.shift[j] + v;
  }

  // Residual check on the original constraints.
  auto dot = [&](const std::vector<double>& row) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * sol.values[j];
    return s;
  };
  auto fail = [&](const std::string& what, std::size_t k, double residual) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "simplex: " << what << " " << k << " violated by " << residual
        << " after " << sol.pivots << " pivots (ill-conditioned basis)";
    throw LpError(msg.str());
  };
  for (std::size_t k = 0; k < n_le; ++k) {
    const double residual = dot(lp.le_rows[k]) - lp.le_rhs[k];
    if (residual > options.residual_tol * std::max(1.0, std::abs(lp.le_rhs[k]))) {
      fail("inequality", k, residual);
    }
  }
  for (std::size_t k = 0; k < n_eq; ++k) {
    const double residual = std::abs(dot(lp.eq_rows[k]) - lp.eq_rhs[k]);
    if (residual > options.residual_tol * std::max(1.0, std::abs(lp.eq_rhs[k]))) {
      fail("equality", k, residual);
    }
  }
  sol.status = LpStatus::optimal;
  sol.objective_value = dot(lp.objective);
  return sol;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  try {
    return solve_once(lp, options, false);
  } catch (const LpError&) {
    // Bland's ratio test can walk into an ill-conditioned basis on heavily
    // degenerate problems; retry once with pivots chosen for stability.
    return solve_once(lp, options, true);
  }
}

LinearProgram build_maxmin_lp(const PayoffMatrix& matrix) {
  if (matrix.rows == 0 || matrix.cols == 0 || matrix.values.size() != matrix.rows * matrix.cols) {
    throw StructuralError("maxmin LP needs a non-empty, consistently sized matrix");
  }
  LinearProgram lp;
  const std::size_t n = matrix.rows + 1;
  lp.objective.assign(n, 0.0);
  lp.objective[matrix.rows] = 1.0;
  lp.lower_bounds.assign(n, 0.0);
  lp.lower_bounds[matrix.rows] = std::nullopt;
  for (std::size_t c = 0; c < matrix.cols; ++c) {
    std::vector<double> row(n, 0.0);
    for (std::size_t r = 0; r < matrix.rows; ++r) row[r] = -matrix(r, c);
    row[matrix.rows] = 1.0;
    lp.add_le(std::move(row), 0.0);
  }
  std::vector<double> simplex(n, 1.0);
  simplex[matrix.rows] = 0.0;
  lp.add_eq(std::move(simplex), 1.0);
  return lp;
}

LinearProgram build_best_response_lp(const TeamGame& game, const TeamProfile& profile,
                                     int optimizing_member) {
  return build_maxmin_lp(member_payoff_matrix(game, profile, optimizing_member));
}

void dump_lp(const LinearProgram& lp, std::ostream& out) {
  lp.validate();
  const std::size_t n = lp.num_variables();
  auto name = [&](std::size_t j) {
    return lp.names.empty() || lp.names[j].empty() ? "x" + std::to_string(j) : lp.names[j];
  };
  auto terms = [&](const std::vector<double>& row) {
    std::ostringstream s;
    s.precision(17);
    bool first = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (row[j] == 0.0) continue;
      s << (row[j] < 0 ? (first ? "-" : " - ") : (first ? "" : " + ")) << std::abs(row[j])
        << " " << name(j);
      first = false;
    }
    if (first) s << "0 " << name(0);
    return s.str();
  };
  out.precision(17);
  out << "Maximize\n obj: " << terms(lp.objective) << "\nSubject To\n";
  for (std::size_t k = 0; k < lp.le_rows.size(); ++k) {
    out << " le" << k << ": " << terms(lp.le_rows[k]) << " <= " << lp.le_rhs[k] << "\n";
  }
  for (std::size_t k = 0; k < lp.eq_rows.size(); ++k) {
    out << " eq" << k << ": " << terms(lp.eq_rows[k]) << " = " << lp.eq_rhs[k] << "\n";
  }
  out << "Bounds\n";
  for (std::size_t j = 0; j < n; ++j) {
    if (lp.lower_bounds[j]) {
      out << " " << name(j) << " >= " << *lp.lower_bounds[j] << "\n";
    } else {
      out << " " << name(j) << " free\n";
    }
  }
  out << "End\n";
}

}  // namespace tmm
