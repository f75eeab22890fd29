#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "teammaxmin/errors.hpp"
#include "teammaxmin/lp.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

namespace {

using Clock = std::chrono::steady_clock;

// Per-coordinate bounds on every team member's strategy.
struct Box {
  std::vector<std::vector<double>> lower;
  std::vector<std::vector<double>> upper;
  double bound = 0.0;
  std::vector<std::vector<double>> relaxed_marginals;
};

// Tightens bounds through sum-to-one; false if the box is empty.
bool tighten(Box& box) {
  for (std::size_t i = 0; i < box.lower.size(); ++i) {
    auto& lo = box.lower[i];
    auto& hi = box.upper[i];
    const double sum_lo = std::accumulate(lo.begin(), lo.end(), 0.0);
    const double sum_hi = std::accumulate(hi.begin(), hi.end(), 0.0);
    if (sum_lo > 1.0 + 1e-12 || sum_hi < 1.0 - 1e-12) return false;
    for (std::size_t a = 0; a < lo.size(); ++a) {
      hi[a] = std::min(hi[a], 1.0 - (sum_lo - lo[a]));
      lo[a] = std::max(lo[a], 1.0 - (sum_hi - hi[a]));
      if (lo[a] > hi[a] + 1e-12) return false;
      hi[a] = std::max(hi[a], lo[a]);
    }
  }
  return true;
}

// Upper bound on the team value over a box. Variables are the joint
// distribution p(a_T), the marginals s_i(a_i) and the value v. A product
// distribution with marginals in the box is feasible: its marginals match s,
// and each p(a_T) = s_i(a_i) * R_i(a_-i), where R_i is p summed over member
// i's actions, obeys the McCormick envelope of that product.
class BoxRelaxation {
 public:
  explicit BoxRelaxation(const TeamGame& game) : game_(game) {
    const int k = game.num_team_members();
    joint_ = game.num_joint_team_actions();
    std::size_t offset = joint_;
    for (int i = 0; i < k; ++i) {
      marginal_offset_.push_back(offset);
      offset += static_cast<std::size_t>(game.num_actions(i));
    }
    value_index_ = offset;
    num_vars_ = offset + 1;

    strides_.assign(static_cast<std::size_t>(k), 1);
    for (int i = k - 2; i >= 0; --i) {
      strides_[static_cast<std::size_t>(i)] =
          strides_[static_cast<std::size_t>(i) + 1] *
          static_cast<std::size_t>(game.num_actions(i + 1));
    }
  }

  std::optional<LpSolution> solve(const Box& box) const {
    const int k = game_.num_team_members();
    const auto m_adv = static_cast<std::size_t>(game_.adversary_actions());
    LinearProgram lp;
    lp.objective.assign(num_vars_, 0.0);
    lp.objective[value_index_] = 1.0;
    lp.lower_bounds.assign(num_vars_, 0.0);
    lp.lower_bounds[value_index_] = std::nullopt;
    for (int i = 0; i < k; ++i) {
      for (int a = 0; a < game_.num_actions(i); ++a) {
        lp.lower_bounds[marginal(i, a)] = box.lower[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
      }
    }

    const auto utility = game_.team_utility();
    for (std::size_t c = 0; c < m_adv; ++c) {
      std::vector<double> row(num_vars_, 0.0);
      row[value_index_] = 1.0;
      for (std::size_t j = 0; j < joint_; ++j) row[j] = -utility[j * m_adv + c];
      lp.add_le(std::move(row), 0.0);
    }
    {
      std::vector<double> row(num_vars_, 0.0);
      for (std::size_t j = 0; j < joint_; ++j) row[j] = 1.0;
      lp.add_eq(std::move(row), 1.0);
    }
    for (int i = 0; i < k; ++i) {
      for (int a = 0; a < game_.num_actions(i); ++a) {
        std::vector<double> row(num_vars_, 0.0);
        for (std::size_t j = 0; j < joint_; ++j) {
          if (action_of(j, i) == a) row[j] = 1.0;
        }
        row[marginal(i, a)] = -1.0;
        lp.add_eq(std::move(row), 0.0);

        const double hi = box.upper[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
        if (hi < 1.0) {
          std::vector<double> cap(num_vars_, 0.0);
          cap[marginal(i, a)] = 1.0;
          lp.add_le(std::move(cap), hi);
        }
      }
    }

    std::vector<int> joint_action(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < joint_; ++j) {
      for (int i = 0; i < k; ++i) joint_action[static_cast<std::size_t>(i)] = action_of(j, i);
      for (int i = 0; i < k; ++i) add_envelope(lp, box, j, joint_action, i);
    }

    LpSolution sol = solve_lp(lp);
    if (sol.status == LpStatus::infeasible) return std::nullopt;
    if (sol.status != LpStatus::optimal) {
      throw LpError(std::string("box relaxation LP reported ") + to_string(sol.status));
    }
    return sol;
  }

  std::vector<std::vector<double>> marginals(const LpSolution& sol) const {
    std::vector<std::vector<double>> out;
    for (int i = 0; i < game_.num_team_members(); ++i) {
      const auto first = sol.values.begin() + static_cast<std::ptrdiff_t>(marginal(i, 0));
      out.emplace_back(first, first + game_.num_actions(i));
    }
    return out;
  }

  double value(const LpSolution& sol) const { return sol.values[value_index_]; }

 private:
  std::size_t marginal(int member, int action) const {
    return marginal_offset_[static_cast<std::size_t>(member)] + static_cast<std::size_t>(action);
  }

  int action_of(std::size_t joint_index, int member) const {
    const auto i = static_cast<std::size_t>(member);
    return static_cast<int>((joint_index / strides_[i]) %
                            static_cast<std::size_t>(game_.num_actions(member)));
  }

  void add_envelope(LinearProgram& lp, const Box& box, std::size_t j,
                    const std::vector<int>& joint_action, int i) const {
    const auto iu = static_cast<std::size_t>(i);
    const auto ai = static_cast<std::size_t>(joint_action[iu]);
    const double l = box.lower[iu][ai];
    const double u = box.upper[iu][ai];
    double rest_lo = 1.0;
    double rest_hi = 1.0;
    for (std::size_t q = 0; q < joint_action.size(); ++q) {
      if (q == iu) continue;
      const auto aq = static_cast<std::size_t>(joint_action[q]);
      rest_lo *= box.lower[q][aq];
      rest_hi *= box.upper[q][aq];
    }
    // R = sum over member i's actions of p with the other coordinates of j.
    const std::size_t base = j - ai * strides_[iu];
    auto rest_terms = [&](std::vector<double>& row, double coef) {
      for (int b = 0; b < game_.num_actions(i); ++b) {
        row[base + static_cast<std::size_t>(b) * strides_[iu]] += coef;
      }
    };
    const std::size_t s = marginal(i, joint_action[iu]);
    auto add = [&](double p_coef, double r_coef, double s_coef, double rhs) {
      std::vector<double> row(num_vars_, 0.0);
      row[j] += p_coef;
      rest_terms(row, r_coef);
      row[s] += s_coef;
      lp.add_le(std::move(row), rhs);
    };
    // p >= l R + L s - l L  (vacuous when l = L = 0)
    if (l > 0.0 || rest_lo > 0.0) add(-1.0, l, rest_lo, l * rest_lo);
    // p >= u R + U s - u U
    add(-1.0, u, rest_hi, u * rest_hi);
    // p <= u R + L s - u L
    add(1.0, -u, -rest_lo, -u * rest_lo);
    // p <= l R + U s - l U
    add(1.0, -l, -rest_hi, -l * rest_hi);
  }

  const TeamGame& game_;
  std::size_t joint_ = 0;
  std::vector<std::size_t> marginal_offset_;
  std::vector<std::size_t> strides_;
  std::size_t value_index_ = 0;
  std::size_t num_vars_ = 0;
};

struct BoxOrder {
  bool operator()(const Box& a, const Box& b) const { return a.bound < b.bound; }
};

}  // namespace

SolveReport global_optimize(const TeamGame& game, const GlobalOptions& options) {
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(options.budget);
  auto out_of_time = [&] { return Clock::now() >= deadline; };

  // Correlated relaxation and its reconstruction give the initial bracket.
  std::optional<SolveReport> report;
  double upper = pure_upper_bound(game);
  try {
    SolveReport recon = reconstruct_best_pivot(game);
    upper = std::min(upper, recon.upper_bound);
    report.emplace("global", recon.witness);
    report->lower_bound = recon.lower_bound;
  } catch (const CapacityError&) {
    TeamProfile uniform = TeamProfile::uniform(game);
    report.emplace("global", uniform);
    report->lower_bound = team_value(game, uniform).value;
  }
  upper = std::max(upper, report->lower_bound);

  auto offer = [&](const TeamProfile& candidate) {
    const double value = team_value(game, candidate).value;
    if (value > report->lower_bound) {
      report->lower_bound = value;
      report->witness = candidate;
    }
  };
  auto gap_closed = [&] { return upper - report->lower_bound <= options.accuracy; };

  if (options.budget.count() > 0 && !gap_closed() && options.iterated_restarts > 0) {
    IteratedLpOptions it;
    it.init = UniformInit{};
    it.restarts = options.iterated_restarts;
    it.seed = options.seed;
    it.timeout = std::chrono::duration_cast<Seconds>(deadline - Clock::now());
    if (it.timeout.count() > 0) {
      const SolveReport local = iterated_lp(game, it);
      report->restarts_used = local.restarts_used;
      offer(local.witness);
    }
  }

  std::int64_t nodes = 0;
  if (options.budget.count() > 0 && options.refine && !gap_closed() && !out_of_time()) {
    const BoxRelaxation relaxation(game);
    auto polish = [&](const std::vector<std::vector<double>>& marginals) {
      std::vector<MixedStrategy> strategies;
      for (int i = 0; i < game.num_team_members(); ++i) {
        strategies.push_back(
            MixedStrategy::from_solver_values(i, marginals[static_cast<std::size_t>(i)], 1e-6));
      }
      TeamProfile start_profile(std::move(strategies));
      offer(start_profile);
      IteratedLpOptions it;
      it.init = start_profile;
      it.restarts = 1;
      it.max_rounds = 50;
      it.timeout = std::chrono::duration_cast<Seconds>(deadline - Clock::now());
      if (it.timeout.count() > 0) offer(iterated_lp(game, it).witness);
    };
    // A box whose relaxation cannot be solved reliably keeps the bound it
    // inherited from its parent.
    auto evaluate = [&](Box& box) -> bool {
      std::optional<LpSolution> sol;
      ++nodes;
      try {
        sol = relaxation.solve(box);
      } catch (const LpError&) {
        return true;
      }
      if (!sol) return false;
      // Slack covers the LP tolerances so the bound stays valid.
      box.bound = std::min(relaxation.value(*sol) + 1e-9, upper);
      box.relaxed_marginals = relaxation.marginals(*sol);
      polish(box.relaxed_marginals);
      return true;
    };

    Box root;
    for (int i = 0; i < game.num_team_members(); ++i) {
      const auto m = static_cast<std::size_t>(game.num_actions(i));
      root.lower.emplace_back(m, 0.0);
      root.upper.emplace_back(m, 1.0);
    }
    root.bound = upper;
    std::priority_queue<Box, std::vector<Box>, BoxOrder> open;
    double frozen_bound = -std::numeric_limits<double>::infinity();
    if (evaluate(root)) open.push(std::move(root));

    while (true) {
      while (!open.empty() && open.top().bound <= report->lower_bound) open.pop();
      const double open_bound = open.empty() ? -std::numeric_limits<double>::infinity()
                                             : open.top().bound;
      upper = std::min(upper, std::max({report->lower_bound, open_bound, frozen_bound}));
      if (open.empty() || gap_closed()) break;
      if (out_of_time() || nodes >= options.max_nodes) break;
      Box box = open.top();
      open.pop();

      // Split the widest coordinate at its midpoint.
      std::size_t bi = 0, ba = 0;
      double width = -1.0;
      for (std::size_t i = 0; i < box.lower.size(); ++i) {
        for (std::size_t a = 0; a < box.lower[i].size(); ++a) {
          const double w = box.upper[i][a] - box.lower[i][a];
          if (w > width) {
            width = w;
            bi = i;
            ba = a;
          }
        }
      }
      if (width < options.min_box_width) {
        frozen_bound = std::max(frozen_bound, box.bound);
        continue;
      }
      const double mid = 0.5 * (box.lower[bi][ba] + box.upper[bi][ba]);
      Box left = box;
      left.upper[bi][ba] = mid;
      Box right = std::move(box);
      right.lower[bi][ba] = mid;
      for (Box* child : {&left, &right}) {
        if (!tighten(*child)) continue;
        if (evaluate(*child) && child->bound > report->lower_bound) open.push(std::move(*child));
      }
    }
  }

  report->upper_bound = std::max(upper, report->lower_bound);
  report->iterations = nodes;
  report->converged = gap_closed();
  report->wall_time = Clock::now() - start;
  return std::move(*report);
}

}  // namespace tmm
