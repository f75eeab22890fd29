#include "teammaxmin/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "detail.hpp"
#include "teammaxmin/errors.hpp"

namespace tmm {

namespace {

std::size_t checked_product(std::span<const int> dims, const char* what) {
  std::size_t total = 1;
  for (int d : dims) {
    if (d < 1) {
      throw StructuralError(std::string(what) + ": every action count must be >= 1");
    }
    const auto du = static_cast<std::size_t>(d);
    if (total > kMaxTensorEntries / du) {
      throw CapacityError(std::string(what) + ": more than " +
                          std::to_string(kMaxTensorEntries) + " entries");
    }
    total *= du;
  }
  return total;
}

void check_probabilities(std::span<const double> probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw StructuralError(std::string(what) + ": probabilities must be finite and >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": probabilities sum to " << sum << ", expected 1";
    throw StructuralError(msg.str());
  }
}

std::vector<double> clip_and_rescale(std::span<const double> values, double tol,
                                     const char* what) {
  std::vector<double> out(values.begin(), values.end());
  double sum = 0.0;
  for (double& v : out) {
    if (!std::isfinite(v) || v < -tol) {
      throw StructuralError(std::string(what) + ": solver value out of range");
    }
    if (v < 1e-12) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol || sum <= 0.0) {
    throw StructuralError(std::string(what) + ": solver values do not sum to 1");
  }
  for (double& v : out) v /= sum;
  return out;
}

void check_profile_shape(const TeamGame& game, const TeamProfile& profile) {
  if (profile.size() != game.num_team_members()) {
    throw StructuralError("profile has " + std::to_string(profile.size()) +
                          " strategies, game has " +
                          std::to_string(game.num_team_members()) + " team members");
  }
  for (int i = 0; i < profile.size(); ++i) {
    if (profile[i].size() != game.num_actions(i)) {
      throw StructuralError("strategy of member " + std::to_string(i) + " has " +
                            std::to_string(profile[i].size()) + " entries, expected " +
                            std::to_string(game.num_actions(i)));
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// TeamGame

TeamGame::TeamGame(std::vector<int> actions_per_player, std::vector<double> team_utility,
                   GameMetadata metadata)
    : actions_(std::move(actions_per_player)),
      utility_(std::move(team_utility)),
      metadata_(std::move(metadata)) {
  if (actions_.size() < 2) {
    throw StructuralError("a team game needs at least two players");
  }
  const std::size_t expected = checked_product(actions_, "team game");
  if (utility_.size() != expected) {
    throw StructuralError("utility tensor has " + std::to_string(utility_.size()) +
                          " entries, expected " + std::to_string(expected));
  }
  for (double u : utility_) {
    if (!std::isfinite(u)) throw StructuralError("utility tensor contains a non-finite entry");
  }
  joint_team_actions_ = expected / static_cast<std::size_t>(actions_.back());
}

int TeamGame::num_actions(int player) const {
  if (player < 0 || player >= num_players()) {
    throw StructuralError("player index " + std::to_string(player) + " out of range");
  }
  return actions_[static_cast<std::size_t>(player)];
}

int TeamGame::max_team_actions() const {
  return *std::max_element(actions_.begin(), actions_.end() - 1);
}

std::size_t TeamGame::flat_index(std::span<const int> actions) const {
  if (actions.size() != actions_.size()) {
    throw StructuralError("action profile has the wrong number of players");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= actions_[i]) {
      throw StructuralError("action index out of range for player " + std::to_string(i));
    }
    idx = idx * static_cast<std::size_t>(actions_[i]) + static_cast<std::size_t>(actions[i]);
  }
  return idx;
}

double TeamGame::utility_at(std::span<const int> actions) const {
  return utility_[flat_index(actions)];
}

double TeamGame::min_payoff() const { return *std::min_element(utility_.begin(), utility_.end()); }
double TeamGame::max_payoff() const { return *std::max_element(utility_.begin(), utility_.end()); }

bool TeamGame::payoffs_in_unit_interval() const {
  return min_payoff() >= 0.0 && max_payoff() <= 1.0;
}

// ---------------------------------------------------------------------------
// Strategies

MixedStrategy::MixedStrategy(int owner, std::vector<double> probs)
    : owner_(owner), probs_(std::move(probs)) {
  if (owner_ < 0) throw StructuralError("strategy owner must be >= 0");
  if (probs_.empty()) throw StructuralError("strategy over an empty action set");
  check_probabilities(probs_, "mixed strategy");
}

MixedStrategy MixedStrategy::uniform(int owner, int num_actions) {
  if (num_actions < 1) throw StructuralError("uniform strategy needs at least one action");
  return {owner, std::vector<double>(static_cast<std::size_t>(num_actions),
                                     1.0 / static_cast<double>(num_actions))};
}

MixedStrategy MixedStrategy::pure(int owner, int num_actions, int action) {
  if (action < 0 || action >= num_actions) {
    throw StructuralError("pure action " + std::to_string(action) + " out of range");
  }
  std::vector<double> probs(static_cast<std::size_t>(num_actions), 0.0);
  probs[static_cast<std::size_t>(action)] = 1.0;
  return {owner, std::move(probs)};
}

MixedStrategy MixedStrategy::from_solver_values(int owner, std::span<const double> values,
                                                double tol) {
  return {owner, clip_and_rescale(values, tol, "mixed strategy")};
}

std::vector<int> MixedStrategy::support() const {
  std::vector<int> out;
  for (int a = 0; a < size(); ++a) {
    if (probs_[static_cast<std::size_t>(a)] > 0.0) out.push_back(a);
  }
  return out;
}

TeamProfile::TeamProfile(std::vector<MixedStrategy> strategies)
    : strategies_(std::move(strategies)) {
  if (strategies_.empty()) throw StructuralError("a team profile needs at least one member");
  for (std::size_t i = 0; i < strategies_.size(); ++i) {
    if (strategies_[i].owner() != static_cast<int>(i)) {
      throw StructuralError("team profile owners must be 0..k-1 in order");
    }
  }
}

TeamProfile TeamProfile::uniform(const TeamGame& game) {
  std::vector<MixedStrategy> s;
  for (int i = 0; i < game.num_team_members(); ++i) {
    s.push_back(MixedStrategy::uniform(i, game.num_actions(i)));
  }
  return TeamProfile(std::move(s));
}

TeamProfile TeamProfile::pure(const TeamGame& game, int action) {
  std::vector<int> actions(static_cast<std::size_t>(game.num_team_members()), action);
  return pure(game, actions);
}

TeamProfile TeamProfile::pure(const TeamGame& game, std::span<const int> actions) {
  if (static_cast<int>(actions.size()) != game.num_team_members()) {
    throw StructuralError("pure profile needs one action per team member");
  }
  std::vector<MixedStrategy> s;
  for (int i = 0; i < game.num_team_members(); ++i) {
    s.push_back(MixedStrategy::pure(i, game.num_actions(i), actions[static_cast<std::size_t>(i)]));
  }
  return TeamProfile(std::move(s));
}

TeamProfile TeamProfile::with(const MixedStrategy& replacement) const {
  auto copy = strategies_;
  const auto idx = static_cast<std::size_t>(replacement.owner());
  if (idx >= copy.size()) throw StructuralError("replacement owner out of range");
  copy[idx] = replacement;
  return TeamProfile(std::move(copy));
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(std::vector<int> team_actions, std::vector<double> probs)
    : team_actions_(std::move(team_actions)), probs_(std::move(probs)) {
  if (team_actions_.empty()) throw StructuralError("joint distribution over an empty team");
  const std::size_t expected = checked_product(team_actions_, "joint distribution");
  if (probs_.size() != expected) {
    throw StructuralError("joint distribution has " + std::to_string(probs_.size()) +
                          " entries, expected " + std::to_string(expected));
  }
  check_probabilities(probs_, "joint distribution");
}

JointDistribution JointDistribution::point_mass(std::vector<int> team_actions,
                                                std::span<const int> joint_action) {
  const std::size_t total = checked_product(team_actions, "joint distribution");
  std::vector<double> probs(total, 0.0);
  probs[0] = 1.0;
  JointDistribution out(std::move(team_actions), std::move(probs));
  const std::size_t target = out.index_of(joint_action);
  out.probs_[0] = 0.0;
  out.probs_[target] = 1.0;
  return out;
}

JointDistribution JointDistribution::from_solver_values(std::vector<int> team_actions,
                                                        std::span<const double> values,
                                                        double tol) {
  return {std::move(team_actions), clip_and_rescale(values, tol, "joint distribution")};
}

std::size_t JointDistribution::index_of(std::span<const int> joint_action) const {
  if (joint_action.size() != team_actions_.size()) {
    throw StructuralError("joint action has the wrong number of team members");
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < joint_action.size(); ++i) {
    if (joint_action[i] < 0 || joint_action[i] >= team_actions_[i]) {
      throw StructuralError("joint action index out of range");
    }
    idx = idx * static_cast<std::size_t>(team_actions_[i]) +
          static_cast<std::size_t>(joint_action[i]);
  }
  return idx;
}

std::vector<int> JointDistribution::joint_action(std::size_t index) const {
  if (index >= probs_.size()) throw StructuralError("joint index out of range");
  std::vector<int> out(team_actions_.size());
  for (std::size_t k = team_actions_.size(); k-- > 0;) {
    const auto m = static_cast<std::size_t>(team_actions_[k]);
    out[k] = static_cast<int>(index % m);
    index /= m;
  }
  return out;
}

std::vector<double> JointDistribution::marginal(int member) const {
  if (member < 0 || member >= static_cast<int>(team_actions_.size())) {
    throw StructuralError("member index out of range");
  }
  const auto k = static_cast<std::size_t>(member);
  std::size_t inner = 1;
  for (std::size_t j = k + 1; j < team_actions_.size(); ++j) {
    inner *= static_cast<std::size_t>(team_actions_[j]);
  }
  const auto m = static_cast<std::size_t>(team_actions_[k]);
  std::vector<double> out(m, 0.0);
  for (std::size_t idx = 0; idx < probs_.size(); ++idx) {
    out[(idx / inner) % m] += probs_[idx];
  }
  return out;
}

std::vector<int> JointDistribution::support(int member) const {
  const auto marg = marginal(member);
  std::vector<int> out;
  for (std::size_t a = 0; a < marg.size(); ++a) {
    if (marg[a] > 0.0) out.push_back(static_cast<int>(a));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

ValueReport team_value(const TeamGame& game, const TeamProfile& profile) {
  check_profile_shape(game, profile);
  std::vector<double> partial = detail::contract_outermost(game.team_utility(), profile[0].probs());
  for (int i = 1; i < profile.size(); ++i) {
    partial = detail::contract_outermost(partial, profile[i].probs());
  }
  ValueReport report;
  report.expected_utilities_per_adversary_action = std::move(partial);
  const auto& per_action = report.expected_utilities_per_adversary_action;
  const auto it = std::min_element(per_action.begin(), per_action.end());
  report.value = *it;
  report.minimizing_adversary_action = static_cast<int>(it - per_action.begin());
  return report;
}

double expected_team_utility(const TeamGame& game, const TeamProfile& profile,
                             const MixedStrategy& adversary) {
  if (adversary.size() != game.adversary_actions()) {
    throw StructuralError("adversary strategy has the wrong number of actions");
  }
  const auto per_action = team_value(game, profile).expected_utilities_per_adversary_action;
  double total = 0.0;
  for (int a = 0; a < adversary.size(); ++a) {
    total += adversary[a] * per_action[static_cast<std::size_t>(a)];
  }
  return total;
}

std::vector<double> deviation_payoffs(const TeamGame& game,
                                      std::span<const MixedStrategy> strategies, int player) {
  const int n = game.num_players();
  if (static_cast<int>(strategies.size()) != n) {
    throw StructuralError("deviation_payoffs needs one strategy per player");
  }
  for (int i = 0; i < n; ++i) {
    if (strategies[static_cast<std::size_t>(i)].size() != game.num_actions(i)) {
      throw StructuralError("strategy of player " + std::to_string(i) +
                            " does not match the game");
    }
  }
  const int m_player = game.num_actions(player);
  std::vector<double> out(static_cast<std::size_t>(m_player), 0.0);
  const auto utility = game.team_utility();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t flat = 0; flat < utility.size(); ++flat) {
    double w = 1.0;
    for (int i = 0; i < n && w != 0.0; ++i) {
      if (i != player) w *= strategies[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
    }
    if (w != 0.0) out[static_cast<std::size_t>(idx[static_cast<std::size_t>(player)])] += w * utility[flat];
    for (int i = n - 1; i >= 0; --i) {
      auto& d = idx[static_cast<std::size_t>(i)];
      if (++d < game.num_actions(i)) break;
      d = 0;
    }
  }
  return out;
}

PayoffMatrix member_payoff_matrix(const TeamGame& game, const TeamProfile& profile, int member) {
  check_profile_shape(game, profile);
  if (member < 0 || member >= game.num_team_members()) {
    throw StructuralError("member index " + std::to_string(member) + " is not a team member");
  }
  const int n = game.num_players();
  const auto utility = game.team_utility();
  PayoffMatrix out;
  out.rows = static_cast<std::size_t>(game.num_actions(member));
  out.cols = static_cast<std::size_t>(game.adversary_actions());
  out.values.assign(out.rows * out.cols, 0.0);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t flat = 0; flat < utility.size(); ++flat) {
    double w = 1.0;
    for (int i = 0; i < n - 1 && w != 0.0; ++i) {
      if (i != member) w *= profile[i][idx[static_cast<std::size_t>(i)]];
    }
    if (w != 0.0) {
      out(static_cast<std::size_t>(idx[static_cast<std::size_t>(member)]),
          static_cast<std::size_t>(idx.back())) += w * utility[flat];
    }
    for (int i = n - 1; i >= 0; --i) {
      auto& d = idx[static_cast<std::size_t>(i)];
      if (++d < game.num_actions(i)) break;
      d = 0;
    }
  }
  return out;
}

NashVerdict verify_nash(const TeamGame& game, const TeamProfile& profile,
                        const MixedStrategy& adversary, double tol) {
  check_profile_shape(game, profile);
  if (!(tol >= 0.0)) throw StructuralError("tolerance must be >= 0");
  if (adversary.size() != game.adversary_actions()) {
    throw StructuralError("adversary strategy has the wrong number of actions");
  }
  std::vector<MixedStrategy> all = profile.strategies();
  all.push_back(MixedStrategy(game.adversary(), std::vector<double>(adversary.probs().begin(),
                                                                    adversary.probs().end())));
  NashVerdict verdict;
  verdict.value = expected_team_utility(game, profile, adversary);
  verdict.is_equilibrium = true;
  for (int p = 0; p < game.num_players(); ++p) {
    const auto payoffs = deviation_payoffs(game, all, p);
    const bool is_adversary = p == game.adversary();
    double best_gain = 0.0;
    int best_action = -1;
    for (std::size_t a = 0; a < payoffs.size(); ++a) {
      const double gain = is_adversary ? verdict.value - payoffs[a] : payoffs[a] - verdict.value;
      if (gain > best_gain) {
        best_gain = gain;
        best_action = static_cast<int>(a);
      }
    }
    verdict.max_gain.push_back(best_gain);
    verdict.best_deviation.push_back(best_action);
    if (best_gain > tol) verdict.is_equilibrium = false;
  }
  return verdict;
}

TeamGame normalize_payoffs(const TeamGame& game) {
  const double lo = game.min_payoff();
  const double hi = game.max_payoff();
  std::vector<double> scaled(game.team_utility().begin(), game.team_utility().end());
  if (hi > lo) {
    const double range = hi - lo;
    for (double& u : scaled) u = (u - lo) / range;
  } else {
    std::fill(scaled.begin(), scaled.end(), 0.0);
  }
  GameMetadata meta = game.metadata();
  meta.params["normalized_from_min"] = lo;
  meta.params["normalized_from_max"] = hi;
  return TeamGame(std::vector<int>(game.actions_per_player().begin(),
                                   game.actions_per_player().end()),
                  std::move(scaled), std::move(meta));
}

PayoffMatrix to_joint_game(const TeamGame& game) {
  PayoffMatrix out;
  out.rows = game.num_joint_team_actions();
  out.cols = static_cast<std::size_t>(game.adversary_actions());
  out.values.assign(game.team_utility().begin(), game.team_utility().end());
  return out;
}

double worst_case_value(const TeamGame& game, const JointDistribution& p) {
  const auto team = game.actions_per_player().first(static_cast<std::size_t>(game.num_team_members()));
  if (!std::equal(team.begin(), team.end(), p.team_actions().begin(), p.team_actions().end())) {
    throw StructuralError("joint distribution does not match the team's action sets");
  }
  const auto per_action = detail::contract_outermost(game.team_utility(), p.probs());
  return *std::min_element(per_action.begin(), per_action.end());
}

}  // namespace tmm
