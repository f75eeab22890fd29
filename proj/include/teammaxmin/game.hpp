#pragma once

// Adversarial team games in normal form.
//
// Players are 0-based. Players 0..n-2 form the team and share the utility
// tensor; player n-1 is the adversary and receives its negation. The tensor
// is dense and row-major with player 0 outermost and the adversary
// innermost, so entry (a_0, ..., a_{n-1}) lives at
//   ((a_0 * m_1 + a_1) * m_2 + ...) * m_{n-1} + a_{n-1}.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tmm {

inline constexpr double kProbabilityTolerance = 1e-9;

/// Upper limit on dense tensor / joint-matrix entries (8 bytes each).
inline constexpr std::size_t kMaxTensorEntries = std::size_t{1} << 27;

struct GameMetadata {
  std::string name;
  std::string generator;
  std::map<std::string, double> params;
  std::optional<std::uint64_t> seed;
  std::string notes;
};

class TeamGame {
 public:
  /// Throws StructuralError on inconsistent shapes or non-finite payoffs and
  /// CapacityError when the tensor exceeds kMaxTensorEntries.
  TeamGame(std::vector<int> actions_per_player, std::vector<double> team_utility,
           GameMetadata metadata = {});

  int num_players() const { return static_cast<int>(actions_.size()); }
  int num_team_members() const { return num_players() - 1; }
  int adversary() const { return num_players() - 1; }

  int num_actions(int player) const;
  std::span<const int> actions_per_player() const { return actions_; }
  int adversary_actions() const { return actions_.back(); }
  /// Largest action count among team members; the `m` of the worst-case
  /// bounds for heterogeneous games.
  int max_team_actions() const;

  /// Number of joint team actions, i.e. |A_0 x ... x A_{n-2}|.
  std::size_t num_joint_team_actions() const { return joint_team_actions_; }
  std::size_t num_outcomes() const { return utility_.size(); }

  std::span<const double> team_utility() const { return utility_; }
  double utility_at(std::span<const int> actions) const;
  std::size_t flat_index(std::span<const int> actions) const;

  double min_payoff() const;
  double max_payoff() const;
  bool payoffs_in_unit_interval() const;

  const GameMetadata& metadata() const { return metadata_; }
  GameMetadata& metadata() { return metadata_; }

 private:
  std::vector<int> actions_;
  std::vector<double> utility_;
  std::size_t joint_team_actions_ = 1;
  GameMetadata metadata_;
};

class MixedStrategy {
 public:
  /// Rejects negative or non-finite entries and sums farther than
  /// kProbabilityTolerance from one; nothing is renormalized.
  MixedStrategy(int owner, std::vector<double> probs);

  static MixedStrategy uniform(int owner, int num_actions);
  static MixedStrategy pure(int owner, int num_actions, int action);
  /// Builds a strategy from solver output: clips entries in [-tol, 0) to zero
  /// and rescales. Anything farther off is still rejected.
  static MixedStrategy from_solver_values(int owner, std::span<const double> values,
                                          double tol = 1e-7);

  int owner() const { return owner_; }
  int size() const { return static_cast<int>(probs_.size()); }
  std::span<const double> probs() const { return probs_; }
  double operator[](int action) const { return probs_[static_cast<std::size_t>(action)]; }

  /// Actions with strictly positive probability.
  std::vector<int> support() const;

 private:
  int owner_;
  std::vector<double> probs_;
};

class TeamProfile {
 public:
  /// Owners must be 0, 1, ..., k-1 in order.
  explicit TeamProfile(std::vector<MixedStrategy> strategies);

  static TeamProfile uniform(const TeamGame& game);
  /// Every member plays `action` (which must be valid for all of them).
  static TeamProfile pure(const TeamGame& game, int action);
  static TeamProfile pure(const TeamGame& game, std::span<const int> actions);

  int size() const { return static_cast<int>(strategies_.size()); }
  const MixedStrategy& operator[](int member) const {
    return strategies_[static_cast<std::size_t>(member)];
  }
  const std::vector<MixedStrategy>& strategies() const { return strategies_; }

  /// Copy with one member's strategy swapped out.
  TeamProfile with(const MixedStrategy& replacement) const;

 private:
  std::vector<MixedStrategy> strategies_;
};

/// Correlated team strategy over A_0 x ... x A_{n-2}, indexed row-major with
/// member 0 outermost (the same layout as the rows of to_joint_game).
class JointDistribution {
 public:
  JointDistribution(std::vector<int> team_actions, std::vector<double> probs);

  static JointDistribution point_mass(std::vector<int> team_actions,
                                      std::span<const int> joint_action);
  static JointDistribution from_solver_values(std::vector<int> team_actions,
                                              std::span<const double> values,
                                              double tol = 1e-7);

  std::span<const int> team_actions() const { return team_actions_; }
  std::span<const double> probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

  std::size_t index_of(std::span<const int> joint_action) const;
  std::vector<int> joint_action(std::size_t index) const;

  std::vector<double> marginal(int member) const;
  /// supp_i: actions of `member` with positive marginal mass.
  std::vector<int> support(int member) const;

 private:
  std::vector<int> team_actions_;
  std::vector<double> probs_;
};

struct ValueReport {
  double value = 0.0;
  int minimizing_adversary_action = 0;
  std::vector<double> expected_utilities_per_adversary_action;
};

/// Dense row-major payoff matrix for a maximizing row player.
struct PayoffMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

/// Team value against a best-responding adversary. Pure adversary actions
/// suffice because the expectation is linear in the adversary's mix; ties go
/// to the lowest action index.
ValueReport team_value(const TeamGame& game, const TeamProfile& profile);

/// Full multilinear expectation of U_T with the adversary mixing too.
double expected_team_utility(const TeamGame& game, const TeamProfile& profile,
                             const MixedStrategy& adversary);

/// Expected U_T for every pure action of `player` with everyone else mixing
/// according to `strategies` (one per player, adversary last).
std::vector<double> deviation_payoffs(const TeamGame& game,
                                      std::span<const MixedStrategy> strategies, int player);

/// Expected team utility of each team action for `member` while the other
/// team members play `profile`, laid out as matrix[a_member][a_adversary].
PayoffMatrix member_payoff_matrix(const TeamGame& game, const TeamProfile& profile,
                                  int member);

struct NashVerdict {
  bool is_equilibrium = false;
  /// Largest gain from a pure unilateral deviation, one entry per player
  /// (adversary last, measured on -U_T). Never negative.
  std::vector<double> max_gain;
  std::vector<int> best_deviation;
  double value = 0.0;
};

NashVerdict verify_nash(const TeamGame& game, const TeamProfile& profile,
                        const MixedStrategy& adversary, double tol);

/// Positive affine rescale into [0,1]; a constant tensor maps to all zeros.
TeamGame normalize_payoffs(const TeamGame& game);

/// Correlated-team reduction: rows are joint team actions, columns adversary
/// actions.
PayoffMatrix to_joint_game(const TeamGame& game);

/// Worst-case value of a correlated team strategy: min over adversary actions.
double worst_case_value(const TeamGame& game, const JointDistribution& p);

}  // namespace tmm
