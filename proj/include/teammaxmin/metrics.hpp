#pragma once

// Efficiency metrics (price of uncorrelation, approximation ratios) and the
// batch experiment harness.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "teammaxmin/game.hpp"
#include "teammaxmin/game_io.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

/// A solver name plus its parameters. Recognized names:
///   correlated    upper = v_C, lower from reconstructing with pivot 0
///   reconstruct   reconstruct_best_pivot
///   support-enum  {"epsilon": 0.5, "budget": N}
///   iterated-lp   {"init": "uniform"|"pure"|"random", "action": 0,
///                  "restarts": 1, "seed": 1, "max_rounds": 1000}
///   global        {"accuracy": 1e-6, "restarts": 10, "seed": 1,
///                  "max_nodes": 20000, "refine": true}
///   oracle        {"target": 1e-3, "max_profiles": 2e8}
struct SolverSpec {
  std::string name;
  Json params = Json::object();
};

std::vector<std::string> solver_names();

/// Runs one solver. `timeout` bounds iterated-lp and global; the other
/// solvers finish in a predictable number of steps.
SolveReport run_solver(const TeamGame& game, const SolverSpec& spec,
                       Seconds timeout = kDefaultTimeout);

struct PouReport {
  double v_correlated = 0.0;
  double v_team_lower = 0.0;
  double v_team_upper = 0.0;
  /// v_correlated / v_team_lower: an upper bound on the true ratio whenever
  /// v_team_lower is a valid lower bound.
  double pou_upper_estimate = 0.0;
  /// True when the grid oracle certifies that v_team_lower is within its
  /// error of the team-maxmin value.
  bool exact = false;
  std::optional<double> oracle_error;
};

struct PouOptions {
  bool certify = false;
  double oracle_target = 1e-3;
  Seconds timeout = kDefaultTimeout;
};

PouReport compute_pou(const TeamGame& game, const SolverSpec& team_solver,
                      const PouOptions& options = {});

struct RatioResult {
  double value = 0.0;
  /// The report beat the baseline.
  bool above_one = false;
};

/// report.lower / baseline.lower. A non-positive baseline with a positive
/// numerator gives +infinity; two zero lower bounds give 1.
RatioResult approximation_ratio(const SolveReport& report, const SolveReport& baseline);

/// lower / upper as reported in result tables; 1 when both are zero.
double bound_ratio(double lower, double upper);

// ---------------------------------------------------------------------------
// Experiments

struct InstanceSpec {
  std::string generator;  // a family name, or empty when `file` is set
  std::vector<int> n{3};
  std::vector<int> m{2};
  std::vector<std::uint64_t> seeds{1};
  bool fixed_sign = true;
  std::optional<std::filesystem::path> file;
};

struct ExperimentConfig {
  std::vector<InstanceSpec> instances;
  std::vector<SolverSpec> solvers;
  Seconds timeout = kDefaultTimeout;
  int workers = 1;
  /// Write wall_ms = 0 so that replays are byte-identical.
  bool record_wall_time = true;
  /// Rescale every instance into [0,1] before solving.
  bool normalize = false;
  /// Solver whose lower bound the approximation ratios are measured against.
  std::optional<std::string> baseline;
  /// Team solver for the price-of-uncorrelation table.
  std::optional<SolverSpec> pou_solver;
};

/// Relative file paths are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(const Json& j,
                                         const std::filesystem::path& base_dir = {});
Json experiment_config_to_json(const ExperimentConfig& config);

struct ResultRow {
  std::string instance_id;
  std::string generator;
  int n = 0;
  int m = 0;
  std::optional<std::uint64_t> seed;
  std::string solver;
  std::string params;
  double lower = 0.0;
  double upper = 0.0;
  double ratio = 0.0;
  std::int64_t iterations = 0;
  int restarts = 0;
  double wall_ms = 0.0;
  bool converged = false;
  /// Set when the solver threw; bounds are then NaN.
  std::string error;
};

struct AggregateRow {
  int n = 0;
  int m = 0;
  std::string solver;
  std::size_t count = 0;
  double lower_mean = 0.0, lower_q1 = 0.0, lower_median = 0.0, lower_q3 = 0.0;
  double ratio_mean = 0.0, ratio_q1 = 0.0, ratio_median = 0.0, ratio_q3 = 0.0;
  double wall_ms_mean = 0.0;
};

struct BaselineRow {
  std::string instance_id;
  std::string solver;
  std::string baseline;
  double ratio = 0.0;
  bool above_one = false;
};

struct PouRow {
  std::string instance_id;
  int n = 0;
  int m = 0;
  std::optional<std::uint64_t> seed;
  PouReport report;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<AggregateRow> aggregate;
  std::vector<BaselineRow> baseline_ratios;
  std::vector<PouRow> pou;
};

/// Rows are sorted by (instance_id, solver, params). Solver failures are
/// recorded in the row and never abort the batch.
ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr const char* kResultsHeader =
    "instance_id,generator,n,m,seed,solver,params,lower,upper,ratio,iterations,restarts,"
    "wall_ms,converged";

std::string results_csv(const std::vector<ResultRow>& rows);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::string baseline_csv(const std::vector<BaselineRow>& rows);
std::string pou_csv(const std::vector<PouRow>& rows);

/// Writes results.csv and aggregate.csv, plus baseline.csv / pou.csv when
/// configured. Returns the paths written.
std::vector<std::filesystem::path> write_experiment_outputs(const ExperimentResult& result,
                                                            const ExperimentConfig& config,
                                                            const std::filesystem::path& out_dir);

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" otherwise.
std::string format_double(double x);

}  // namespace tmm
