#include "cli.hpp"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "teammaxmin/errors.hpp"
#include "teammaxmin/game_io.hpp"
#include "teammaxmin/generators.hpp"
#include "teammaxmin/metrics.hpp"

namespace tmm::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

void print_config(std::ostream& os, const Json& config) { os << "config: " << config.dump() << '\n'; }

std::string num(double x) { return format_double(x); }

std::string vec(std::span<const double> v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + "]";
}

struct GenerateArgs {
  std::string family;
  int n = 3;
  int m = 2;
  std::uint64_t seed = 1;
  bool flawed = false;
  bool normalize = false;
  std::string out;
};

struct SolveArgs {
  std::string game;
  std::string solver = "global";
  double epsilon = 0.5;
  std::uint64_t budget = 0;
  std::string init = "uniform";
  int action = 0;
  int restarts = 1;
  std::uint64_t seed = 1;
  int max_rounds = 1000;
  double accuracy = 1e-6;
  std::int64_t max_nodes = 20000;
  bool no_refine = false;
  double target = 1e-3;
  double timeout = kDefaultTimeout.count();
  bool normalize = false;
  std::string report;
};

struct SolverFlags {
  CLI::Option* epsilon;
  CLI::Option* budget;
  CLI::Option* init;
  CLI::Option* action;
  CLI::Option* restarts;
  CLI::Option* seed;
  CLI::Option* max_rounds;
  CLI::Option* accuracy;
  CLI::Option* max_nodes;
  CLI::Option* no_refine;
  CLI::Option* target;
};

void add_solver_flags(CLI::App* cmd, SolveArgs& a, SolverFlags& f) {
  cmd->add_option("--solver", a.solver, "Solver")
      ->check(CLI::IsMember(solver_names()))
      ->capture_default_str();
  f.epsilon = cmd->add_option("--epsilon", a.epsilon, "support-enum: additive accuracy in (0,1]")
                  ->capture_default_str();
  f.budget = cmd->add_option("--budget", a.budget, "support-enum: candidate cap (0 = none)")
                 ->capture_default_str();
  f.init = cmd->add_option("--init", a.init, "iterated-lp: uniform | pure | random")
               ->check(CLI::IsMember({"uniform", "pure", "random"}))
               ->capture_default_str();
  f.action = cmd->add_option("--action", a.action, "iterated-lp: action index for --init pure")
                 ->capture_default_str();
  f.restarts = cmd->add_option("--restarts", a.restarts,
                               "iterated-lp / global: number of restarts (default 1 / 10)");
  f.seed = cmd->add_option("--seed", a.seed, "iterated-lp / global: master seed")
               ->capture_default_str();
  f.max_rounds = cmd->add_option("--max-rounds", a.max_rounds, "iterated-lp: rounds per restart")
                     ->capture_default_str();
  f.accuracy = cmd->add_option("--accuracy", a.accuracy, "global: target upper - lower gap")
                   ->capture_default_str();
  f.max_nodes = cmd->add_option("--max-nodes", a.max_nodes, "global: box refinement node cap")
                    ->capture_default_str();
  f.no_refine = cmd->add_flag("--no-refine", a.no_refine, "global: skip box refinement");
  f.target = cmd->add_option("--target", a.target, "oracle: certified error target")
                 ->capture_default_str();
  cmd->add_option("--timeout", a.timeout, "Time limit in seconds for iterated-lp and global")
      ->capture_default_str();
}

SolverSpec resolve_solver(const SolveArgs& a, const SolverFlags& f) {
  const std::map<std::string, std::vector<CLI::Option*>> applicable = {
      {"correlated", {}},
      {"reconstruct", {}},
      {"support-enum", {f.epsilon, f.budget}},
      {"iterated-lp", {f.init, f.action, f.restarts, f.seed, f.max_rounds}},
      {"global", {f.accuracy, f.restarts, f.seed, f.max_nodes, f.no_refine}},
      {"oracle", {f.target}},
  };
  const auto& ok = applicable.at(a.solver);
  for (CLI::Option* opt : {f.epsilon, f.budget, f.init, f.action, f.restarts, f.seed,
                           f.max_rounds, f.accuracy, f.max_nodes, f.no_refine, f.target}) {
    if (opt->count() > 0 && std::find(ok.begin(), ok.end(), opt) == ok.end()) {
      throw UsageError(opt->get_name() + " does not apply to solver " + a.solver);
    }
  }
  SolverSpec spec{a.solver, Json::object()};
  if (a.solver == "support-enum") {
    spec.params["epsilon"] = a.epsilon;
    if (a.budget > 0) spec.params["budget"] = a.budget;
  } else if (a.solver == "iterated-lp") {
    spec.params["init"] = a.init;
    if (a.init == "pure") spec.params["action"] = a.action;
    spec.params["restarts"] = f.restarts->count() ? a.restarts : 1;
    spec.params["seed"] = a.seed;
    spec.params["max_rounds"] = a.max_rounds;
  } else if (a.solver == "global") {
    spec.params["accuracy"] = a.accuracy;
    spec.params["restarts"] = f.restarts->count() ? a.restarts : 10;
    spec.params["seed"] = a.seed;
    spec.params["max_nodes"] = a.max_nodes;
    spec.params["refine"] = !a.no_refine;
  } else if (a.solver == "oracle") {
    spec.params["target"] = a.target;
  }
  return spec;
}

TeamGame load_game(const std::string& path, bool normalize) {
  TeamGame game = read_game_file(path);
  return normalize ? normalize_payoffs(game) : game;
}

void print_report(std::ostream& out, const SolveReport& r) {
  out << "solver: " << r.solver << '\n'
      << "lower_bound: " << num(r.lower_bound) << '\n'
      << "upper_bound: " << num(r.upper_bound) << '\n'
      << "ratio: " << num(bound_ratio(r.lower_bound, r.upper_bound)) << '\n'
      << "iterations: " << r.iterations << '\n'
      << "restarts: " << r.restarts_used << '\n'
      << "converged: " << (r.converged ? "true" : "false") << '\n'
      << "wall_ms: " << num(r.wall_time.count() * 1000.0) << '\n';
  for (const auto& s : r.witness.strategies()) {
    out << "witness[" << s.owner() << "]: " << vec(s.probs()) << '\n';
  }
}

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  Json config = {{"command", "generate"}, {"family", a.family}, {"n", a.n},
                 {"m", a.m},              {"seed", a.seed},     {"fixed_sign", !a.flawed},
                 {"normalize", a.normalize}, {"out", a.out.empty() ? "-" : a.out}};
  print_config(a.out.empty() ? err : out, config);
  GeneratedInstance inst = make_family(a.family, FamilyParams{a.n, a.m, a.seed, !a.flawed});
  TeamGame game = a.normalize ? normalize_payoffs(inst.game) : std::move(inst.game);
  const std::string text = dump_json(game_to_json(game));
  if (a.out.empty()) {
    out << text;
  } else {
    write_text_file(a.out, text);
    out << "wrote " << a.out << " (" << game.num_outcomes() << " payoffs)\n";
  }
  return kOk;
}

int cmd_solve(const SolveArgs& a, const SolverFlags& f, std::ostream& out) {
  const SolverSpec spec = resolve_solver(a, f);
  if (!(a.timeout >= 0.0)) throw UsageError("--timeout must be non-negative");
  print_config(out, {{"command", "solve"},
                     {"game", a.game},
                     {"solver", spec.name},
                     {"params", spec.params},
                     {"timeout_s", a.timeout},
                     {"normalize", a.normalize}});
  const TeamGame game = load_game(a.game, a.normalize);
  const SolveReport report = run_solver(game, spec, Seconds(a.timeout));
  print_report(out, report);
  if (!a.report.empty()) {
    write_text_file(a.report, dump_json(report_to_json(report)));
    out << "report: " << a.report << '\n';
  }
  return kOk;
}

int cmd_evaluate(const std::string& game_path, const std::string& profile_path, bool normalize,
                 std::ostream& out) {
  print_config(out, {{"command", "evaluate"},
                     {"game", game_path},
                     {"profile", profile_path},
                     {"normalize", normalize}});
  const TeamGame game = load_game(game_path, normalize);
  const FullProfile profile = profile_from_json(game, read_json_file(profile_path));
  const ValueReport v = team_value(game, profile.team);
  out << "team_value: " << num(v.value) << '\n'
      << "minimizing_adversary_action: " << v.minimizing_adversary_action << '\n'
      << "per_adversary_action: " << vec(v.expected_utilities_per_adversary_action) << '\n';
  if (profile.adversary) {
    out << "expected_team_utility: "
        << num(expected_team_utility(game, profile.team, *profile.adversary)) << '\n';
  }
  return kOk;
}

int cmd_verify_nash(const std::string& game_path, const std::string& profile_path, double tol,
                    std::ostream& out) {
  if (!(tol >= 0.0)) throw UsageError("--tol must be non-negative");
  print_config(out, {{"command", "verify-nash"},
                     {"game", game_path},
                     {"profile", profile_path},
                     {"tol", tol}});
  const TeamGame game = read_game_file(game_path);
  const FullProfile profile = profile_from_json(game, read_json_file(profile_path));
  if (!profile.adversary) {
    throw InputError("verify-nash needs a full profile with the adversary's strategy last");
  }
  const NashVerdict verdict = verify_nash(game, profile.team, *profile.adversary, tol);
  out << "team_value: " << num(verdict.value) << '\n';
  for (std::size_t p = 0; p < verdict.max_gain.size(); ++p) {
    out << "player " << p << ": max_gain " << num(verdict.max_gain[p]);
    if (verdict.best_deviation[p] >= 0) out << " via action " << verdict.best_deviation[p];
    out << '\n';
  }
  const double worst = *std::max_element(verdict.max_gain.begin(), verdict.max_gain.end());
  out << "max_gap: " << num(worst) << '\n'
      << "verdict: " << (verdict.is_equilibrium ? "equilibrium" : "not an equilibrium") << '\n';
  return verdict.is_equilibrium ? kOk : kVerificationFailed;
}

int cmd_pou(const SolveArgs& a, const SolverFlags& f, bool certify, double oracle_target,
            std::ostream& out) {
  const SolverSpec spec = resolve_solver(a, f);
  print_config(out, {{"command", "pou"},
                     {"game", a.game},
                     {"solver", spec.name},
                     {"params", spec.params},
                     {"certify", certify},
                     {"oracle_target", oracle_target},
                     {"timeout_s", a.timeout},
                     {"normalize", a.normalize}});
  const TeamGame game = load_game(a.game, a.normalize);
  PouOptions opts;
  opts.certify = certify;
  opts.oracle_target = oracle_target;
  opts.timeout = Seconds(a.timeout);
  const PouReport r = compute_pou(game, spec, opts);
  out << "v_correlated: " << num(r.v_correlated) << '\n'
      << "v_team_lower: " << num(r.v_team_lower) << '\n'
      << "v_team_upper: " << num(r.v_team_upper) << '\n'
      << "pou_upper_estimate: " << num(r.pou_upper_estimate) << '\n'
      << "exact: " << (r.exact ? "true" : "false") << '\n';
  if (r.oracle_error) out << "oracle_error: " << num(*r.oracle_error) << '\n';
  return kOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir, int workers,
                   std::ostream& out) {
  const std::filesystem::path path(config_path);
  ExperimentConfig config = parse_experiment_config(read_json_file(path), path.parent_path());
  if (workers > 0) config.workers = workers;
  Json resolved = experiment_config_to_json(config);
  resolved["out"] = out_dir;
  print_config(out, resolved);
  const ExperimentResult result = run_experiment(config);
  std::size_t failures = 0;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) {
      ++failures;
      out << "failed: " << row.instance_id << " / " << row.solver << ": " << row.error << '\n';
    }
  }
  for (const auto& written : write_experiment_outputs(result, config, out_dir)) {
    out << "wrote " << written.string() << '\n';
  }
  out << "rows: " << result.rows.size() << ", failed: " << failures << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Team-maxmin equilibria of adversarial team games"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a game instance as JSON");
  generate->add_option("family", gen.family, "Game family")
      ->required()
      ->check(CLI::IsMember(family_names()));
  generate->add_option("--n", gen.n, "Number of players")->capture_default_str();
  generate->add_option("--m", gen.m, "Actions per player")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Seed for the random family")->capture_default_str();
  auto* fixed = generate->add_flag("--fixed", "irrational: sign-corrected payoffs (default)");
  auto* flawed = generate->add_flag("--flawed", gen.flawed, "irrational: original payoffs");
  fixed->excludes(flawed);
  generate->add_flag("--normalize", gen.normalize, "Rescale payoffs into [0,1]");
  generate->add_option("-o,--out", gen.out, "Output file (default: standard output)");

  SolveArgs solve_args;
  SolverFlags solve_flags{};
  auto* solve = app.add_subcommand("solve", "Bound the team-maxmin value of a game");
  solve->add_option("game", solve_args.game, "Game file")->required();
  add_solver_flags(solve, solve_args, solve_flags);
  solve->add_flag("--normalize", solve_args.normalize, "Rescale payoffs into [0,1] first");
  solve->add_option("--report", solve_args.report, "Also write the report as JSON");

  std::string eval_game, eval_profile;
  bool eval_normalize = false;
  auto* evaluate = app.add_subcommand("evaluate", "Team value of a strategy profile");
  evaluate->add_option("game", eval_game, "Game file")->required();
  evaluate->add_option("profile", eval_profile, "Profile file")->required();
  evaluate->add_flag("--normalize", eval_normalize, "Rescale payoffs into [0,1] first");

  std::string nash_game, nash_profile;
  double nash_tol = 1e-9;
  auto* nash = app.add_subcommand("verify-nash", "Check a full profile for profitable deviations");
  nash->add_option("game", nash_game, "Game file")->required();
  nash->add_option("profile", nash_profile, "Profile file, adversary last")->required();
  nash->add_option("--tol", nash_tol, "Largest tolerated gain")->capture_default_str();

  SolveArgs pou_args;
  SolverFlags pou_flags{};
  bool certify = false;
  double oracle_target = 1e-3;
  auto* pou = app.add_subcommand("pou", "Price of uncorrelation estimate");
  pou->add_option("game", pou_args.game, "Game file")->required();
  add_solver_flags(pou, pou_args, pou_flags);
  pou->add_flag("--certify", certify, "Check the team bound against the grid oracle");
  pou->add_option("--oracle-target", oracle_target, "Grid oracle error target")
      ->capture_default_str();
  pou->add_flag("--normalize", pou_args.normalize, "Rescale payoffs into [0,1] first");

  std::string exp_config, exp_out = "results";
  int exp_workers = 0;
  auto* experiment = app.add_subcommand("experiment", "Run a batch experiment from a config");
  experiment->add_option("config", exp_config, "Experiment config (JSON)")->required();
  experiment->add_option("-o,--out", exp_out, "Output directory")->capture_default_str();
  experiment->add_option("--workers", exp_workers, "Override the configured worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen, out, err);
    if (*solve) return cmd_solve(solve_args, solve_flags, out);
    if (*evaluate) return cmd_evaluate(eval_game, eval_profile, eval_normalize, out);
    if (*nash) return cmd_verify_nash(nash_game, nash_profile, nash_tol, out);
    if (*pou) return cmd_pou(pou_args, pou_flags, certify, oracle_target, out);
    if (*experiment) return cmd_experiment(exp_config, exp_out, exp_workers, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const CapacityError& e) {
    err << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const StructuralError& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace tmm::cli
