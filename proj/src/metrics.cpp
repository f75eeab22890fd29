#include "teammaxmin/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "teammaxmin/errors.hpp"
#include "teammaxmin/generators.hpp"

namespace tmm {

namespace {

const std::map<std::string, std::set<std::string>>& allowed_params() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"correlated", {}},
      {"reconstruct", {}},
      {"support-enum", {"epsilon", "budget"}},
      {"iterated-lp", {"init", "action", "restarts", "seed", "max_rounds"}},
      {"global", {"accuracy", "restarts", "seed", "max_nodes", "refine"}},
      {"oracle", {"target", "max_profiles"}},
  };
  return table;
}

void check_params(const SolverSpec& spec) {
  const auto it = allowed_params().find(spec.name);
  if (it == allowed_params().end()) throw InputError("unknown solver '" + spec.name + "'");
  if (!spec.params.is_object()) throw InputError("solver params must be an object");
  for (const auto& [key, value] : spec.params.items()) {
    if (!it->second.count(key)) {
      throw InputError("solver '" + spec.name + "' has no parameter '" + key + "'");
    }
  }
}

double num(const Json& params, const char* key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!it->is_number()) throw InputError(std::string("parameter '") + key + "' must be a number");
  return it->get<double>();
}

std::uint64_t count(const Json& params, const char* key, std::uint64_t fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer() && it->get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(it->get<std::int64_t>());
  }
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (v >= 0.0 && v == std::floor(v) && v < 1.8e19) return static_cast<std::uint64_t>(v);
  }
  throw InputError(std::string("parameter '") + key + "' must be a non-negative integer");
}

bool flag(const Json& params, const char* key, bool fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!it->is_boolean()) throw InputError(std::string("parameter '") + key + "' must be a boolean");
  return it->get<bool>();
}

std::string text(const Json& params, const char* key, const std::string& fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (!it->is_string()) throw InputError(std::string("parameter '") + key + "' must be a string");
  return it->get<std::string>();
}

int to_int(std::uint64_t v, const char* key) {
  if (v > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw InputError(std::string("parameter '") + key + "' is too large");
  }
  return static_cast<int>(v);
}

SolveReport run_correlated(const TeamGame& game) {
  const auto start = std::chrono::steady_clock::now();
  const CorrelatedSolution sol = correlated_team_maxmin(game);
  TeamProfile witness = reconstruct_mixed(sol.distribution, game, 0);
  const double lower = team_value(game, witness).value;
  SolveReport report("correlated", std::move(witness));
  report.lower_bound = lower;
  report.upper_bound = std::max(sol.value, lower);
  report.iterations = 1;
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

SolveReport run_oracle(const TeamGame& game, const Json& params) {
  const auto start = std::chrono::steady_clock::now();
  GridOracleOptions opts;
  opts.max_profiles = count(params, "max_profiles", opts.max_profiles);
  const GridOracleResult res = grid_oracle(game, num(params, "target", 1e-3), opts);
  SolveReport report("oracle", *res.best_profile);
  report.lower_bound = res.estimate;
  report.upper_bound = res.estimate + res.certified_error;
  report.iterations = static_cast<std::int64_t>(res.profiles_evaluated);
  report.wall_time = std::chrono::steady_clock::now() - start;
  return report;
}

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string seed_field(const std::optional<std::uint64_t>& seed) {
  return seed ? std::to_string(*seed) : std::string();
}

bool fixed_size_family(const std::string& family) {
  return family == "poa" || family == "pou-one" || family == "irrational";
}

struct Instance {
  std::string id;
  std::string generator;
  std::optional<std::uint64_t> seed;
  TeamGame game;
};

std::vector<Instance> materialize(const ExperimentConfig& config) {
  std::vector<Instance> out;
  std::set<std::string> seen;
  auto add = [&](std::string id, std::string generator, std::optional<std::uint64_t> seed,
                 TeamGame game) {
    if (!seen.insert(id).second) return;
    if (config.normalize) game = normalize_payoffs(game);
    out.push_back({std::move(id), std::move(generator), seed, std::move(game)});
  };
  for (const auto& spec : config.instances) {
    if (spec.file) {
      TeamGame game = read_game_file(*spec.file);
      std::string id = game.metadata().name.empty() ? spec.file->stem().string()
                                                    : game.metadata().name;
      std::string generator = game.metadata().generator.empty() ? std::string("file")
                                                                : game.metadata().generator;
      auto seed = game.metadata().seed;
      add(std::move(id), std::move(generator), seed, std::move(game));
      continue;
    }
    const bool fixed = fixed_size_family(spec.generator);
    const std::vector<int> ns = fixed ? std::vector<int>{0} : spec.n;
    const std::vector<int> ms = fixed ? std::vector<int>{0} : spec.m;
    for (int n : ns) {
      for (int m : ms) {
        for (std::uint64_t seed : spec.seeds) {
          FamilyParams params{n, m, seed, spec.fixed_sign};
          GeneratedInstance inst = make_family(spec.generator, params);
          std::string id = inst.game.metadata().name;
          if (spec.generator != "random") id += "-s" + std::to_string(seed);
          add(std::move(id), spec.generator, seed, std::move(inst.game));
        }
      }
    }
  }
  return out;
}

ResultRow make_row(const Instance& inst, const SolverSpec& spec, Seconds timeout,
                   bool record_wall_time, std::optional<SolveReport>* keep) {
  ResultRow row;
  row.instance_id = inst.id;
  row.generator = inst.generator;
  row.n = inst.game.num_players();
  row.m = inst.game.max_team_actions();
  row.seed = inst.seed;
  row.solver = spec.name;
  row.params = spec.params.dump();
  try {
    SolveReport report = run_solver(inst.game, spec, timeout);
    row.lower = report.lower_bound;
    row.upper = report.upper_bound;
    row.ratio = bound_ratio(row.lower, row.upper);
    row.iterations = report.iterations;
    row.restarts = report.restarts_used;
    row.wall_ms = record_wall_time ? report.wall_time.count() * 1000.0 : 0.0;
    row.converged = report.converged;
    if (keep) keep->emplace(std::move(report));
  } catch (const std::exception& e) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.lower = row.upper = row.ratio = nan;
    row.converged = false;
    row.error = e.what();
  }
  return row;
}

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(std::max(1, workers));
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<std::string> solver_names() {
  std::vector<std::string> names;
  for (const auto& [name, keys] : allowed_params()) names.push_back(name);
  return names;
}

SolveReport run_solver(const TeamGame& game, const SolverSpec& spec, Seconds timeout) {
  check_params(spec);
  const Json& p = spec.params;
  if (spec.name == "correlated") return run_correlated(game);
  if (spec.name == "reconstruct") return reconstruct_best_pivot(game);
  if (spec.name == "support-enum") {
    SupportEnumerationOptions opts;
    if (p.contains("budget")) opts.budget = count(p, "budget", 0);
    return support_enumeration(game, num(p, "epsilon", 0.5), opts);
  }
  if (spec.name == "iterated-lp") {
    IteratedLpOptions opts;
    opts.restarts = to_int(count(p, "restarts", 1), "restarts");
    opts.seed = count(p, "seed", 1);
    opts.max_rounds = to_int(count(p, "max_rounds", 1000), "max_rounds");
    opts.timeout = timeout;
    const std::string init = text(p, "init", "uniform");
    if (init == "uniform") {
      opts.init = UniformInit{};
    } else if (init == "pure") {
      opts.init = PureInit{to_int(count(p, "action", 0), "action")};
    } else if (init == "random") {
      opts.init = RandomInit{opts.seed};
    } else {
      throw InputError("init must be uniform, pure or random");
    }
    return iterated_lp(game, opts);
  }
  if (spec.name == "global") {
    GlobalOptions opts;
    opts.accuracy = num(p, "accuracy", opts.accuracy);
    opts.iterated_restarts = to_int(count(p, "restarts", 10), "restarts");
    opts.seed = count(p, "seed", 1);
    opts.max_nodes = static_cast<std::int64_t>(count(p, "max_nodes", 20000));
    opts.refine = flag(p, "refine", true);
    opts.budget = timeout;
    return global_optimize(game, opts);
  }
  return run_oracle(game, p);
}

PouReport compute_pou(const TeamGame& game, const SolverSpec& team_solver,
                      const PouOptions& options) {
  PouReport out;
  out.v_correlated = correlated_team_maxmin(game).value;
  const SolveReport report = run_solver(game, team_solver, options.timeout);
  out.v_team_lower = report.lower_bound;
  out.v_team_upper = std::min(report.upper_bound, out.v_correlated);
  if (options.certify) {
    const GridOracleResult oracle = grid_oracle(game, options.oracle_target);
    out.oracle_error = oracle.certified_error;
    out.v_team_upper = std::min(out.v_team_upper, oracle.estimate + oracle.certified_error);
    out.exact = out.v_team_lower >= oracle.estimate - 1e-9;
  }
  if (out.v_team_lower > 0.0) {
    out.pou_upper_estimate = out.v_correlated / out.v_team_lower;
  } else {
    out.pou_upper_estimate = out.v_correlated > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  }
  return out;
}

RatioResult approximation_ratio(const SolveReport& report, const SolveReport& baseline) {
  const double a = report.lower_bound;
  const double b = baseline.lower_bound;
  RatioResult out;
  if (b <= 0.0) {
    if (a > 0.0) {
      out.value = std::numeric_limits<double>::infinity();
    } else {
      out.value = a == b ? 1.0 : 0.0;
    }
  } else {
    out.value = a / b;
  }
  out.above_one = out.value > 1.0;
  return out;
}

double bound_ratio(double lower, double upper) {
  if (upper > 0.0) return lower / upper;
  if (std::abs(upper - lower) <= 1e-12) return 1.0;
  return std::numeric_limits<double>::quiet_NaN();
}

ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InputError("experiment config must be a JSON object");
  static const std::set<std::string> top = {"instances", "solvers", "timeout_s", "workers",
                                            "record_wall_time", "normalize", "baseline",
                                            "pou_solver"};
  for (const auto& [key, value] : j.items()) {
    if (!top.count(key)) throw InputError("unknown config field '" + key + "'");
  }
  ExperimentConfig config;
  try {
    if (auto it = j.find("instances"); it != j.end()) {
      for (const auto& item : *it) {
        InstanceSpec spec;
        static const std::set<std::string> keys = {"generator", "n", "m", "seeds",
                                                   "fixed_sign", "file"};
        for (const auto& [key, value] : item.items()) {
          if (!keys.count(key)) throw InputError("unknown instance field '" + key + "'");
        }
        if (auto f = item.find("file"); f != item.end()) {
          std::filesystem::path path = f->get<std::string>();
          spec.file = path.is_relative() ? base_dir / path : path;
        } else {
          spec.generator = item.at("generator").get<std::string>();
          const auto names = family_names();
          if (std::find(names.begin(), names.end(), spec.generator) == names.end()) {
            throw InputError("unknown generator '" + spec.generator + "'");
          }
        }
        if (item.contains("n")) spec.n = item["n"].get<std::vector<int>>();
        if (item.contains("m")) spec.m = item["m"].get<std::vector<int>>();
        if (item.contains("seeds")) spec.seeds = item["seeds"].get<std::vector<std::uint64_t>>();
        if (item.contains("fixed_sign")) spec.fixed_sign = item["fixed_sign"].get<bool>();
        config.instances.push_back(std::move(spec));
      }
    }
    if (auto it = j.find("solvers"); it != j.end()) {
      for (const auto& item : *it) {
        SolverSpec spec{item.at("name").get<std::string>(), item.value("params", Json::object())};
        check_params(spec);
        config.solvers.push_back(std::move(spec));
      }
    }
    if (j.contains("timeout_s")) config.timeout = Seconds(j["timeout_s"].get<double>());
    if (j.contains("workers")) config.workers = j["workers"].get<int>();
    if (j.contains("record_wall_time")) {
      config.record_wall_time = j["record_wall_time"].get<bool>();
    }
    if (j.contains("normalize")) config.normalize = j["normalize"].get<bool>();
    if (j.contains("baseline")) config.baseline = j["baseline"].get<std::string>();
    if (auto it = j.find("pou_solver"); it != j.end()) {
      SolverSpec spec{it->at("name").get<std::string>(), it->value("params", Json::object())};
      check_params(spec);
      config.pou_solver = std::move(spec);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed experiment config: ") + e.what());
  }
  if (config.workers < 1) throw InputError("workers must be at least 1");
  if (config.baseline) {
    const bool listed = std::any_of(config.solvers.begin(), config.solvers.end(),
                                    [&](const SolverSpec& s) { return s.name == *config.baseline; });
    if (!listed) throw InputError("baseline '" + *config.baseline + "' is not among the solvers");
  }
  return config;
}

Json experiment_config_to_json(const ExperimentConfig& config) {
  Json j;
  Json instances = Json::array();
  for (const auto& spec : config.instances) {
    Json item;
    if (spec.file) {
      item["file"] = spec.file->string();
    } else {
      item["generator"] = spec.generator;
      item["n"] = spec.n;
      item["m"] = spec.m;
      item["seeds"] = spec.seeds;
      item["fixed_sign"] = spec.fixed_sign;
    }
    instances.push_back(std::move(item));
  }
  j["instances"] = std::move(instances);
  Json solvers = Json::array();
  for (const auto& s : config.solvers) solvers.push_back({{"name", s.name}, {"params", s.params}});
  j["solvers"] = std::move(solvers);
  j["timeout_s"] = config.timeout.count();
  j["workers"] = config.workers;
  j["record_wall_time"] = config.record_wall_time;
  j["normalize"] = config.normalize;
  if (config.baseline) j["baseline"] = *config.baseline;
  if (config.pou_solver) {
    j["pou_solver"] = {{"name", config.pou_solver->name}, {"params", config.pou_solver->params}};
  }
  return j;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const std::vector<Instance> instances = materialize(config);
  const std::size_t num_solvers = config.solvers.size();
  const std::size_t tasks = instances.size() * num_solvers;

  std::optional<std::size_t> baseline_index;
  if (config.baseline) {
    for (std::size_t s = 0; s < num_solvers; ++s) {
      if (config.solvers[s].name == *config.baseline) {
        baseline_index = s;
        break;
      }
    }
  }

  ExperimentResult result;
  result.rows.resize(tasks);
  std::vector<std::optional<SolveReport>> reports(tasks);
  parallel_for(tasks, config.workers, [&](std::size_t t) {
    const auto& inst = instances[t / num_solvers];
    const auto& spec = config.solvers[t % num_solvers];
    result.rows[t] = make_row(inst, spec, config.timeout, config.record_wall_time,
                              config.baseline ? &reports[t] : nullptr);
  });

  if (baseline_index) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const auto& base = reports[i * num_solvers + *baseline_index];
      for (std::size_t s = 0; s < num_solvers; ++s) {
        if (s == *baseline_index) continue;
        const auto& rep = reports[i * num_solvers + s];
        BaselineRow row{instances[i].id, config.solvers[s].name, *config.baseline,
                        std::numeric_limits<double>::quiet_NaN(), false};
        if (base && rep) {
          const RatioResult r = approximation_ratio(*rep, *base);
          row.ratio = r.value;
          row.above_one = r.above_one;
        }
        result.baseline_ratios.push_back(std::move(row));
      }
    }
    std::sort(result.baseline_ratios.begin(), result.baseline_ratios.end(),
              [](const BaselineRow& a, const BaselineRow& b) {
                return std::tie(a.instance_id, a.solver) < std::tie(b.instance_id, b.solver);
              });
  }

  if (config.pou_solver) {
    result.pou.resize(instances.size());
    parallel_for(instances.size(), config.workers, [&](std::size_t i) {
      const auto& inst = instances[i];
      PouOptions opts;
      opts.timeout = config.timeout;
      PouRow row{inst.id, inst.game.num_players(), inst.game.max_team_actions(), inst.seed, {}};
      try {
        row.report = compute_pou(inst.game, *config.pou_solver, opts);
      } catch (const std::exception&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.report.v_correlated = row.report.v_team_lower = row.report.v_team_upper = nan;
        row.report.pou_upper_estimate = nan;
      }
      result.pou[i] = std::move(row);
    });
    std::sort(result.pou.begin(), result.pou.end(),
              [](const PouRow& a, const PouRow& b) { return a.instance_id < b.instance_id; });
  }

  std::sort(result.rows.begin(), result.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.instance_id, a.solver, a.params) < std::tie(b.instance_id, b.solver, b.params);
  });

  std::map<std::tuple<int, int, std::string>, std::vector<const ResultRow*>> cells;
  for (const auto& row : result.rows) {
    if (row.error.empty()) cells[{row.n, row.m, row.solver}].push_back(&row);
  }
  for (const auto& [key, rows] : cells) {
    std::vector<double> lower, ratio, wall;
    for (const ResultRow* r : rows) {
      lower.push_back(r->lower);
      ratio.push_back(r->ratio);
      wall.push_back(r->wall_ms);
    }
    AggregateRow agg;
    std::tie(agg.n, agg.m, agg.solver) = key;
    agg.count = rows.size();
    agg.lower_mean = mean(lower);
    agg.lower_q1 = quantile(lower, 0.25);
    agg.lower_median = quantile(lower, 0.5);
    agg.lower_q3 = quantile(lower, 0.75);
    agg.ratio_mean = mean(ratio);
    agg.ratio_q1 = quantile(ratio, 0.25);
    agg.ratio_median = quantile(ratio, 0.5);
    agg.ratio_q3 = quantile(ratio, 0.75);
    agg.wall_ms_mean = mean(wall);
    result.aggregate.push_back(std::move(agg));
  }
  return result;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << kResultsHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.instance_id) << ',' << csv_field(r.generator) << ',' << r.n << ',' << r.m
        << ',' << seed_field(r.seed) << ',' << csv_field(r.solver) << ',' << csv_field(r.params)
        << ',' << format_double(r.lower) << ',' << format_double(r.upper) << ','
        << format_double(r.ratio) << ',' << r.iterations << ',' << r.restarts << ','
        << format_double(r.wall_ms) << ',' << (r.converged ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  out << "n,m,solver,count,lower_mean,lower_q1,lower_median,lower_q3,ratio_mean,ratio_q1,"
         "ratio_median,ratio_q3,wall_ms_mean\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << csv_field(r.solver) << ',' << r.count << ','
        << format_double(r.lower_mean) << ',' << format_double(r.lower_q1) << ','
        << format_double(r.lower_median) << ',' << format_double(r.lower_q3) << ','
        << format_double(r.ratio_mean) << ',' << format_double(r.ratio_q1) << ','
        << format_double(r.ratio_median) << ',' << format_double(r.ratio_q3) << ','
        << format_double(r.wall_ms_mean) << '\n';
  }
  return out.str();
}

std::string baseline_csv(const std::vector<BaselineRow>& rows) {
  std::ostringstream out;
  out << "instance_id,solver,baseline,ratio,above_one\n";
  for (const auto& r : rows) {
    out << csv_field(r.instance_id) << ',' << csv_field(r.solver) << ',' << csv_field(r.baseline)
        << ',' << format_double(r.ratio) << ',' << (r.above_one ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string pou_csv(const std::vector<PouRow>& rows) {
  std::ostringstream out;
  out << "instance_id,n,m,seed,v_correlated,v_team_lower,v_team_upper,pou_upper_estimate\n";
  for (const auto& r : rows) {
    out << csv_field(r.instance_id) << ',' << r.n << ',' << r.m << ',' << seed_field(r.seed)
        << ',' << format_double(r.report.v_correlated) << ','
        << format_double(r.report.v_team_lower) << ',' << format_double(r.report.v_team_upper)
        << ',' << format_double(r.report.pou_upper_estimate) << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_experiment_outputs(const ExperimentResult& result,
                                                            const ExperimentConfig& config,
                                                            const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw InputError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const std::string& body) {
    const auto path = out_dir / name;
    write_text_file(path, body);
    written.push_back(path);
  };
  emit("results.csv", results_csv(result.rows));
  emit("aggregate.csv", aggregate_csv(result.aggregate));
  if (config.baseline) emit("baseline.csv", baseline_csv(result.baseline_ratios));
  if (config.pou_solver) emit("pou.csv", pou_csv(result.pou));
  return written;
}

}  // namespace tmm
