#include "teammaxmin/game_io.hpp"

#include <fstream>

#include "teammaxmin/errors.hpp"

namespace tmm {

namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw InputError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(std::string("missing field '") + key + "'");
  return *it;
}

std::vector<double> number_array(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& x : j) {
    if (!x.is_number()) throw InputError(what + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

Json game_to_json(const TeamGame& game) {
  const auto& md = game.metadata();
  Json j;
  if (!md.name.empty()) j["name"] = md.name;
  j["num_players"] = game.num_players();
  j["actions_per_player"] = std::vector<int>(game.actions_per_player().begin(),
                                             game.actions_per_player().end());
  if (md.seed) j["seed"] = *md.seed;
  if (!md.generator.empty()) j["generator"] = md.generator;
  if (!md.params.empty()) {
    Json params = Json::object();
    for (const auto& [k, v] : md.params) params[k] = v;
    j["params"] = std::move(params);
  }
  if (!md.notes.empty()) j["notes"] = md.notes;
  j["team_utility"] =
      std::vector<double>(game.team_utility().begin(), game.team_utility().end());
  return j;
}

TeamGame game_from_json(const Json& j) {
  const Json& np = require(j, "num_players");
  if (!np.is_number_integer()) throw InputError("num_players must be an integer");
  const Json& apl = require(j, "actions_per_player");
  if (!apl.is_array()) throw InputError("actions_per_player must be an array");
  std::vector<int> actions;
  for (const auto& x : apl) {
    if (!x.is_number_integer()) throw InputError("actions_per_player must hold integers");
    actions.push_back(x.get<int>());
  }
  if (static_cast<std::size_t>(np.get<long long>()) != actions.size()) {
    throw InputError("num_players does not match actions_per_player");
  }
  std::vector<double> utility = number_array(require(j, "team_utility"), "team_utility");

  GameMetadata md;
  if (auto it = j.find("name"); it != j.end()) md.name = it->get<std::string>();
  if (auto it = j.find("generator"); it != j.end()) md.generator = it->get<std::string>();
  if (auto it = j.find("notes"); it != j.end()) md.notes = it->get<std::string>();
  if (auto it = j.find("seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw InputError("seed must be a non-negative integer");
    md.seed = it->get<std::uint64_t>();
  }
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) throw InputError("params must be an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_number()) throw InputError("params values must be numbers");
      md.params[k] = v.get<double>();
    }
  }
  return TeamGame(std::move(actions), std::move(utility), std::move(md));
}

Json profile_to_json(const TeamProfile& team, const std::optional<MixedStrategy>& adversary) {
  Json j = Json::array();
  for (const auto& s : team.strategies()) {
    j.push_back(std::vector<double>(s.probs().begin(), s.probs().end()));
  }
  if (adversary) {
    j.push_back(std::vector<double>(adversary->probs().begin(), adversary->probs().end()));
  }
  return j;
}

FullProfile profile_from_json(const TeamGame& game, const Json& j) {
  if (!j.is_array()) throw InputError("profile must be an array of probability arrays");
  const auto k = static_cast<std::size_t>(game.num_team_members());
  if (j.size() != k && j.size() != k + 1) {
    throw InputError("profile needs " + std::to_string(k) + " or " + std::to_string(k + 1) +
                     " strategies, got " + std::to_string(j.size()));
  }
  std::vector<MixedStrategy> strategies;
  for (std::size_t i = 0; i < k; ++i) {
    strategies.emplace_back(static_cast<int>(i),
                            number_array(j[i], "strategy " + std::to_string(i)));
  }
  FullProfile out{TeamProfile(std::move(strategies)), std::nullopt};
  if (j.size() == k + 1) {
    out.adversary.emplace(game.adversary(), number_array(j[k], "adversary strategy"));
  }
  return out;
}

Json report_to_json(const SolveReport& report, bool include_wall_time) {
  Json j;
  j["solver"] = report.solver;
  j["lower_bound"] = report.lower_bound;
  j["upper_bound"] = report.upper_bound;
  j["iterations"] = report.iterations;
  j["restarts_used"] = report.restarts_used;
  j["converged"] = report.converged;
  j["wall_ms"] = include_wall_time ? report.wall_time.count() * 1000.0 : 0.0;
  j["witness"] = profile_to_json(report.witness);
  if (!report.traces.empty()) j["traces"] = report.traces;
  return j;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("error writing " + path.string());
}

TeamGame read_game_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return game_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  } catch (const StructuralError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_game_file(const std::filesystem::path& path, const TeamGame& game) {
  write_text_file(path, dump_json(game_to_json(game)));
}

}  // namespace tmm
