#pragma once

// JSON serialization of games, strategy profiles and solver reports.
//
// Game file:
//   {"name": "...", "num_players": 3, "actions_per_player": [2, 2, 2],
//    "team_utility": [...],            // flat, player 0 outermost
//    "seed": 7, "generator": "random", "params": {"n": 3, "m": 2},
//    "notes": "..."}
// Only num_players, actions_per_player and team_utility are required.
//
// Profile file: an array of per-player probability arrays, either one per
// team member or one per player with the adversary last.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "teammaxmin/game.hpp"
#include "teammaxmin/solvers.hpp"

namespace tmm {

using Json = nlohmann::ordered_json;

Json game_to_json(const TeamGame& game);
/// Throws InputError on missing or ill-typed fields; structural problems in
/// well-typed input surface as StructuralError from TeamGame itself.
TeamGame game_from_json(const Json& j);

struct FullProfile {
  TeamProfile team;
  std::optional<MixedStrategy> adversary;
};

Json profile_to_json(const TeamProfile& team,
                     const std::optional<MixedStrategy>& adversary = std::nullopt);
FullProfile profile_from_json(const TeamGame& game, const Json& j);

/// include_wall_time = false writes wall_ms as 0 so repeated runs compare
/// byte for byte.
Json report_to_json(const SolveReport& report, bool include_wall_time = true);

/// Deterministic text form: two-space indentation and a trailing newline.
std::string dump_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

TeamGame read_game_file(const std::filesystem::path& path);
void write_game_file(const std::filesystem::path& path, const TeamGame& game);

}  // namespace tmm
