#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "teammaxmin/game_io.hpp"
#include "teammaxmin/metrics.hpp"

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "teammaxmin");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = tmm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "teammaxmin_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string diagonal_file() {
  const auto p = scratch("diag32.json");
  REQUIRE(run_cli({"generate", "diagonal", "--n", "3", "--m", "2", "-o", p.string()}).code == 0);
  return p.string();
}

}  // namespace

TEST_CASE("generate") {
  const auto r = run_cli({"generate", "diagonal", "--n", "3", "--m", "2"});
  CHECK(r.code == 0);
  CHECK(r.err.rfind("config: ", 0) == 0);
  const auto j = tmm::Json::parse(r.out);
  CHECK(j["team_utility"].size() == 8);
  CHECK(j["generator"] == "diagonal");

  const auto a = scratch("rand_a.json");
  const auto b = scratch("rand_b.json");
  CHECK(run_cli({"generate", "random", "--n", "3", "--m", "5", "--seed", "7", "-o", a.string()})
            .code == 0);
  CHECK(run_cli({"generate", "random", "--n", "3", "--m", "5", "--seed", "7", "-o", b.string()})
            .code == 0);
  CHECK(slurp(a) == slurp(b));

  const auto irr = tmm::Json::parse(run_cli({"generate", "irrational", "--fixed"}).out);
  bool has_two = false;
  for (const auto& x : irr["team_utility"]) has_two = has_two || x.get<double>() == 2.0;
  CHECK(has_two);

  CHECK(run_cli({"generate", "nonsense"}).code == 2);
  CHECK(run_cli({"generate", "diagonal", "--n", "x"}).code == 2);
  CHECK(run_cli({"generate", "diagonal", "--bogus"}).code == 2);
  CHECK(run_cli({"generate", "irrational", "--fixed", "--flawed"}).code == 2);
}

TEST_CASE("solve") {
  const auto game = diagonal_file();
  auto r = run_cli({"solve", game, "--solver", "correlated"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("config: ", 0) == 0);
  CHECK(r.out.find("upper_bound: 0.5\n") != std::string::npos);
  r = run_cli({"solve", game, "--solver", "reconstruct"});
  CHECK(r.out.find("lower_bound: 0.25\n") != std::string::npos);
  r = run_cli({"solve", game, "--solver", "support-enum", "--epsilon", "0.5"});
  CHECK(r.out.find("lower_bound: 0.25\n") != std::string::npos);
  CHECK(r.out.find("iterations: 9\n") != std::string::npos);

  const auto report = scratch("report.json");
  r = run_cli({"solve", game, "--report", report.string()});
  CHECK(r.code == 0);
  const auto j = tmm::read_json_file(report);
  CHECK(j["lower_bound"].get<double>() <= j["upper_bound"].get<double>());

  CHECK(run_cli({"solve", game, "--solver", "reconstruct", "--epsilon", "0.5"}).code == 2);
  CHECK(run_cli({"solve", game, "--solver", "magic"}).code == 2);
  CHECK(run_cli({"solve", scratch("nope.json").string()}).code == 3);
  write(scratch("garbage.json"), "[1, 2");
  CHECK(run_cli({"solve", scratch("garbage.json").string()}).code == 3);
}

TEST_CASE("capacity errors") {
  const auto big = scratch("big.json");
  REQUIRE(run_cli({"generate", "random", "--n", "4", "--m", "6", "-o", big.string()}).code == 0);
  CHECK(run_cli({"solve", big.string(), "--solver", "oracle"}).code == 4);
}

TEST_CASE("evaluate and verify-nash") {
  const auto poa = scratch("poa.json");
  REQUIRE(run_cli({"generate", "poa", "-o", poa.string()}).code == 0);
  const auto ne = scratch("ne.json");
  write(ne, "[[0, 1], [0, 1], [1, 0]]");
  auto r = run_cli({"verify-nash", poa.string(), ne.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("verdict: equilibrium") != std::string::npos);

  const auto perturbed = scratch("perturbed.json");
  write(perturbed, "[[0.5, 0.5], [0, 1], [1, 0]]");
  r = run_cli({"verify-nash", poa.string(), perturbed.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("max_gap: 0.5") != std::string::npos);
  CHECK(run_cli({"verify-nash", poa.string(), perturbed.string(), "--tol", "1"}).code == 0);

  const auto team_only = scratch("team_only.json");
  write(team_only, "[[0.5, 0.5], [0.5, 0.5]]");
  CHECK(run_cli({"verify-nash", poa.string(), team_only.string()}).code == 3);
  r = run_cli({"evaluate", poa.string(), team_only.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("team_value: 0.25") != std::string::npos);
}

TEST_CASE("pou") {
  const auto r = run_cli({"pou", diagonal_file(), "--solver", "reconstruct", "--certify"});
  CHECK(r.code == 0);
  CHECK(r.out.find("pou_upper_estimate: 2\n") != std::string::npos);
  CHECK(r.out.find("exact: true") != std::string::npos);
}

TEST_CASE("experiment") {
  const auto cfg = scratch("empty.json");
  write(cfg, R"({"instances": [{"generator": "diagonal"}], "solvers": []})");
  const auto out = scratch("empty_out");
  std::filesystem::remove_all(out);
  auto r = run_cli({"experiment", cfg.string(), "-o", out.string()});
  CHECK(r.code == 0);
  CHECK(slurp(out / "results.csv") == std::string(tmm::kResultsHeader) + "\n");

  const auto bad = scratch("bad_config.json");
  write(bad, R"({"instances": [], "solvers": [], "typo": true})");
  CHECK(run_cli({"experiment", bad.string()}).code == 3);
}

TEST_CASE("no subcommand is a usage error") { CHECK(run_cli({}).code == 2); }
