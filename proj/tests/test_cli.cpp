#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cupgame/cli.hpp"
#include "cupgame/json_io.hpp"

using namespace cupgame;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, {out, err});
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

// Last non-empty line of the output parsed as JSON.
json last_json(const std::string& text) {
  std::istringstream in(text);
  std::string line, last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  return json::parse(last);
}

}  // namespace

TEST_CASE("run reproduces the main instance backlog") {
  const auto res = call({"run", "--instance", "main", "--steps", "16000"});
  REQUIRE(res.code == cli::kOk);
  const auto j = last_json(res.out);
  CHECK(j["backlog"] == "519/250");
  CHECK(j["backlog_step"] == 15092);
  CHECK(j["player"] == "greedy");
}

TEST_CASE("run with the other players") {
  for (const char* player : {"deadline", "hybrid"}) {
    const auto res = call({"run", "--instance", "warmup", "--player", player, "--steps", "3000"});
    REQUIRE(res.code == cli::kOk);
    CHECK(Rational::parse(last_json(res.out)["backlog"].get<std::string>()) < Rational(2));
  }
}

TEST_CASE("usage and configuration errors exit with 2") {
  CHECK(call({}).code == cli::kUsage);
  CHECK(call({"frobnicate"}).code == cli::kUsage);
  CHECK(call({"run", "--config", temp_path("cupgame_missing_config.json")}).code == cli::kUsage);
  CHECK(call({"run", "--instance", "nowhere"}).code == cli::kUsage);
  CHECK(call({"verify", "nonsense"}).code == cli::kUsage);
  CHECK(call({"lowerbound", "cubic"}).code == cli::kUsage);
  const auto bad = temp_path("cupgame_bad_config.json");
  write_file(bad, "{\"adversary\": \"bamboo\", \"instance\": \"main\", \"steps\": \"x\"");
  const auto res = call({"run", "--config", bad});
  CHECK(res.code == cli::kUsage);
  CHECK_FALSE(res.err.empty());
  std::remove(bad.c_str());
}

TEST_CASE("lower bound commands pass their checks") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"lowerbound", "multiplicative", "--n", "10", "--c", "2"},
           {"lowerbound", "additive", "--n", "10", "--c", "1"},
           {"lowerbound", "flushing", "--n", "200", "--c", "5/4"},
       }) {
    const auto res = call(args);
    CAPTURE(args[1]);
    CHECK(res.code == cli::kOk);
    CHECK(last_json(res.out)["passed"] == true);
  }
  // The floor rule cannot reach ratio 2.
  CHECK(call({"lowerbound", "flushing", "--n", "200", "--c", "2"}).code == cli::kUsage);
}

TEST_CASE("verify suites") {
  CHECK(call({"verify", "fact1"}).code == cli::kOk);
  CHECK(call({"verify", "--suite", "bounds"}).code == cli::kOk);
  CHECK(cli::suite_names().size() >= 5);
}

TEST_CASE("search from a fixed start") {
  const auto archive = temp_path("cupgame_cli_search.jsonl");
  std::remove(archive.c_str());
  const auto res =
      call({"search", "--start", "main", "--sigma", "0", "--iters", "2", "--horizon", "16000", "--out", archive});
  REQUIRE(res.code == cli::kOk);
  const auto summary = last_json(res.out);
  CHECK(summary["best"] == "519/250");
  std::ifstream in(archive);
  std::string first;
  std::getline(in, first);
  CHECK(json::parse(first)["backlog"] == "519/250");
  std::remove(archive.c_str());
}

TEST_CASE("fixed-seed searches write identical archives") {
  const auto a = temp_path("cupgame_cli_a.jsonl");
  const auto b = temp_path("cupgame_cli_b.jsonl");
  for (const auto& path : {a, b}) {
    std::remove(path.c_str());
    const auto res = call({"search", "--family", "steep2", "--seed", "4", "--seeds", "2", "--iters", "2",
                           "--horizon", "3000", "--out", path});
    CHECK(res.code == cli::kOk);
  }
  CHECK_FALSE(slurp(a).empty());
  CHECK(slurp(a) == slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("a fuzz trace replays through the scripted adversary") {
  const auto cfg = temp_path("cupgame_fuzz.json");
  const auto trace = temp_path("cupgame_fuzz_trace.jsonl");
  write_file(cfg, R"({"adversary": "fuzz", "seed": 9, "steps": 250,
    "game": {"n": 6, "removal": "unit", "tiebreak": "adversary_directed",
             "info": {"kind": "multiplicative", "c": "2/1"}}})");
  const auto first = call({"run", "--config", cfg, "--out", trace});
  REQUIRE(first.code == cli::kOk);

  const auto script_cfg = temp_path("cupgame_script.json");
  write_file(script_cfg, json{{"adversary", "scripted"}, {"trace", trace}, {"steps", 1000}}.dump());
  const auto second = call({"run", "--config", script_cfg});
  REQUIRE(second.code == cli::kOk);
  const auto a = last_json(first.out);
  const auto b = last_json(second.out);
  CHECK(a["backlog"] == b["backlog"]);
  CHECK(a["backlog_step"] == b["backlog_step"]);
  CHECK(a["steps"] == b["steps"]);
  for (const auto& p : {cfg, trace, script_cfg}) std::remove(p.c_str());
}

TEST_CASE("instances list and export") {
  const auto list = call({"instances", "list"});
  REQUIRE(list.code == cli::kOk);
  const auto names = last_json(list.out);
  REQUIRE(names.size() == 2);
  CHECK(names[0]["name"] == "warmup");
  CHECK(names[1]["n"] == 2702);

  const auto cfg = temp_path("cupgame_export.json");
  REQUIRE(call({"instances", "export", "warmup", "--format", "config", "--out", cfg}).code == cli::kOk);
  const auto run = call({"run", "--config", cfg});
  REQUIRE(run.code == cli::kOk);
  CHECK(last_json(run.out)["backlog"] == "5001/2500");

  const auto inst = temp_path("cupgame_export_instance.json");
  REQUIRE(call({"instances", "export", "main", "--out", inst}).code == cli::kOk);
  CHECK(json::parse(slurp(inst))["name"] == "main");
  CHECK(call({"instances", "export", "nowhere"}).code == cli::kUsage);
  std::remove(cfg.c_str());
  std::remove(inst.c_str());
}
