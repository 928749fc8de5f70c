#include "cupgame/cli.hpp"

#include <fstream>
#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "cupgame/adversaries.hpp"
#include "cupgame/analysis.hpp"
#include "cupgame/instances.hpp"
#include "cupgame/players.hpp"
#include "cupgame/search.hpp"

namespace cupgame::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw GameError(ErrorKind::ConfigError, what); }

Rational rational_or(const json& config, const char* key, Rational fallback) {
  return config.contains(key) ? rational_from_json(config[key]) : std::move(fallback);
}

std::size_t size_or(const json& config, const char* key, std::size_t fallback) {
  if (!config.contains(key)) return fallback;
  if (!config[key].is_number_unsigned()) config_error(std::string(key) + " must be a non-negative integer");
  return config[key].get<std::size_t>();
}

BambooInstance instance_from_config(const json& config) {
  if (config.contains("instance_file")) return read_instance_file(config["instance_file"].get<std::string>());
  const auto& v = config.at("instance");
  if (v.is_string()) return bundled_instance(v.get<std::string>());
  return instance_from_json(v);
}

FuzzAdversary::Style style_from_string(const std::string& s) {
  if (s == "uniform") return FuzzAdversary::Style::Uniform;
  if (s == "sparse") return FuzzAdversary::Style::Sparse;
  if (s == "focused") return FuzzAdversary::Style::Focused;
  if (s == "mixed") return FuzzAdversary::Style::Mixed;
  config_error("unknown fuzz style: " + s);
}

FlushingOptions flushing_options(const json& config) {
  FlushingOptions o;
  const auto rule = config.value("rule", std::string("floor"));
  if (rule == "floor") {
    o.rule = FlushingOptions::Rule::Floor;
  } else if (rule == "balanced") {
    o.rule = FlushingOptions::Rule::Balanced;
  } else {
    config_error("unknown flushing rule: " + rule);
  }
  if (config.contains("game_c")) o.game_c = rational_from_json(config["game_c"]);
  return o;
}

struct RunSetup {
  GameSpec spec;
  std::unique_ptr<Adversary> adversary;
  std::unique_ptr<Player> player;
  std::uint64_t steps = 0;
  std::string adversary_name;
  std::optional<Trace> script;  // kept alive for the scripted adversary
};

RunSetup setup_run(const json& config) {
  if (!config.is_object()) config_error("config must be a JSON object");
  RunSetup run;
  run.player = make_player(config.value("player", std::string("greedy")));
  const bool has_instance = config.contains("instance") || config.contains("instance_file");
  const auto adversary = config.value("adversary", std::string(has_instance ? "bamboo" : ""));
  const std::uint64_t seed = config.value("seed", std::uint64_t{1});
  std::uint64_t default_steps = 10'000'000;

  if (adversary == "bamboo") {
    if (!has_instance) config_error("the bamboo adversary needs an instance or instance_file");
    const auto inst = instance_from_config(config);
    run.spec = inst.spec();
    run.adversary = std::make_unique<BambooAdversary>(inst.rates);
    run.adversary_name = "bamboo:" + inst.name;
    default_steps = 20000;
  } else if (adversary == "multiplicative_lb") {
    auto a = std::make_unique<MultiplicativeLowerBound>(size_or(config, "n", 50), rational_or(config, "c", Rational(2)));
    run.spec = a->spec();
    run.adversary = std::move(a);
  } else if (adversary == "additive_lb") {
    auto a = std::make_unique<AdditiveLowerBound>(size_or(config, "n", 50), rational_or(config, "c", Rational(1)));
    run.spec = a->spec();
    run.adversary = std::move(a);
  } else if (adversary == "flushing_lb") {
    auto a = std::make_unique<FlushingLowerBound>(size_or(config, "n", 1000), rational_or(config, "c", Rational(4, 3)),
                                                  flushing_options(config));
    run.spec = a->spec();
    run.adversary = std::move(a);
  } else if (adversary == "fuzz") {
    if (!config.contains("game")) config_error("the fuzz adversary needs a game spec");
    run.spec = spec_from_json(config["game"]);
    run.adversary = std::make_unique<FuzzAdversary>(run.spec, seed,
                                                    style_from_string(config.value("style", std::string("mixed"))),
                                                    config.value("grid", std::int64_t{360}));
    default_steps = 1000;
  } else if (adversary == "scripted") {
    if (!config.contains("trace")) config_error("the scripted adversary needs a trace file");
    run.script = read_trace_file(config["trace"].get<std::string>());
    run.spec = run.script->spec;
    run.adversary = std::make_unique<ScriptedAdversary>(*run.script);
    default_steps = run.script->records.size();
  } else if (adversary.empty()) {
    config_error("config names neither an instance nor an adversary");
  } else {
    config_error("unknown adversary: " + adversary);
  }
  if (run.adversary_name.empty()) run.adversary_name = run.adversary->name();
  run.steps = config.value("steps", default_steps);
  return run;
}

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

json checks_json(const std::string& suite, const std::vector<Check>& checks) {
  json arr = json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    all &= c.passed;
  }
  return {{"suite", suite}, {"checks", std::move(arr)}, {"passed", all}};
}

GameSpec lemma_spec(std::size_t n, InfoModel info, RemovalModel removal = RemovalModel::Unit) {
  GameSpec s;
  s.n = n;
  s.info = std::move(info);
  s.removal = removal;
  s.tiebreak = TieBreak::AdversaryDirected;
  return s;
}

std::vector<Check> suite_bounds() {
  std::vector<Check> out;
  for (const auto& name : bound_names()) {
    const auto b = bound_value(name, 100, Rational(2));
    out.push_back({"bound " + name, std::isfinite(b.approx), b.formula});
  }
  const auto lower = bound_value("greedy_bamboo_lower", 0);
  out.push_back({"greedy bamboo lower bound is the main instance backlog",
                 lower.exact && *lower.exact == *main_instance().expected_backlog, lower.exact ? lower.exact->str() : ""});
  for (std::size_t n : {10, 50}) {
    for (const auto& c : {Rational(3, 2), Rational(2)}) {
      MultiplicativeLowerBound adv(n, c);
      GreedyPlayer g;
      RunOptions opt;
      opt.record = RecordLevel::Summary;
      const auto tr = run_game(adv.spec(), adv, g, 10'000'000, opt);
      const auto ub = multiplicative_upper_bound(n, c);
      const auto lb = MultiplicativeLowerBound::target(n, c);
      const auto& h1 = adv.report().h_of_x.at(1);
      out.push_back({"multiplicative n=" + std::to_string(n) + " c=" + c.str(),
                     lb < h1 + Rational(1) && tr.backlog <= ub,
                     "h1=" + h1.str() + " backlog=" + tr.backlog.str() + " upper=" + ub.str()});
    }
  }
  for (std::size_t n : {10, 100}) {
    for (const auto& c : {Rational(1, 2), Rational(1)}) {
      AdditiveLowerBound adv(n, c);
      GreedyPlayer g;
      RunOptions opt;
      opt.record = RecordLevel::Summary;
      const auto tr = run_game(adv.spec(), adv, g, 10'000'000, opt);
      const auto ub = additive_upper_bound(n, c);
      const auto& h1 = adv.report().h_of_x.at(1);
      out.push_back({"additive n=" + std::to_string(n) + " c=" + c.str(),
                     AdditiveLowerBound::target(n, c) <= h1 && tr.backlog <= ub,
                     "h1=" + h1.str() + " backlog=" + tr.backlog.str() + " upper=" + ub.str()});
    }
  }
  return out;
}

std::vector<Check> suite_lemmas() {
  std::vector<Check> out;
  GreedyPlayer g;
  auto add = [&](const std::string& name, const LemmaReport& r) {
    out.push_back({name, r.ok() && r.pairs_checked > 0,
                   std::to_string(r.pairs_checked) + " pairs, " + std::to_string(r.violations) + " violations"});
  };
  for (std::size_t n : {10, 50, 200}) {
    MultiplicativeLowerBound adv(n, Rational(2));
    const auto tr = run_game(adv.spec(), adv, g, 10'000'000);
    add("lemma1 multiplicative construction n=" + std::to_string(n), check_lemma1(tr, Rational(2)));
  }
  for (std::size_t n : {10, 50, 200}) {
    AdditiveLowerBound adv(n, Rational(1));
    const auto tr = run_game(adv.spec(), adv, g, 10'000'000);
    add("lemma3 additive construction n=" + std::to_string(n), check_lemma3(tr, Rational(1)));
  }
  LemmaReport fuzz1, fuzz3;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed % 15;
    {
      const auto spec = lemma_spec(n, InfoModel::multiplicative(Rational(2)));
      FuzzAdversary adv(spec, seed);
      const auto r = check_lemma1(run_game(spec, adv, g, 500), Rational(2));
      fuzz1.pairs_checked += r.pairs_checked;
      fuzz1.violations += r.violations;
    }
    {
      const auto spec = lemma_spec(n, InfoModel::additive(Rational(1)));
      FuzzAdversary adv(spec, seed);
      const auto r = check_lemma3(run_game(spec, adv, g, 500), Rational(1));
      fuzz3.pairs_checked += r.pairs_checked;
      fuzz3.violations += r.violations;
    }
  }
  add("lemma1 on 50 fuzzed traces", fuzz1);
  add("lemma3 on 50 fuzzed traces", fuzz3);
  return out;
}

std::vector<Check> suite_potential() {
  std::vector<Check> out;
  const auto params = PotentialParams::make(e_squared());
  out.push_back({"potential of the empty state is zero", potential(CupState::initial(8), params) == 0.0, ""});
  GreedyPlayer g;
  for (std::size_t n : {500, 800}) {
    FlushingOptions o;
    o.rule = FlushingOptions::Rule::Balanced;
    o.game_c = e_squared();
    FlushingLowerBound adv(n, e_squared(), o);
    const auto tr = run_game(adv.spec(), adv, g, 10'000'000);
    const auto r = check_potential_descent(tr, params);
    out.push_back({"descent on the flushing construction n=" + std::to_string(n), r.ok() && r.descent_checked > 0,
                   std::to_string(r.descent_checked) + " steps in scope, worst change (approx) " +
                       std::to_string(r.worst_descent)});
  }
  const auto clamped = PotentialParams::make(Rational(2));
  std::uint64_t checked = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = lemma_spec(8 + seed, InfoModel::multiplicative(Rational(2)), RemovalModel::Flush);
    FuzzAdversary adv(spec, seed);
    const auto r = check_potential_descent(run_game(spec, adv, g, 300), clamped);
    checked += r.cap_checked + r.descent_checked;
    violations += r.cap_violations + r.descent_violations;
  }
  out.push_back({"clamped monitor at c=2 on 20 fuzzed traces", clamped.clamped && violations == 0,
                 std::to_string(checked) + " steps checked"});
  return out;
}

std::vector<Check> suite_fact1() {
  std::vector<Check> out;
  bool ok1 = true, ok2 = true;
  for (std::size_t n = 0; n <= 2000; ++n) {
    const Rational m(static_cast<std::int64_t>(n));
    ok1 &= harmonic_product(n, Rational(1)) == m + Rational(1);
    ok2 &= harmonic_product(n, Rational(2)) == (m + Rational(1)) * (m + Rational(2)) / Rational(2);
  }
  out.push_back({"prod (1 + 1/i) = n + 1 for n <= 2000", ok1, ""});
  out.push_back({"prod (1 + 2/i) = (n+1)(n+2)/2 for n <= 2000", ok2, ""});
  for (const auto& band : fact1_bands()) {
    const auto r = fact1_ratios(band.c, 4, 16);
    out.push_back({"ratio band c=" + band.c.str(), band.lo <= r.min && r.max <= band.hi,
                   "observed [" + std::to_string(r.min) + ", " + std::to_string(r.max) + "] (approx)"});
  }
  return out;
}

std::vector<Check> suite_instances() {
  std::vector<Check> out;
  for (const auto& inst : {warmup_instance(), main_instance()}) {
    Rational sum;
    for (const auto& r : inst.rates) sum += r;
    out.push_back({inst.name + " rates sum to one", sum == Rational(1), sum.str()});
    BambooAdversary adv(inst.rates);
    GreedyPlayer g;
    const auto tr = run_game(inst.spec(), adv, g, *inst.expected_backlog_step + 20);
    const auto tl = check_timeline(tr, inst);
    out.push_back({inst.name + " greedy backlog", tl.ok(),
                   "backlog " + tr.backlog.str() + " at " + std::to_string(tr.backlog_step) + ", " +
                       std::to_string(tl.soft_failures) + " soft misses"});
    for (const std::string player : {"deadline", "hybrid"}) {
      BambooAdversary a(inst.rates);
      auto p = make_player(player);
      RunOptions opt;
      opt.record = RecordLevel::Summary;
      const auto t2 = run_game(inst.spec(), a, *p, 20000, opt);
      out.push_back({inst.name + " " + player + " stays below 2", t2.backlog < Rational(2), t2.backlog.str()});
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"bounds", "lemmas", "potential", "fact1", "instances"};
  return names;
}

int cmd_run(const json& config, const std::optional<std::string>& trace_path, Streams io) {
  auto run = setup_run(config);
  RunOptions opt;
  if (config.value("record", std::string("full")) == "summary") opt.record = RecordLevel::Summary;
  if (trace_path) opt.record = RecordLevel::Full;
  const auto trace = run_game(run.spec, *run.adversary, *run.player, run.steps, opt);
  const TraceMeta meta{run.player->name(), run.adversary_name};
  if (trace_path) write_trace_file(*trace_path, trace, meta);
  io.out << summary_json(trace, meta).dump() << '\n';
  return kOk;
}

int cmd_lowerbound(const json& config, Streams io) {
  const auto game = config.value("game", std::string());
  GreedyPlayer greedy;
  RunOptions opt;
  opt.record = RecordLevel::Summary;
  json out{{"game", game}};
  bool passed = false;
  if (game == "multiplicative") {
    const auto n = size_or(config, "n", 50);
    const auto c = rational_or(config, "c", Rational(2));
    MultiplicativeLowerBound adv(n, c);
    const auto tr = run_game(adv.spec(), adv, greedy, 10'000'000, opt);
    const auto& h1 = adv.report().h_of_x.at(1);
    const auto bound = MultiplicativeLowerBound::target(n, c);
    passed = bound < h1 + Rational(1);
    out.update({{"n", n},
                {"c", c.str()},
                {"steps", tr.records.size()},
                {"backlog", tr.backlog.str()},
                {"final_h1", h1.str()},
                {"bound", bound.str()},
                {"check", "final_h1 + 1 > bound"},
                {"approx", {{"final_h1", h1.to_double()}, {"bound", bound.to_double()}}}});
  } else if (game == "additive") {
    const auto n = size_or(config, "n", 50);
    const auto c = rational_or(config, "c", Rational(1));
    AdditiveLowerBound adv(n, c);
    const auto tr = run_game(adv.spec(), adv, greedy, 10'000'000, opt);
    const auto& h1 = adv.report().h_of_x.at(1);
    const auto bound = AdditiveLowerBound::target(n, c);
    passed = bound <= h1;
    out.update({{"n", n},
                {"c", c.str()},
                {"steps", tr.records.size()},
                {"backlog", tr.backlog.str()},
                {"final_h1", h1.str()},
                {"bound", bound.str()},
                {"check", "final_h1 >= bound"},
                {"approx", {{"final_h1", h1.to_double()}, {"bound", bound.to_double()}}}});
  } else if (game == "flushing") {
    const auto n = size_or(config, "n", 10000);
    const auto c = rational_or(config, "c", Rational(4, 3));
    const auto options = flushing_options(config);
    FlushingLowerBound adv(n, c, options);
    const auto tr = run_game(adv.spec(), adv, greedy, 10'000'000, opt);
    const auto& rep = adv.report();
    const auto structure = check_flushing_structure(rep, n, c, options.rule);
    json cohorts = json::array();
    for (const auto& co : rep.cohorts) {
      cohorts.push_back({{"generation", co.generation},
                         {"count", co.count},
                         {"height", co.height.str()},
                         {"start_step", co.start_step},
                         {"cups_needed", FlushingLowerBound::cups_needed(co.generation, c)}});
    }
    passed = structure.ok();
    out.update({{"n", n},
                {"c", c.str()},
                {"steps", tr.records.size()},
                {"setup_steps", rep.setup_steps},
                {"backlog", tr.backlog.str()},
                {"max_generation", rep.cohorts.empty() ? 0 : rep.cohorts.back().generation},
                {"max_height", rep.cohorts.empty() ? std::string("0") : rep.cohorts.back().height.str()},
                {"cohorts", std::move(cohorts)},
                {"stop_reason", rep.stop_reason},
                {"check", "cohort sizes, heights and cups-needed product match"},
                {"details", structure.details}});
    if (structure.guaranteed_generation) out["guaranteed_generation"] = *structure.guaranteed_generation;
  } else {
    config_error("lower bound game must be multiplicative, additive or flushing");
  }
  out["passed"] = passed;
  io.out << out.dump() << '\n';
  return passed ? kOk : kCheckFailed;
}

int cmd_verify(const std::string& suite, Streams io) {
  std::vector<Check> checks;
  if (suite == "bounds") {
    checks = suite_bounds();
  } else if (suite == "lemmas") {
    checks = suite_lemmas();
  } else if (suite == "potential") {
    checks = suite_potential();
  } else if (suite == "fact1") {
    checks = suite_fact1();
  } else if (suite == "instances") {
    checks = suite_instances();
  } else {
    config_error("unknown suite: " + suite);
  }
  const auto report = checks_json(suite, checks);
  io.out << report.dump() << '\n';
  return report["passed"].get<bool>() ? kOk : kCheckFailed;
}

int cmd_search(const json& config, const std::optional<std::string>& archive_path, Streams io) {
  const auto cfg = search_config_from_json(config);
  std::vector<SearchResult> results;
  if (config.contains("start")) {
    const auto& s = config["start"];
    const auto start = s.is_string() ? bundled_instance(s.get<std::string>()) : instance_from_json(s);
    results.push_back(hill_climb(start, cfg));
  } else {
    results = run_search(cfg);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[best].backlog < results[i].backlog) best = i;
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].counterexample() || i == best) keep.push_back(i);
  }

  std::ofstream archive;
  if (archive_path) {
    archive.open(*archive_path, std::ios::app);
    if (!archive) config_error("cannot open archive " + *archive_path);
  }
  std::size_t counterexamples = 0;
  for (std::size_t i : keep) {
    const auto& r = results[i];
    replay_verify(r);
    counterexamples += r.counterexample();
    io.out << json{{"status", r.counterexample() ? "COUNTEREXAMPLE" : "best"},
                   {"seed", r.seed},
                   {"n", r.best.weights.size()},
                   {"backlog", r.backlog.str()},
                   {"backlog_step", r.backlog_step},
                   {"horizon_too_short", r.horizon_too_short},
                   {"verified", true}}
                  .dump()
           << '\n';
    if (archive_path) append_archive(archive, r);
  }
  io.out << json{{"searches", results.size()},
                 {"counterexamples", counterexamples},
                 {"best", results[best].backlog.str()},
                 {"best_seed", results[best].seed}}
                .dump()
         << '\n';
  return kOk;
}

int cmd_instances(const std::string& action, const std::optional<std::string>& name,
                  const std::optional<std::string>& out_path, const std::string& format, Streams io) {
  if (action == "list") {
    json arr = json::array();
    for (const auto& n : instance_names()) {
      const auto inst = bundled_instance(n);
      arr.push_back({{"name", n},
                     {"n", inst.size()},
                     {"epsilon", inst.epsilon.str()},
                     {"expected_backlog", inst.expected_backlog->str()},
                     {"expected_backlog_step", *inst.expected_backlog_step}});
    }
    io.out << arr.dump() << '\n';
    return kOk;
  }
  if (action != "export") config_error("instances action must be list or export");
  if (!name) config_error("export needs an instance name");
  const auto inst = bundled_instance(*name);
  json doc;
  if (format == "instance") {
    doc = to_json(inst);
  } else if (format == "config") {
    doc = run_config_json(inst, "greedy", *inst.expected_backlog_step + 1);
  } else {
    config_error("format must be instance or config");
  }
  if (out_path) {
    std::ofstream out(*out_path);
    if (!out) config_error("cannot open " + *out_path + " for writing");
    out << doc.dump(1) << '\n';
  } else {
    io.out << doc.dump() << '\n';
  }
  return kOk;
}

int run(const std::vector<std::string>& args, Streams io) {
  CLI::App app{"Cup game simulator and verification harness", "cupgame"};
  app.require_subcommand(1);

  std::optional<std::string> config_path, out_path;
  std::optional<std::uint64_t> seed, steps, iters, seeds, horizon;
  std::optional<std::size_t> n;
  std::optional<std::string> c, player, instance, adversary, family, sigma, start, rule, game_c;
  std::string suite, game, action, format = "instance";
  std::optional<std::string> name;

  auto* run_cmd = app.add_subcommand("run", "play one game and print its summary");
  run_cmd->add_option("--config", config_path, "run configuration (JSON)");
  run_cmd->add_option("--out", out_path, "write the JSON-lines trace here");
  run_cmd->add_option("--instance", instance, "bundled instance name");
  run_cmd->add_option("--adversary", adversary, "adversary name");
  run_cmd->add_option("--player", player, "greedy, deadline or hybrid");
  run_cmd->add_option("--steps", steps);
  run_cmd->add_option("--seed", seed);
  run_cmd->add_option("--n", n);
  run_cmd->add_option("--c", c);

  auto* lb_cmd = app.add_subcommand("lowerbound", "run a lower-bound construction against greedy");
  lb_cmd->add_option("game", game, "multiplicative, additive or flushing")->required();
  lb_cmd->add_option("--n", n);
  lb_cmd->add_option("--c", c);
  lb_cmd->add_option("--rule", rule, "flushing selection rule: floor or balanced");
  lb_cmd->add_option("--game-c", game_c, "flushing game error bound");

  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  verify_cmd->add_option("suite,--suite", suite, "bounds, lemmas, potential, fact1 or instances");

  auto* search_cmd = app.add_subcommand("search", "randomised counterexample search");
  search_cmd->add_option("--config", config_path, "search configuration (JSON)");
  search_cmd->add_option("--out", out_path, "append verified results to this archive");
  search_cmd->add_option("--family", family, "steep2, steep3 or custom");
  search_cmd->add_option("--iters", iters, "hill-climbing iterations per search");
  search_cmd->add_option("--seed", seed);
  search_cmd->add_option("--seeds", seeds, "number of consecutive seeds");
  search_cmd->add_option("--horizon", horizon);
  search_cmd->add_option("--sigma", sigma);
  search_cmd->add_option("--start", start, "climb from this bundled instance");

  auto* inst_cmd = app.add_subcommand("instances", "list or export bundled instances");
  inst_cmd->add_option("action", action, "list or export")->required();
  inst_cmd->add_option("name", name);
  inst_cmd->add_option("--out", out_path);
  inst_cmd->add_option("--format", format, "instance or config");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    io.out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    io.err << "cupgame: " << e.what() << '\n';
    return kUsage;
  }

  auto load_config = [&]() -> json {
    if (!config_path) return json::object();
    std::ifstream in(*config_path);
    if (!in) config_error("cannot open " + *config_path);
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw GameError(ErrorKind::ParseError, *config_path + ": " + e.what());
    }
  };

  try {
    if (run_cmd->parsed()) {
      json cfg = load_config();
      if (instance) cfg["instance"] = *instance;
      if (adversary) cfg["adversary"] = *adversary;
      if (player) cfg["player"] = *player;
      if (steps) cfg["steps"] = *steps;
      if (seed) cfg["seed"] = *seed;
      if (n) cfg["n"] = *n;
      if (c) cfg["c"] = *c;
      if (!out_path && cfg.contains("out")) out_path = cfg["out"].get<std::string>();
      return cmd_run(cfg, out_path, io);
    }
    if (lb_cmd->parsed()) {
      json cfg{{"game", game}};
      if (n) cfg["n"] = *n;
      if (c) cfg["c"] = *c;
      if (rule) cfg["rule"] = *rule;
      if (game_c) cfg["game_c"] = *game_c;
      return cmd_lowerbound(cfg, io);
    }
    if (verify_cmd->parsed()) {
      if (suite.empty()) config_error("verify needs a suite");
      return cmd_verify(suite, io);
    }
    if (search_cmd->parsed()) {
      json cfg = load_config();
      if (family) cfg["family"] = *family;
      if (iters) cfg["iterations"] = *iters;
      if (seed) cfg["seed"] = *seed;
      if (seeds) cfg["seeds"] = *seeds;
      if (horizon) cfg["horizon"] = *horizon;
      if (sigma) cfg["sigma"] = *sigma;
      if (start) cfg["start"] = *start;
      return cmd_search(cfg, out_path, io);
    }
    if (inst_cmd->parsed()) return cmd_instances(action, name, out_path, format, io);
  } catch (const GameError& e) {
    io.err << "cupgame: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::ReplayMismatch:
      case ErrorKind::CohortExhausted:
      case ErrorKind::EligibilityViolation:
        return kCheckFailed;
      default:
        return kUsage;
    }
  } catch (const json::exception& e) {
    io.err << "cupgame: bad configuration: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    io.err << "cupgame: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace cupgame::cli
