#include "cupgame/search.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>

#include "cupgame/adversaries.hpp"
#include "cupgame/players.hpp"

namespace cupgame {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw GameError(ErrorKind::ConfigError, what); }

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw GameError(ErrorKind::InvalidSpec, "weights overflow 64 bits");
  return out;
}

std::int64_t weight_sum(const std::vector<std::int64_t>& w) {
  std::int64_t s = 0;
  for (auto x : w) {
    if (__builtin_add_overflow(s, x, &s)) throw GameError(ErrorKind::InvalidSpec, "weights overflow 64 bits");
  }
  return s;
}

// Fast prefix length: everything before the trailing run of equal weights,
// provided the run has at least two members.
std::size_t fast_prefix(const std::vector<std::int64_t>& w) {
  if (w.size() < 2) return w.size();
  std::size_t start = w.size() - 1;
  while (start > 0 && w[start - 1] == w.back()) --start;
  return w.size() - start >= 2 ? start : w.size();
}

void rescale(WeightedInstance& inst, std::int64_t grid) {
  const std::int64_t sum = weight_sum(inst.weights);
  if (sum <= 0 || sum >= grid) return;
  const std::int64_t factor = (grid + sum - 1) / sum;
  for (auto& w : inst.weights) w = checked_mul(w, factor);
  inst.denominator = checked_mul(inst.denominator, factor);
}

json weighted_to_json(const WeightedInstance& w) {
  json fast = json::array();
  for (std::size_t i = 0; i < w.fast; ++i) fast.push_back(w.weights[i]);
  const std::size_t slow = w.weights.size() - w.fast;
  return json{{"denominator", w.denominator},
              {"fast", std::move(fast)},
              {"slow_weight", slow ? w.weights.back() : 0},
              {"slow_count", slow}};
}

WeightedInstance weighted_from_json(const json& v) {
  WeightedInstance w;
  w.denominator = v.at("denominator").get<std::int64_t>();
  for (const auto& x : v.at("fast")) w.weights.push_back(x.get<std::int64_t>());
  w.fast = w.weights.size();
  w.weights.resize(w.fast + v.at("slow_count").get<std::size_t>(), v.at("slow_weight").get<std::int64_t>());
  if (w.denominator <= 0) throw GameError(ErrorKind::ParseError, "denominator must be positive");
  for (auto x : w.weights) {
    if (x < 0) throw GameError(ErrorKind::ParseError, "negative weight");
  }
  if (weight_sum(w.weights) > w.denominator) throw GameError(ErrorKind::ParseError, "weights exceed denominator");
  return w;
}

}  // namespace

BambooInstance WeightedInstance::to_instance(const std::string& name) const {
  BambooInstance b;
  b.name = name;
  b.rates.reserve(weights.size());
  for (auto w : weights) b.rates.emplace_back(w, denominator);
  return b;
}

WeightedInstance WeightedInstance::from_instance(const BambooInstance& instance) {
  instance.validate();
  WeightedInstance out;
  std::int64_t lcm = 1;
  for (const auto& r : instance.rates) {
    if (!r.is_small()) throw GameError(ErrorKind::InvalidSpec, "rate " + r.str() + " does not fit 64 bits");
    const std::int64_t d = r.small_den();
    lcm = checked_mul(lcm / std::gcd(lcm, d), d);
  }
  out.denominator = lcm;
  for (const auto& r : instance.rates) out.weights.push_back(checked_mul(r.small_num(), lcm / r.small_den()));
  out.fast = fast_prefix(out.weights);
  return out;
}

const char* to_string(Family family) {
  switch (family) {
    case Family::Steep2:
      return "steep2";
    case Family::Steep3:
      return "steep3";
    case Family::Custom:
      return "custom";
  }
  return "custom";
}

Family family_from_string(const std::string& name) {
  if (name == "steep2" || name == "Steep2") return Family::Steep2;
  if (name == "steep3" || name == "Steep3") return Family::Steep3;
  if (name == "custom" || name == "Custom") return Family::Custom;
  config_error("unknown family: " + name);
}

std::vector<std::pair<std::int64_t, std::int64_t>> family_ranges(Family family) {
  switch (family) {
    case Family::Steep2:
      return {{2500, 5000}, {1250, 2500}};
    case Family::Steep3:
      return {{800, 2500}, {1200, 2500}, {2500, 5000}};
    case Family::Custom:
      return {};
  }
  return {};
}

void SearchConfig::validate() {
  if (family != Family::Custom) ranges = family_ranges(family);
  if (ranges.empty()) config_error("custom family needs at least one range");
  for (const auto& [lo, hi] : ranges) {
    if (lo < 0 || lo > hi) config_error("bad range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  if (n_slow.first > n_slow.second) config_error("empty n_slow range");
  if (!(sigma >= 0) || !std::isfinite(sigma)) config_error("sigma must be a finite non-negative number");
  if (horizon < 1) config_error("horizon must be at least 1");
  if (grid < 1) config_error("grid must be positive");
  if (seeds < 1) config_error("seeds must be at least 1");
}

WeightedInstance generate_steep(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges,
                                std::size_t n_slow, std::mt19937_64& rng) {
  WeightedInstance out;
  for (const auto& [lo, hi] : ranges) out.weights.push_back(std::uniform_int_distribution<std::int64_t>(lo, hi)(rng));
  out.fast = out.weights.size();
  out.weights.resize(out.fast + n_slow, 1);
  out.denominator = weight_sum(out.weights);
  if (out.denominator == 0) throw GameError(ErrorKind::InvalidSpec, "all weights are zero");
  return out;
}

WeightedInstance generate_steep(const SearchConfig& config, std::mt19937_64& rng) {
  const auto n_slow = std::uniform_int_distribution<std::size_t>(config.n_slow.first, config.n_slow.second)(rng);
  return generate_steep(config.ranges, n_slow, rng);
}

Evaluation evaluate_fast(const WeightedInstance& inst, std::uint64_t horizon) {
  const std::size_t k = inst.fast;
  const std::size_t n_slow = inst.weights.size() - k;
  const std::int64_t slow_w = n_slow ? inst.weights.back() : 0;
  std::vector<std::int64_t> h(k, 0);

  struct Cohort {
    std::int64_t last_cut;
    std::size_t count;
  };
  std::deque<Cohort> slow;  // oldest cut first, so the front is the tallest
  if (n_slow) slow.push_back({-1, n_slow});

  std::int64_t best = -1;
  std::uint64_t best_step = 0;
  for (std::uint64_t t = 0; t < horizon; ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    std::size_t arg = 0;
    std::int64_t fast_max = -1;
    for (std::size_t i = 0; i < k; ++i) {
      h[i] += inst.weights[i];
      if (h[i] > fast_max) {
        fast_max = h[i];
        arg = i;
      }
    }
    const std::int64_t slow_max = slow.empty() ? -1 : slow_w * (ti - slow.front().last_cut);
    const std::int64_t top = std::max(fast_max, slow_max);
    if (top > best) {
      best = top;
      best_step = t;
    }
    // Fast bamboos precede the slow ones, so they win ties.
    if (fast_max >= slow_max) {
      h[arg] = 0;
    } else {
      if (--slow.front().count == 0) slow.pop_front();
      slow.push_back({ti, 1});
    }
  }
  return {Rational(std::max<std::int64_t>(best, 0), inst.denominator), best_step};
}

Evaluation evaluate_exact(const BambooInstance& instance, std::uint64_t horizon) {
  BambooAdversary adversary(instance.rates);
  GreedyPlayer greedy;
  RunOptions options;
  options.record = RecordLevel::Summary;
  const auto trace = run_game(instance.spec(), adversary, greedy, horizon, options);
  return {trace.backlog, trace.backlog_step};
}

SearchResult hill_climb(const WeightedInstance& start, const SearchConfig& config, std::mt19937_64& rng) {
  SearchResult result;
  result.family = to_string(config.family);
  result.horizon = config.horizon;
  result.start = start;
  WeightedInstance current = start;
  rescale(current, config.grid);
  auto eval = evaluate_fast(current, config.horizon);
  result.backlog = eval.backlog;
  result.backlog_step = eval.backlog_step;

  std::normal_distribution<double> gauss(0.0, config.sigma > 0 ? config.sigma : 1.0);
  for (std::uint64_t it = 0; it < config.iterations; ++it) {
    if (config.sigma == 0) break;
    const auto total = static_cast<double>(weight_sum(current.weights));
    WeightedInstance cand = current;
    std::vector<std::int64_t> delta(current.fast, 0);
    bool changed = false;
    for (std::size_t i = 0; i < current.fast; ++i) {
      const auto step = static_cast<std::int64_t>(std::llround(gauss(rng) * total));
      cand.weights[i] = std::max<std::int64_t>(1, current.weights[i] + step);
      delta[i] = cand.weights[i] - current.weights[i];
      changed |= delta[i] != 0;
    }
    if (!changed) continue;
    cand.denominator = weight_sum(cand.weights);
    const auto e = evaluate_fast(cand, config.horizon);
    if (result.backlog < e.backlog) {
      current = std::move(cand);
      result.backlog = e.backlog;
      result.backlog_step = e.backlog_step;
      result.lineage.push_back({it, std::move(delta), e.backlog, e.backlog_step});
    }
  }
  result.best = std::move(current);
  result.horizon_too_short = result.backlog_step * 10 > config.horizon * 9;
  return result;
}

SearchResult hill_climb(const BambooInstance& start, const SearchConfig& config) {
  std::mt19937_64 rng(config.seed);
  auto result = hill_climb(WeightedInstance::from_instance(start), config, rng);
  result.seed = config.seed;
  result.family = "start:" + start.name;
  return result;
}

std::vector<SearchResult> run_search(const SearchConfig& config) {
  SearchConfig cfg = config;
  cfg.validate();
  std::vector<SearchResult> out;
  out.reserve(cfg.seeds);
  for (std::uint64_t s = 0; s < cfg.seeds; ++s) {
    std::mt19937_64 rng(cfg.seed + s);
    const auto start = generate_steep(cfg, rng);
    auto result = hill_climb(start, cfg, rng);
    result.seed = cfg.seed + s;
    out.push_back(std::move(result));
  }
  return out;
}

bool replay_verify(const SearchResult& result) {
  const auto e = evaluate_exact(result.best.to_instance("replay"), result.horizon);
  if (e.backlog != result.backlog || e.backlog_step != result.backlog_step) {
    throw GameError(ErrorKind::ReplayMismatch, "recorded backlog " + result.backlog.str() + " at step " +
                                                   std::to_string(result.backlog_step) + ", replay gives " +
                                                   e.backlog.str() + " at step " + std::to_string(e.backlog_step));
  }
  return true;
}

json to_json(const SearchResult& r) {
  json lineage = json::array();
  for (const auto& p : r.lineage) {
    lineage.push_back({{"iteration", p.iteration},
                       {"delta", p.delta},
                       {"backlog", p.backlog.str()},
                       {"backlog_step", p.backlog_step}});
  }
  return json{{"seed", r.seed},
              {"family", r.family},
              {"horizon", r.horizon},
              {"backlog", r.backlog.str()},
              {"backlog_step", r.backlog_step},
              {"counterexample", r.counterexample()},
              {"horizon_too_short", r.horizon_too_short},
              {"start", weighted_to_json(r.start)},
              {"best", weighted_to_json(r.best)},
              {"lineage", std::move(lineage)}};
}

SearchResult search_result_from_json(const json& v) {
  SearchResult r;
  try {
    r.seed = v.at("seed").get<std::uint64_t>();
    r.family = v.value("family", std::string());
    r.horizon = v.at("horizon").get<std::uint64_t>();
    r.backlog = rational_from_json(v.at("backlog"));
    r.backlog_step = v.at("backlog_step").get<std::uint64_t>();
    r.horizon_too_short = v.value("horizon_too_short", false);
    r.start = weighted_from_json(v.at("start"));
    r.best = weighted_from_json(v.at("best"));
    for (const auto& p : v.value("lineage", json::array())) {
      r.lineage.push_back({p.at("iteration").get<std::uint64_t>(), p.at("delta").get<std::vector<std::int64_t>>(),
                           rational_from_json(p.at("backlog")), p.at("backlog_step").get<std::uint64_t>()});
    }
  } catch (const json::exception& e) {
    throw GameError(ErrorKind::ParseError, std::string("bad search result: ") + e.what());
  }
  return r;
}

void append_archive(std::ostream& out, const SearchResult& result) { out << to_json(result).dump() << '\n'; }

std::vector<SearchResult> read_archive(std::istream& in) {
  std::vector<SearchResult> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(search_result_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw GameError(ErrorKind::ParseError, std::string("archive: ") + e.what());
    }
  }
  return out;
}

json search_config_to_json(const SearchConfig& c) {
  json ranges = json::array();
  for (const auto& [lo, hi] : c.ranges) ranges.push_back({lo, hi});
  char sigma[32];
  std::snprintf(sigma, sizeof sigma, "%.17g", c.sigma);
  return json{{"family", to_string(c.family)},
              {"ranges", std::move(ranges)},
              {"n_slow", {c.n_slow.first, c.n_slow.second}},
              {"seed", c.seed},
              {"seeds", c.seeds},
              {"iterations", c.iterations},
              {"sigma", sigma},
              {"horizon", c.horizon},
              {"grid", c.grid}};
}

SearchConfig search_config_from_json(const json& v) {
  SearchConfig c;
  try {
    if (v.contains("family")) c.family = family_from_string(v["family"].get<std::string>());
    if (v.contains("ranges")) {
      for (const auto& r : v["ranges"]) c.ranges.emplace_back(r.at(0).get<std::int64_t>(), r.at(1).get<std::int64_t>());
    }
    if (v.contains("n_slow")) c.n_slow = {v["n_slow"].at(0).get<std::size_t>(), v["n_slow"].at(1).get<std::size_t>()};
    c.seed = v.value("seed", c.seed);
    c.seeds = v.value("seeds", c.seeds);
    c.iterations = v.value("iterations", c.iterations);
    if (v.contains("sigma")) {
      const auto& s = v["sigma"];
      c.sigma = s.is_string() ? std::stod(s.get<std::string>()) : s.get<double>();
    }
    c.horizon = v.value("horizon", c.horizon);
    c.grid = v.value("grid", c.grid);
  } catch (const json::exception& e) {
    config_error(std::string("bad search config: ") + e.what());
  } catch (const std::invalid_argument&) {
    config_error("sigma is not a number");
  }
  c.validate();
  return c;
}

}  // namespace cupgame
