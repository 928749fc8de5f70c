// One PASS/FAIL line per acceptance criterion; exits 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cupgame/adversaries.hpp"
#include "cupgame/analysis.hpp"
#include "cupgame/instances.hpp"
#include "cupgame/players.hpp"
#include "cupgame/search.hpp"

using namespace cupgame;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v, int digits = 2) {
  std::ostringstream os;
  os.precision(digits);
  os << std::fixed << v;
  return os.str();
}

Rational of(std::size_t v) { return Rational(static_cast<std::int64_t>(v)); }

// Independent oracles: plain loops, no library helpers.
Rational naive_harmonic(std::size_t n) {
  Rational h;
  for (std::size_t i = 1; i <= n; ++i) h += Rational(1) / of(i);
  return h;
}

Rational naive_multiplicative_target(std::size_t n, const Rational& c) {
  Rational p = of(n - 1);
  for (std::size_t i = 1; i + 3 <= n; ++i) p = p * (c * of(i)) / (c * of(i) + Rational(1));
  return p;
}

Rational naive_multiplicative_upper(std::size_t n, const Rational& c) {
  Rational p(1);
  for (std::size_t i = 1; i < n; ++i) p *= Rational(1) + (c - Rational(1)) / (c * of(i));
  return (c + Rational(1) + c / (c - Rational(1))) * p;
}

Rational naive_additive_target(std::size_t n, const Rational& c) {
  Rational s;
  for (std::size_t i = 1; i < n; ++i) s += (c + Rational(1)) / of(i + 1);
  return s;
}

Trace greedy_bamboo(const BambooInstance& inst, std::uint64_t steps, const char* player = "greedy") {
  BambooAdversary adv(inst.rates);
  auto p = make_player(player);
  RunOptions opt;
  opt.record = RecordLevel::Summary;
  return run_game(inst.spec(), adv, *p, steps, opt);
}

FuzzAdversary::Style style_for(std::uint64_t k) {
  static const FuzzAdversary::Style styles[] = {FuzzAdversary::Style::Uniform, FuzzAdversary::Style::Sparse,
                                                FuzzAdversary::Style::Focused, FuzzAdversary::Style::Mixed};
  return styles[k % 4];
}

Trace fuzz_greedy(const GameSpec& spec, std::uint64_t seed, std::uint64_t steps, RecordLevel level) {
  FuzzAdversary adv(spec, seed, style_for(seed));
  GreedyPlayer g;
  RunOptions opt;
  opt.record = level;
  return run_game(spec, adv, g, steps, opt);
}

GameSpec semi_oblivious(std::size_t n, const InfoModel& info) {
  GameSpec s;
  s.n = n;
  s.info = info;
  s.tiebreak = TieBreak::AdversaryDirected;
  return s;
}

bool near_step(std::uint64_t got, std::uint64_t want) {
  return got + kStepTolerance >= want && got <= want + kStepTolerance;
}

// ------------------------------------------------------------------ criteria

Outcome ac1() {
  const auto inst = main_instance();
  const auto t0 = Clock::now();
  const auto tr = greedy_bamboo(inst, 16000);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = tr.backlog == Rational(519, 250) && secs < 10.0;
  o.detail = "backlog " + tr.backlog.str() + " at step " + std::to_string(tr.backlog_step) + " in " + fmt(secs) + " s";
  if (!near_step(tr.backlog_step, 15092)) o.detail += " (step outside 15092 +- 3, soft)";
  return o;
}

Outcome ac2() {
  const auto inst = warmup_instance();
  const auto t0 = Clock::now();
  const auto tr = greedy_bamboo(inst, 13000);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = tr.backlog == Rational(5001, 2500) && secs < 10.0;
  o.detail = "backlog " + tr.backlog.str() + " at step " + std::to_string(tr.backlog_step) + " in " + fmt(secs) + " s";
  if (!near_step(tr.backlog_step, 12014)) o.detail += " (step outside 12014 +- 3, soft)";
  return o;
}

Outcome ac3() {
  Outcome o;
  for (const auto& inst : {warmup_instance(), main_instance()}) {
    for (const char* player : {"deadline", "hybrid"}) {
      const auto tr = greedy_bamboo(inst, 20000, player);
      if (!(tr.backlog < Rational(2))) o.pass = false;
      o.detail += inst.name + "/" + player + " " + fmt(tr.backlog.to_double(), 4) + "; ";
    }
  }
  return o;
}

const std::vector<std::size_t> kMultN{10, 50, 200};
const std::vector<Rational> kMultC{Rational(3, 2), Rational(2), Rational(3)};
const std::vector<std::size_t> kAddN{10, 100, 1000};
const std::vector<Rational> kAddC{Rational(1, 2), Rational(1), Rational(4)};

Outcome ac4() {
  Outcome o;
  std::size_t constructions = 0;
  for (std::size_t n : kMultN) {
    for (const auto& c : kMultC) {
      MultiplicativeLowerBound adv(n, c);
      GreedyPlayer g;
      RunOptions opt;
      opt.record = RecordLevel::Summary;
      run_game(adv.spec(), adv, g, 100'000'000, opt);
      const auto& h = adv.report().h_of_x;
      if (h.count(1) && naive_multiplicative_target(n, c) < h.at(1) + Rational(1)) {
        ++constructions;
      } else {
        o.pass = false;
        o.detail += "construction short at n=" + std::to_string(n) + " c=" + c.str() + "; ";
      }
    }
  }
  // 112 fuzzed games per (n, c): 1008 in all.
  std::size_t fuzzed = 0;
  double worst = 0;
  for (std::size_t n : kMultN) {
    for (const auto& c : kMultC) {
      const auto spec = semi_oblivious(n, InfoModel::multiplicative(c));
      const Rational bound = naive_multiplicative_upper(n, c);
      for (std::uint64_t seed = 0; seed < 112; ++seed) {
        const auto tr = fuzz_greedy(spec, 4000 + seed, 1000, RecordLevel::Summary);
        ++fuzzed;
        worst = std::max(worst, (tr.backlog / bound).to_double());
        if (bound < tr.backlog) {
          o.pass = false;
          o.detail += "fuzz above bound at n=" + std::to_string(n) + "; ";
        }
      }
    }
  }
  o.detail += std::to_string(constructions) + "/9 constructions, " + std::to_string(fuzzed) +
              " fuzzed games, worst backlog/bound " + fmt(worst, 3);
  return o;
}

Outcome ac5() {
  Outcome o;
  std::size_t constructions = 0;
  for (std::size_t n : kAddN) {
    for (const auto& c : kAddC) {
      AdditiveLowerBound adv(n, c);
      GreedyPlayer g;
      RunOptions opt;
      opt.record = RecordLevel::Summary;
      run_game(adv.spec(), adv, g, 100'000'000, opt);
      const auto& h = adv.report().h_of_x;
      if (h.count(1) && naive_additive_target(n, c) <= h.at(1)) {
        ++constructions;
      } else {
        o.pass = false;
        o.detail += "construction short at n=" + std::to_string(n) + " c=" + c.str() + "; ";
      }
    }
  }
  std::size_t fuzzed = 0;
  double worst = 0;
  for (std::size_t n : kAddN) {
    const Rational h = naive_harmonic(n - 1);
    for (const auto& c : kAddC) {
      const auto spec = semi_oblivious(n, InfoModel::additive(c));
      const Rational bound = c + Rational(2) + (c + Rational(1)) * h;
      for (std::uint64_t seed = 0; seed < 112; ++seed) {
        const auto tr = fuzz_greedy(spec, 5000 + seed, 1000, RecordLevel::Summary);
        ++fuzzed;
        worst = std::max(worst, (tr.backlog / bound).to_double());
        if (bound < tr.backlog) {
          o.pass = false;
          o.detail += "fuzz above bound at n=" + std::to_string(n) + "; ";
        }
      }
    }
  }
  o.detail += std::to_string(constructions) + "/9 constructions, " + std::to_string(fuzzed) +
              " fuzzed games, worst backlog/bound " + fmt(worst, 3);
  return o;
}

Outcome ac6() {
  const std::size_t n = 10'000;
  const Rational c(4, 3);
  FlushingLowerBound adv(n, c);
  GreedyPlayer g;
  RunOptions opt;
  opt.record = RecordLevel::Summary;
  run_game(adv.spec(), adv, g, 100'000'000, opt);
  const auto& rep = adv.report();
  Outcome o;

  // Recompute the recursion directly.
  std::size_t k = n - 1;
  Rational x(1);
  for (std::size_t i = 0; i < rep.cohorts.size(); ++i) {
    if (rep.cohorts[i].count != k || rep.cohorts[i].height != x) {
      o.pass = false;
      o.detail += "generation " + std::to_string(i) + " differs; ";
    }
    k = static_cast<std::size_t>((of(k) / (x + Rational(1))).floor().to_int64());
    x *= c;
  }
  if (k != 0 && rep.stop_reason.empty()) o.pass = false;

  // prod_{j<i} (ceil(c^j) + 1) against the library and against the reached generations.
  std::uint64_t prod = 1;
  Rational power(1);
  std::size_t reachable = 0;
  for (std::size_t i = 0; i < 30; ++i) {
    if (FlushingLowerBound::cups_needed(i, c) != prod) {
      o.pass = false;
      o.detail += "cups_needed(" + std::to_string(i) + ") differs; ";
    }
    if (prod <= n - 1) reachable = i;
    if (i < rep.cohorts.size() && rep.cohorts[i].count < (n - 1) / prod) {
      o.pass = false;
      o.detail += "generation " + std::to_string(i) + " below (n-1)/product; ";
    }
    prod *= static_cast<std::uint64_t>(power.ceil().to_int64()) + 1;
    power *= c;
    if (prod > 100 * n) break;
  }
  if (rep.cohorts.size() <= reachable) {
    o.pass = false;
    o.detail += "generation " + std::to_string(reachable) + " not reached; ";
  }
  const auto structure = check_flushing_structure(rep, n, c);
  if (!structure.ok()) o.pass = false;
  o.detail += std::to_string(rep.cohorts.size()) + " generations, top height " + rep.cohorts.back().height.str() +
              ", product guarantees generation " + std::to_string(reachable);
  return o;
}

std::vector<RationalVec> intermediates(const Trace& tr) {
  std::vector<RationalVec> out;
  replay(tr, [&](const StepRecord&, const CupState&, const CupState& mid, const CupState&) {
    out.push_back(mid.heights);
  });
  return out;
}

// Lifts the tallest cup at the first in-scope pair; false if there is none.
bool corrupt(std::vector<RationalVec>& g, const Rational& threshold) {
  auto top = [](const RationalVec& v) { return *std::max_element(v.begin(), v.end()); };
  for (std::size_t t = 1; t < g.size(); ++t) {
    if (top(g[t - 1]) >= threshold && top(g[t]) >= threshold) {
      *std::max_element(g[t].begin(), g[t].end()) += Rational(1000);
      return true;
    }
  }
  return false;
}

Outcome ac7() {
  Outcome o;
  std::uint64_t pairs = 0;
  std::size_t lb_traces = 0;
  std::size_t controls = 0;
  std::size_t caught = 0;
  for (std::size_t n : kMultN) {
    for (const auto& c : kMultC) {
      MultiplicativeLowerBound adv(n, c);
      GreedyPlayer g;
      const auto tr = run_game(adv.spec(), adv, g, 100'000'000);
      const auto rep = check_lemma1(tr, c);
      ++lb_traces;
      pairs += rep.pairs_checked;
      if (!rep.ok()) o.pass = false;
      auto seq = intermediates(tr);
      if (corrupt(seq, c)) {
        ++controls;
        if (!check_lemma1_sequence(seq, c).ok()) ++caught;
      }
    }
  }
  for (std::size_t n : {10, 50, 200}) {
    for (const auto& c : kAddC) {
      AdditiveLowerBound adv(n, c);
      GreedyPlayer g;
      const auto tr = run_game(adv.spec(), adv, g, 100'000'000);
      const auto rep = check_lemma3(tr, c);
      ++lb_traces;
      pairs += rep.pairs_checked;
      if (!rep.ok()) o.pass = false;
      auto seq = intermediates(tr);
      if (corrupt(seq, c + Rational(1))) {
        ++controls;
        if (!check_lemma3_sequence(seq, c).ok()) ++caught;
      }
    }
  }
  // 1000 fuzzed traces of 1000 steps: half multiplicative, half additive.
  std::mt19937_64 rng(77);
  std::uint64_t fuzz_pairs = 0;
  std::uint64_t violations = 0;
  const std::vector<Rational> mult_c{Rational(5, 4), Rational(3, 2), Rational(2), Rational(3)};
  const std::vector<Rational> add_c{Rational(1, 4), Rational(1, 2), Rational(1), Rational(2)};
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(3, 24)(rng);
    const bool mult = k % 2 == 0;
    const Rational c = (mult ? mult_c : add_c)[(k / 2) % 4];
    const auto spec = semi_oblivious(n, mult ? InfoModel::multiplicative(c) : InfoModel::additive(c));
    const auto tr = fuzz_greedy(spec, 9000 + k, 1000, RecordLevel::Full);
    const auto rep = mult ? check_lemma1(tr, c) : check_lemma3(tr, c);
    fuzz_pairs += rep.pairs_checked;
    violations += rep.violations;
    if (!rep.ok()) o.pass = false;
  }
  if (controls == 0 || caught != controls || pairs == 0 || fuzz_pairs == 0) o.pass = false;
  o.detail = std::to_string(lb_traces) + " construction traces (" + std::to_string(pairs) + " pairs), 1000 fuzzed (" +
             std::to_string(fuzz_pairs) + " pairs, " + std::to_string(violations) + " violations), " +
             std::to_string(caught) + "/" + std::to_string(controls) + " corrupted traces caught";
  return o;
}

Outcome ac8() {
  Outcome o;
  std::size_t traces = 0;
  std::uint64_t checked = 0;
  std::uint64_t bad = 0;
  double worst = -1e300;
  auto run = [&](std::size_t n, const Rational& ratio, const Rational& game_c) {
    FlushingOptions opt;
    opt.rule = FlushingOptions::Rule::Balanced;
    opt.game_c = game_c;
    FlushingLowerBound adv(n, ratio, opt);
    GreedyPlayer g;
    const auto tr = run_game(adv.spec(), adv, g, 100'000'000);
    const auto params = PotentialParams::make(game_c);
    const auto rep = check_potential_descent(tr, params);
    ++traces;
    checked += rep.descent_checked;
    bad += rep.descent_violations;
    if (rep.descent_checked > 0) worst = std::max(worst, rep.worst_descent);
    if (rep.descent_violations != 0 || rep.descent_checked == 0 || rep.initial != 0.0) o.pass = false;
  };
  // c = e^2: 25 sizes by 4 ratios.
  for (std::size_t k = 0; k < 25; ++k) {
    for (const auto& ratio : {e_squared(), Rational(7), Rational(13, 2), Rational(6)}) run(400 + 20 * k, ratio, e_squared());
  }
  const std::size_t at_e2 = traces;
  // c below e^2, where the parameters clamp.
  for (std::size_t n : {300, 600, 900}) run(n, Rational(6), Rational(6));
  for (std::size_t n : {350, 700}) run(n, Rational(7), Rational(7));
  run(2700, Rational(4), Rational(4));
  if (!PotentialParams::make(Rational(6)).clamped) o.pass = false;

  const auto p = PotentialParams::make(e_squared());
  if (potential(CupState::initial(1000), p) != 0.0) o.pass = false;
  o.detail = std::to_string(at_e2) + " traces at e^2 and " + std::to_string(traces - at_e2) + " clamped, " +
             std::to_string(checked) + " in-scope steps, " + std::to_string(bad) +
             " non-decreasing, largest change " + fmt(worst, 3) + ", phi(0) = 0";
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t failures = 0;
  for (std::size_t n = 1; n <= 10'000; ++n) {
    const Rational nn = of(n);
    if (harmonic_product(n, Rational(1)) != nn + Rational(1)) ++failures;
    if (harmonic_product(n, Rational(2)) != (nn + Rational(1)) * (nn + Rational(2)) / Rational(2)) ++failures;
  }
  if (failures) o.pass = false;
  o.detail = "telescoping for n <= 10^4: " + std::to_string(failures) + " failures (" + fmt(seconds_since(t0), 1) + " s)";
  for (const auto& band : fact1_bands()) {
    const auto st = fact1_ratios(band.c, 4, 16);
    const bool inside = st.min >= band.lo && st.max <= band.hi;
    if (!inside) o.pass = false;
    o.detail += "; c=" + band.c.str() + " ratio in [" + fmt(st.min, 6) + ", " + fmt(st.max, 6) + "]";
  }
  return o;
}

Outcome ac10() {
  Outcome o;
  std::mt19937_64 rng(101);
  double worst = 0;
  std::size_t above = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    GameSpec spec;
    spec.n = std::uniform_int_distribution<std::size_t>(1, 64)(rng);
    const auto tr = fuzz_greedy(spec, 20000 + k, 10'000, RecordLevel::Summary);
    const Rational bound = naive_harmonic(spec.n) + Rational(1);
    worst = std::max(worst, (tr.backlog / bound).to_double());
    if (bound < tr.backlog) ++above;
  }
  o.pass = above == 0;
  o.detail = "1000 games of 10^4 steps, " + std::to_string(above) + " above H(n)+1, worst backlog/bound " +
             fmt(worst, 3);
  return o;
}

Outcome ac11() {
  Outcome o;
  SearchConfig cfg;
  cfg.family = Family::Steep3;
  cfg.seed = 1;
  cfg.seeds = 1000;
  cfg.iterations = 20;
  cfg.validate();
  const auto results = run_search(cfg);
  std::size_t found = 0;
  std::size_t verified = 0;
  std::string seeds;
  for (const auto& r : results) {
    if (!r.counterexample()) continue;
    ++found;
    try {
      if (replay_verify(r)) ++verified;
    } catch (const GameError&) {
    }
    seeds += " " + std::to_string(r.seed) + " (" + fmt(r.backlog.to_double(), 5) + ")";
  }
  o.pass = found > 0 && verified == found;
  o.detail = "steep3 seeds 1..1000, 20 iterations: " + std::to_string(found) + " found, " + std::to_string(verified) +
             " replay-verified;" + seeds;

  SearchConfig steep2 = cfg;
  steep2.family = Family::Steep2;
  steep2.validate();
  std::size_t found2 = 0;
  for (const auto& r : run_search(steep2)) found2 += r.counterexample() ? 1 : 0;
  o.detail += "; steep2 same budget: " + std::to_string(found2) + " found (informational)";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::cout << name << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  [" << fmt(seconds_since(t0), 1)
              << " s]" << std::endl;
  }
  return failed ? 1 : 0;
}
