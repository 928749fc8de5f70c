#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cupgame/adversaries.hpp"
#include "cupgame/analysis.hpp"
#include "cupgame/players.hpp"

using namespace cupgame;

namespace {

Rational r(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const GameError& e) {
    return e.kind();
  }
  FAIL("no GameError thrown");
  return ErrorKind::ConfigError;
}

bool has_check(const InvariantReport& rep, const std::string& check) {
  for (const auto& f : rep.findings) {
    if (f.check == check) return true;
  }
  return false;
}

Trace fuzz_trace(const InfoModel& info, std::uint64_t seed, std::size_t n = 7, std::uint64_t steps = 300) {
  GameSpec s;
  s.n = n;
  s.info = info;
  s.tiebreak = info.is_exact() ? TieBreak::LowestIndex : TieBreak::AdversaryDirected;
  FuzzAdversary adv(s, seed);
  GreedyPlayer g;
  return run_game(s, adv, g, steps);
}

std::vector<RationalVec> intermediates(const Trace& tr) {
  std::vector<RationalVec> out;
  replay(tr, [&](const StepRecord&, const CupState&, const CupState& mid, const CupState&) {
    out.push_back(mid.heights);
  });
  return out;
}

// Pours the whole unit into cup 0 and never looks at estimates.
class SinkAdversary final : public Adversary {
 public:
  explicit SinkAdversary(std::size_t n) {
    RationalVec f(n);
    f[0] = Rational(1);
    fill_ = share(std::move(f));
  }
  std::optional<AdversaryMove> next(const CupState&) override { return AdversaryMove{fill_, Rational(), {}}; }
  std::string name() const override { return "sink"; }

 private:
  SharedVec fill_;
};

class IdlePlayer final : public Player {
 public:
  std::optional<std::size_t> choose(const PlayerView&) override { return std::nullopt; }
  std::string name() const override { return "idle"; }
};

double simpson(double alpha, double b, int intervals) {
  auto f = [alpha](double x) {
    const double l = std::log(x);
    return std::exp(alpha * l * l);
  };
  const double h = (b - 1.0) / intervals;
  double s = f(1.0) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(1.0 + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("harmonic numbers and products match naive loops") {
  Rational h;
  Rational p(1);
  const Rational c(3, 7);
  for (std::size_t n = 1; n <= 300; ++n) {
    h += r(1, static_cast<std::int64_t>(n));
    p *= r(1) + c / r(static_cast<std::int64_t>(n));
    REQUIRE(harmonic(n) == h);
    REQUIRE(harmonic_product(n, c) == p);
  }
  CHECK(harmonic(0) == r(0));
  CHECK(harmonic_product(0, c) == r(1));
  // Telescoping at larger n.
  for (std::size_t n : {1000, 4097}) {
    const Rational nn(static_cast<std::int64_t>(n));
    CHECK(harmonic_product(n, r(1, 2)) == harmonic_product(n - 1, r(1, 2)) * (r(1) + r(1, 2) / nn));
    CHECK(harmonic(n) == harmonic(n - 1) + r(1) / nn);
  }
  CHECK(kind_of([] { harmonic_product(3, r(-1)); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("the product has the gamma-function closed form") {
  // prod (1 + c/i) = Gamma(n+1+c) / (Gamma(n+1) Gamma(1+c))
  for (const auto& c : {r(1, 2), r(3, 2), r(5, 4)}) {
    const double cd = c.to_double();
    for (std::size_t n : {1, 10, 1000, 65536}) {
      const double nd = static_cast<double>(n);
      const double expect = std::lgamma(nd + 1 + cd) - std::lgamma(nd + 1) - std::lgamma(1 + cd);
      // lgamma near n carries about 1e-16 * n ln n of absolute error.
      CHECK(std::abs(log_of(harmonic_product(n, c)) - expect) < 1e-14 * nd * std::log(nd + 2) + 1e-13);
    }
  }
  CHECK(log_of(r(1)) == 0.0);
  CHECK(kind_of([] { log_of(r(0)); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("harmonic product ratios stay inside the frozen bands") {
  for (const auto& band : fact1_bands()) {
    const auto st = fact1_ratios(band.c, 4, 16);
    CHECK(st.samples.size() == 13);
    CHECK(st.min >= band.lo);
    CHECK(st.max <= band.hi);
    for (const auto& s : st.samples) {
      const double cd = band.c.to_double();
      const double nd = static_cast<double>(s.n);
      const double oracle =
          std::exp(std::lgamma(nd + 1 + cd) - std::lgamma(nd + 1) - std::lgamma(1 + cd) - cd * std::log(nd));
      CHECK(s.ratio == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("bound values") {
  CHECK(*bound_value("optimal_cup", 4).exact == r(37, 12));
  CHECK(*bound_value("hybrid_cup", 1).exact == r(3));
  CHECK(*bound_value("greedy_bamboo_lower", 1).exact == r(2076, 1000));
  CHECK(*bound_value("multiplicative_upper", 2, r(2)).exact == r(15, 2));
  CHECK(*bound_value("additive_upper", 3, r(1)).exact == r(6));
  CHECK(*bound_value("additive_lower", 3, r(1)).exact == r(5, 3));
  CHECK(*bound_value("multiplicative_lower", 4, r(2)).exact == r(1));
  const auto asym = bound_value("multiplicative_asymptotic", 1024, r(2));
  CHECK(asym.asymptotic);
  CHECK_FALSE(asym.exact);
  CHECK(asym.approx == doctest::Approx(32.0));
  for (const auto& name : bound_names()) CHECK_NOTHROW(bound_value(name, 16, r(2)));
  CHECK(kind_of([] { bound_value("nope", 4); }) == ErrorKind::UnknownBound);
  CHECK(kind_of([] { bound_value("multiplicative_upper", 4, r(1)); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("trace verifier catches tampering") {
  const auto good = fuzz_trace(InfoModel::multiplicative(r(2)), 17);
  REQUIRE(verify_trace(good).ok());

  auto bad_max = good;
  bad_max.records[10].intermediate_max += r(1);
  CHECK(has_check(verify_trace(bad_max), "intermediate_max"));

  auto bad_backlog = good;
  bad_backlog.backlog += r(1, 1000);
  CHECK(has_check(verify_trace(bad_backlog), "backlog"));

  auto bad_fill = good;
  RationalVec f = *bad_fill.records[3].fill;
  f[0] += r(1);
  bad_fill.records[3].fill = share(std::move(f));
  CHECK(has_check(verify_trace(bad_fill), "fill"));

  auto bad_est = good;
  RationalVec e = *bad_est.records[20].estimates;
  e[0] = e[0] * r(3) + r(1);
  bad_est.records[20].estimates = share(std::move(e));
  CHECK(has_check(verify_trace(bad_est), "sandwich"));

  auto bad_discard = good;
  bad_discard.records[5].discarded = r(1, 2);
  RationalVec half = *bad_discard.records[5].fill;
  for (auto& x : half) x *= r(1, 2);
  bad_discard.records[5].fill = share(std::move(half));
  CHECK(has_check(verify_trace(bad_discard), "fill"));

  // Point a choice at a cup that cannot be eligible.
  auto bad_choice = good;
  bool tampered = false;
  replay(good, [&](const StepRecord& rec, const CupState&, const CupState& mid, const CupState&) {
    if (tampered) return;
    for (std::size_t i = 0; i < mid.size(); ++i) {
      if (!is_eligible(mid.heights[i], mid.max(), good.spec.info)) {
        bad_choice.records[rec.t].chosen = i;
        tampered = true;
        return;
      }
    }
  });
  REQUIRE(tampered);
  CHECK(has_check(verify_trace(bad_choice), "eligibility"));

  auto summary = good;
  summary.records[0].fill.reset();
  CHECK(has_check(verify_trace(summary), "fill"));
  CHECK(kind_of([&] { replay(summary, [](auto&&...) {}); }) == ErrorKind::ParseError);
}

TEST_CASE("multiplicative lemma on hand-made sequences") {
  // c = 2, K = 2, m = 1: rhs = (g(t-1,2) + 2)(1 + 1/2) - 2 = (2 + 2) * 3/2 - 2 = 4.
  const auto pass = check_lemma1_sequence({{r(3), r(1)}, {r(4), r(0)}}, r(2));
  CHECK(pass.pairs_checked == 1);
  CHECK(pass.cells_checked == 1);
  CHECK(pass.second_only == 1);
  CHECK(pass.ok());
  const auto fail = check_lemma1_sequence({{r(3), r(1)}, {r(9, 2), r(0)}}, r(2));
  CHECK(fail.violations == 1);
  REQUIRE(fail.first_violation);
  CHECK(fail.first_violation->rhs == r(4));
  CHECK(fail.first_violation->g_t_m == r(9, 2));
  // Out of scope: the first maximum is below c.
  const auto skip = check_lemma1_sequence({{r(1), r(1)}, {r(9, 2), r(0)}}, r(2));
  CHECK(skip.pairs_checked == 0);
  // Decrease satisfies the first disjunct.
  const auto down = check_lemma1_sequence({{r(5), r(1)}, {r(4), r(0)}}, r(2));
  CHECK(down.first_disjunct == 1);
  CHECK(kind_of([] { check_lemma1_sequence({}, r(1)); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("additive lemma on hand-made sequences") {
  // c = 1, m = 1: rhs = g(t-1,2) + 2 = 4.
  CHECK(check_lemma3_sequence({{r(3), r(1)}, {r(4), r(0)}}, r(1)).ok());
  const auto fail = check_lemma3_sequence({{r(3), r(1)}, {r(5), r(0)}}, r(1));
  CHECK(fail.violations == 1);
  CHECK(fail.first_violation->rhs == r(4));
  CHECK(check_lemma3_sequence({{r(3, 2), r(1)}, {r(5), r(0)}}, r(1)).pairs_checked == 0);
}

TEST_CASE("lemmas hold on construction and fuzz traces and fail on corrupted ones") {
  MultiplicativeLowerBound mlb(12, r(2));
  GreedyPlayer g;
  const auto mtr = run_game(mlb.spec(), mlb, g, 1'000'000);
  const auto l1 = check_lemma1(mtr, r(2));
  CHECK(l1.ok());
  CHECK(l1.pairs_checked > 0);

  AdditiveLowerBound alb(12, r(1));
  const auto atr = run_game(alb.spec(), alb, g, 1'000'000);
  const auto l3 = check_lemma3(atr, r(1));
  CHECK(l3.ok());
  CHECK(l3.pairs_checked > 0);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(check_lemma1(fuzz_trace(InfoModel::multiplicative(r(3, 2)), seed), r(3, 2)).ok());
    CHECK(check_lemma3(fuzz_trace(InfoModel::additive(r(1, 2)), seed), r(1, 2)).ok());
  }

  // Lift the tallest cup at an in-scope step.
  auto g1 = intermediates(mtr);
  std::size_t t = 1;
  while (t < g1.size() && !(g1[t - 1] != g1[t] && *std::max_element(g1[t - 1].begin(), g1[t - 1].end()) >= r(2) &&
                            *std::max_element(g1[t].begin(), g1[t].end()) >= r(2)))
    ++t;
  REQUIRE(t < g1.size());
  auto top = std::max_element(g1[t].begin(), g1[t].end());
  *top += r(100);
  CHECK(check_lemma1_sequence(g1, r(2)).violations > 0);

  auto g3 = intermediates(atr);
  t = 1;
  while (t < g3.size() && !(*std::max_element(g3[t - 1].begin(), g3[t - 1].end()) >= r(2) &&
                            *std::max_element(g3[t].begin(), g3[t].end()) >= r(2)))
    ++t;
  REQUIRE(t < g3.size());
  *std::max_element(g3[t].begin(), g3[t].end()) += r(100);
  CHECK(check_lemma3_sequence(g3, r(1)).violations > 0);
}

TEST_CASE("potential integral against Simpson's rule") {
  const auto p = PotentialParams::make(r(9));
  CHECK_FALSE(p.clamped);
  const double lc = std::log(9.0);
  CHECK(p.alpha == doctest::Approx(1.0 / (4 * lc * lc)));
  CHECK(p.threshold == r(36));
  for (const auto& h : {r(3, 2), r(7), r(50), r(1000)}) {
    const double b = h.to_double();
    CHECK(potential_integral(h, p) == doctest::Approx(simpson(p.alpha, b, 200000)).epsilon(1e-9));
  }
  CHECK(potential_integral(r(1), p) == 0.0);
  CHECK(potential_integral(r(1, 2), p) == 0.0);
  double last = 0;
  for (int k = 1; k <= 40; ++k) {
    const double v = potential_integral(r(k, 2), p);
    CHECK(v >= last);
    last = v;
  }
  CHECK(potential(CupState::initial(5), p) == 0.0);
}

TEST_CASE("potential parameters clamp small ratios") {
  const auto p = PotentialParams::make(r(2));
  CHECK(p.clamped);
  CHECK(p.c == e_squared());
  CHECK(p.alpha == doctest::Approx(1.0 / 16).epsilon(1e-8));
  CHECK(std::abs(e_squared().to_double() - std::exp(2.0)) < 1e-9);
  CHECK(kind_of([] { PotentialParams::make(r(9), 0.0); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("potential descent monitor") {
  FlushingOptions o;
  o.rule = FlushingOptions::Rule::Balanced;
  o.game_c = e_squared();
  FlushingLowerBound adv(500, e_squared(), o);
  GreedyPlayer g;
  const auto tr = run_game(adv.spec(), adv, g, 1'000'000);
  const auto rep = check_potential_descent(tr, PotentialParams::make(e_squared()));
  CHECK(rep.ok());
  CHECK(rep.descent_checked > 0);
  CHECK(rep.initial == 0.0);

  // An idle player lets one cup grow without bound: in scope the potential rises.
  GameSpec s;
  s.n = 2;
  s.removal = RemovalModel::Flush;
  SinkAdversary sink(2);
  IdlePlayer idle;
  const auto grow = run_game(s, sink, idle, 60);
  const auto bad = check_potential_descent(grow, PotentialParams::make(r(8)));
  CHECK(bad.descent_checked == 60 - 31);
  CHECK(bad.descent_violations == bad.descent_checked);

  const auto unit = fuzz_trace(InfoModel::exact(), 1);
  CHECK(kind_of([&] { check_potential_descent(unit, PotentialParams::make(r(8))); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("flushing structure check rejects tampered reports") {
  FlushingLowerBound adv(200, r(5, 4));
  GreedyPlayer g;
  run_game(adv.spec(), adv, g, 1'000'000);
  const auto& rep = adv.report();
  REQUIRE(check_flushing_structure(rep, 200, r(5, 4)).ok());

  auto sized = rep;
  sized.cohorts[2].count += 1;
  CHECK(check_flushing_structure(sized, 200, r(5, 4)).size_mismatches > 0);

  auto lifted = rep;
  lifted.cohorts[1].height += r(1, 100);
  CHECK(check_flushing_structure(lifted, 200, r(5, 4)).height_mismatches > 0);

  auto cut = rep;
  cut.cohorts.resize(1);
  CHECK_FALSE(check_flushing_structure(cut, 200, r(5, 4)).guarantee_met);

  auto slack = rep;
  REQUIRE_FALSE(slack.slack.empty());
  slack.slack[0].ok = false;
  CHECK(check_flushing_structure(slack, 200, r(5, 4)).slack_failures == 1);

  CHECK_FALSE(check_flushing_structure(FlushingReport{}, 200, r(5, 4)).ok());
}
