#include "cupgame/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cupgame/rational_gmp.hpp"

namespace cupgame {

namespace {

const Rational kOne(1);

Rational of_size(std::size_t v) { return Rational(static_cast<std::int64_t>(v)); }

// Product of f(lo..hi) by recursive halving, so the big multiplications stay
// balanced.
template <typename F>
mpz_class product_tree(std::size_t lo, std::size_t hi, const F& f) {
  if (lo > hi) return 1;
  if (hi - lo < 16) {
    mpz_class acc = 1;
    for (std::size_t i = lo; i <= hi; ++i) acc *= f(i);
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return product_tree(lo, mid, f) * product_tree(mid + 1, hi, f);
}

// sum_{i=lo}^{hi} 1/i as p/q, unreduced.
void harmonic_split(std::size_t lo, std::size_t hi, mpz_class& p, mpz_class& q) {
  if (lo == hi) {
    p = 1;
    q = static_cast<unsigned long>(lo);
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  mpz_class p1, q1, p2, q2;
  harmonic_split(lo, mid, p1, q1);
  harmonic_split(mid + 1, hi, p2, q2);
  p = p1 * q2 + p2 * q1;
  q = q1 * q2;
}

double log_of_mpz(const mpz_class& z) {
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

Rational harmonic(std::size_t n) {
  if (n == 0) return Rational();
  mpz_class p, q;
  harmonic_split(1, n, p, q);
  mpq_class h(p, q);
  h.canonicalize();
  return from_mpq(std::move(h));
}

Rational harmonic_product(std::size_t n, const Rational& c) {
  if (c <= Rational(-1)) throw GameError(ErrorKind::InvalidSpec, "harmonic_product needs c > -1, got " + c.str());
  const mpq_class cq = to_mpq(c);
  const mpz_class p = cq.get_num();
  const mpz_class q = cq.get_den();
  // (1 + c/i) = (iq + p) / (iq)
  mpz_class num = product_tree(1, n, [&](std::size_t i) { return mpz_class(q * static_cast<unsigned long>(i) + p); });
  mpz_class den = product_tree(1, n, [&](std::size_t i) { return mpz_class(q * static_cast<unsigned long>(i)); });
  mpq_class out(num, den);
  out.canonicalize();
  return from_mpq(std::move(out));
}

double log_of(const Rational& value) {
  if (value.sign() <= 0) throw GameError(ErrorKind::InvalidSpec, "log of non-positive " + value.str());
  const mpq_class q = to_mpq(value);
  return log_of_mpz(q.get_num()) - log_of_mpz(q.get_den());
}

RatioStability fact1_ratios(const Rational& c, unsigned lo_exp, unsigned hi_exp) {
  RatioStability out;
  out.c = c;
  const double cd = c.to_double();
  for (unsigned k = lo_exp; k <= hi_exp; ++k) {
    const std::size_t n = std::size_t{1} << k;
    const double ratio = std::exp(log_of(harmonic_product(n, c)) - cd * std::log(static_cast<double>(n)));
    out.samples.push_back({n, ratio});
  }
  if (!out.samples.empty()) {
    auto [lo, hi] = std::minmax_element(out.samples.begin(), out.samples.end(),
                                        [](const RatioSample& a, const RatioSample& b) { return a.ratio < b.ratio; });
    out.min = lo->ratio;
    out.max = hi->ratio;
  }
  return out;
}

const std::vector<RatioBand>& fact1_bands() {
  static const std::vector<RatioBand> bands{
      {Rational(1, 2), 1.128385, 1.154587},
      {Rational(3, 2), 0.752274, 0.841887},
  };
  return bands;
}

// ---------------------------------------------------------------- bounds

Rational multiplicative_upper_bound(std::size_t n, const Rational& c) {
  Rational prod(1);
  for (std::size_t i = 1; i < n; ++i) prod *= kOne + (c - kOne) / (c * of_size(i));
  return (c + kOne + c / (c - kOne)) * prod;
}

Rational additive_upper_bound(std::size_t n, const Rational& c) {
  return c + Rational(2) + (c + kOne) * harmonic(n == 0 ? 0 : n - 1);
}

const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names = {
      "optimal_cup",          "optimal_bamboo",      "greedy_bamboo_lower",       "greedy_bamboo_upper",
      "additive_upper",       "additive_lower",      "multiplicative_asymptotic", "flushing_asymptotic",
      "multiplicative_upper", "multiplicative_lower", "hybrid_cup",
  };
  return names;
}

BoundSpec bound_value(const std::string& name, std::size_t n, const Rational& c) {
  BoundSpec b;
  b.name = name;
  b.n = n;
  b.c = c;
  auto need_n = [&]() {
    if (n == 0) throw GameError(ErrorKind::InvalidSpec, name + " needs n >= 1");
  };
  auto need_c_above = [&](const Rational& lo) {
    if (c <= lo) throw GameError(ErrorKind::InvalidSpec, name + " needs c > " + lo.str() + ", got " + c.str());
  };
  if (name == "optimal_cup") {
    need_n();
    b.exact = harmonic(n) + kOne;
    b.formula = "H(n) + 1";
  } else if (name == "hybrid_cup") {
    need_n();
    b.exact = harmonic(n) + Rational(2);
    b.formula = "H(n) + 2";
  } else if (name == "optimal_bamboo") {
    b.exact = Rational(2);
    b.formula = "2";
  } else if (name == "greedy_bamboo_lower") {
    b.exact = Rational(519, 250);
    b.formula = "2.076";
  } else if (name == "greedy_bamboo_upper") {
    b.exact = Rational(4);
    b.formula = "4";
  } else if (name == "additive_upper") {
    need_n();
    need_c_above(Rational());
    b.exact = additive_upper_bound(n, c);
    b.formula = "c + 2 + (c+1) H(n-1)";
  } else if (name == "additive_lower") {
    need_n();
    need_c_above(Rational());
    Rational sum;
    for (std::size_t i = 1; i < n; ++i) sum += (c + kOne) / of_size(i + 1);
    b.exact = sum;
    b.formula = "sum_{i=1}^{n-1} (c+1)/(i+1), i.e. (c+1) ln n - O(c+1)";
  } else if (name == "multiplicative_upper") {
    need_n();
    need_c_above(kOne);
    b.exact = multiplicative_upper_bound(n, c);
    b.formula = "(c+1+c/(c-1)) prod_{i=1}^{n-1} (1 + (c-1)/(ci))";
  } else if (name == "multiplicative_lower") {
    if (n < 4) throw GameError(ErrorKind::InvalidSpec, name + " needs n >= 4");
    need_c_above(kOne);
    Rational prod(1);
    for (std::size_t i = 1; i + 3 <= n; ++i) prod *= (c * of_size(i)) / (c * of_size(i) + kOne);
    b.exact = of_size(n - 1) * prod - kOne;
    b.formula = "(n-1) prod_{i=1}^{n-3} ci/(ci+1) - 1";
  } else if (name == "multiplicative_asymptotic") {
    need_n();
    need_c_above(kOne);
    b.asymptotic = true;
    b.formula = "Theta(n^((c-1)/c))";
    const double cd = c.to_double();
    b.approx = std::pow(static_cast<double>(n), (cd - 1) / cd);
    return b;
  } else if (name == "flushing_asymptotic") {
    need_n();
    b.asymptotic = true;
    b.formula = "e^Theta(sqrt(log n))";
    b.approx = std::exp(std::sqrt(std::log(static_cast<double>(n))));
    return b;
  } else {
    throw GameError(ErrorKind::UnknownBound, "'" + name + "'");
  }
  b.approx = b.exact->to_double();
  return b;
}

// ---------------------------------------------------------------- replay

void replay(const Trace& trace, const ReplayVisitor& visit) {
  CupState state = CupState::initial(trace.spec.n);
  CupState before;
  CupState intermediate;
  for (const auto& rec : trace.records) {
    if (!rec.fill) {
      throw GameError(ErrorKind::ParseError, "step " + std::to_string(rec.t) + " was recorded without its fill");
    }
    before = state;
    inject_in_place(state, *rec.fill, rec.discarded);
    intermediate = state;
    if (rec.chosen) {
      remove_in_place(state, *rec.chosen, trace.spec.removal);
    } else {
      state.phase = Phase::PostRemoval;
      ++state.t;
    }
    visit(rec, before, intermediate, state);
  }
}

namespace {

constexpr std::size_t kMaxFindings = 20;

void add_finding(InvariantReport& report, std::uint64_t t, const char* check, std::string detail) {
  ++report.violations;
  if (report.findings.size() < kMaxFindings) report.findings.push_back({t, check, std::move(detail)});
}

bool fill_is_valid(const StepRecord& rec, std::size_t n, std::string& why) {
  try {
    check_fill(*rec.fill, n, rec.discarded);
  } catch (const GameError& e) {
    why = e.what();
    return false;
  }
  return true;
}

}  // namespace

InvariantReport verify_trace(const Trace& trace) {
  InvariantReport report;
  const GameSpec& spec = trace.spec;
  const std::size_t n = spec.n;
  CupState state = CupState::initial(n);
  Rational backlog;
  std::uint64_t backlog_step = 0;
  bool have_backlog = false;

  for (const auto& rec : trace.records) {
    ++report.steps;
    if (!rec.fill) {
      add_finding(report, rec.t, "fill", "no fill recorded");
      return report;
    }
    if (rec.t != state.t) add_finding(report, rec.t, "time", "expected t = " + std::to_string(state.t));
    std::string why;
    if (!fill_is_valid(rec, n, why)) {
      add_finding(report, rec.t, "fill", why);
      return report;
    }
    if (!rec.discarded.is_zero() && !spec.fixed_rates) {
      add_finding(report, rec.t, "fill", "discard in a variable-rate game");
    }

    const Rational total_before = state.total();
    inject_in_place(state, *rec.fill, rec.discarded);
    const Rational total_mid = state.total();
    if (total_mid != total_before + kOne - rec.discarded) {
      add_finding(report, rec.t, "conservation", "injection changed total by " + (total_mid - total_before).str());
    }
    const Rational g_max = state.max();
    if (g_max != rec.intermediate_max) {
      add_finding(report, rec.t, "intermediate_max",
                  "recorded " + rec.intermediate_max.str() + ", replay gives " + g_max.str());
    }

    if (rec.estimates) {
      const RationalVec& est = *rec.estimates;
      if (est.size() != n) {
        add_finding(report, rec.t, "sandwich", "estimate vector has wrong length");
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          if (est[i] < state.heights[i] || est[i] > spec.info.upper_estimate(state.heights[i])) {
            add_finding(report, rec.t, "sandwich",
                        "cup " + std::to_string(i) + " height " + state.heights[i].str() + " estimate " + est[i].str());
            break;
          }
        }
      }
    }
    if (!spec.info.is_exact()) {
      for (const auto& pick : {rec.directed, rec.chosen}) {
        if (pick && (*pick >= n || !is_eligible(state.heights[*pick], g_max, spec.info))) {
          add_finding(report, rec.t, "eligibility", "cup " + std::to_string(*pick) + " is not eligible");
        }
      }
    }

    Rational removed;
    if (rec.chosen) {
      if (*rec.chosen >= n) {
        add_finding(report, rec.t, "choice", "cup index out of range");
        return report;
      }
      removed = remove_in_place(state, *rec.chosen, spec.removal);
      const Rational pre = state.heights[*rec.chosen] + removed;
      const Rational expected = spec.removal == RemovalModel::Flush ? pre : (pre < kOne ? pre : kOne);
      if (removed != expected) add_finding(report, rec.t, "removal", "removed " + removed.str());
    } else {
      state.phase = Phase::PostRemoval;
      ++state.t;
    }
    if (state.total() != total_mid - removed) add_finding(report, rec.t, "conservation", "removal mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (state.heights[i].sign() < 0) {
        add_finding(report, rec.t, "non_negative", "cup " + std::to_string(i) + " at " + state.heights[i].str());
        break;
      }
    }
    const Rational f_max = state.max();
    if (f_max != rec.post_removal_max) {
      add_finding(report, rec.t, "post_removal_max",
                  "recorded " + rec.post_removal_max.str() + ", replay gives " + f_max.str());
    }
    if (rec.post_removal_max > rec.intermediate_max) {
      add_finding(report, rec.t, "dominance", "post-removal max exceeds intermediate max");
    }
    if (!have_backlog || backlog < g_max) {
      backlog = g_max;
      backlog_step = rec.t;
      have_backlog = true;
    }
  }
  if (backlog != trace.backlog || backlog_step != trace.backlog_step) {
    add_finding(report, backlog_step, "backlog",
                "recorded " + trace.backlog.str() + " at " + std::to_string(trace.backlog_step) + ", replay gives " +
                    backlog.str() + " at " + std::to_string(backlog_step));
  }
  return report;
}

// ---------------------------------------------------------------- lemmas

namespace {

RationalVec descending_prefix_sums(const RationalVec& heights) {
  RationalVec sorted = heights;
  std::sort(sorted.begin(), sorted.end(), [](const Rational& a, const Rational& b) { return b < a; });
  RationalVec sums(sorted.size() + 1);
  for (std::size_t i = 0; i < sorted.size(); ++i) sums[i + 1] = sums[i] + sorted[i];
  return sums;
}

Rational max_of_vec(const RationalVec& v) {
  return v.empty() ? Rational() : *std::max_element(v.begin(), v.end());
}

// `second(g_prev_m1, m)` returns the bound the second disjunct puts on g(t, m).
template <typename Second>
LemmaReport check_lemma(const char* lemma, const std::vector<RationalVec>& g, const Rational& threshold,
                        const Second& second) {
  LemmaReport report;
  report.lemma = lemma;
  report.threshold = threshold;
  std::vector<bool> in_scope(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) {
    in_scope[t] = max_of_vec(g[t]) >= threshold;
    if (in_scope[t]) ++report.steps_in_scope;
  }
  RationalVec prev_sums;
  bool prev_ready = false;
  for (std::size_t t = 1; t < g.size(); ++t) {
    if (!in_scope[t] || !in_scope[t - 1]) {
      prev_ready = false;
      continue;
    }
    if (!prev_ready) prev_sums = descending_prefix_sums(g[t - 1]);
    RationalVec sums = descending_prefix_sums(g[t]);
    ++report.pairs_checked;
    const std::size_t n = g[t].size();
    for (std::size_t m = 1; m + 1 <= n; ++m) {
      ++report.cells_checked;
      const Rational mm = of_size(m);
      const Rational g_t_m = sums[m] / mm;
      const Rational g_prev_m = prev_sums[m] / mm;
      if (g_t_m <= g_prev_m) {
        ++report.first_disjunct;
        continue;
      }
      const Rational g_prev_m1 = prev_sums[m + 1] / of_size(m + 1);
      Rational rhs = second(g_prev_m1, m);
      if (g_t_m <= rhs) {
        ++report.second_only;
        continue;
      }
      ++report.violations;
      if (!report.first_violation) {
        report.first_violation = LemmaViolation{t, m, g_t_m, g_prev_m, g_prev_m1, std::move(rhs)};
      }
    }
    prev_sums = std::move(sums);
    prev_ready = true;
  }
  return report;
}

std::vector<RationalVec> intermediates_of(const Trace& trace) {
  std::vector<RationalVec> out;
  out.reserve(trace.records.size());
  replay(trace, [&](const StepRecord&, const CupState&, const CupState& mid, const CupState&) {
    out.push_back(mid.heights);
  });
  return out;
}

}  // namespace

LemmaReport check_lemma1_sequence(const std::vector<RationalVec>& intermediates, const Rational& c) {
  if (c <= kOne) throw GameError(ErrorKind::InvalidSpec, "the multiplicative lemma check needs c > 1");
  const Rational k = c / (c - kOne);
  return check_lemma("lemma1", intermediates, c, [&](const Rational& g_prev_m1, std::size_t m) {
    return (g_prev_m1 + k) * (kOne + (c - kOne) / (c * of_size(m))) - k;
  });
}

LemmaReport check_lemma3_sequence(const std::vector<RationalVec>& intermediates, const Rational& c) {
  if (c.sign() <= 0) throw GameError(ErrorKind::InvalidSpec, "the additive lemma check needs c > 0");
  const Rational step = c + kOne;
  return check_lemma("lemma3", intermediates, step, [&](const Rational& g_prev_m1, std::size_t m) {
    return g_prev_m1 + step / of_size(m);
  });
}

LemmaReport check_lemma1(const Trace& trace, const Rational& c) {
  return check_lemma1_sequence(intermediates_of(trace), c);
}

LemmaReport check_lemma3(const Trace& trace, const Rational& c) {
  return check_lemma3_sequence(intermediates_of(trace), c);
}

// --------------------------------------------------------------- flushing

FlushingStructure check_flushing_structure(const FlushingReport& report, std::size_t n, const Rational& c,
                                           FlushingOptions::Rule rule) {
  FlushingStructure out;
  const auto& cohorts = report.cohorts;
  out.generations = cohorts.size();
  auto note = [&](std::string s) {
    if (out.details.size() < 20) out.details.push_back(std::move(s));
  };
  if (cohorts.empty()) {
    note("no cohorts recorded");
    return out;
  }
  if (cohorts[0].count != n - 1 || cohorts[0].height != kOne) {
    ++out.size_mismatches;
    note("generation 0 should be n-1 cups at height 1");
  }
  for (std::size_t i = 1; i < cohorts.size(); ++i) {
    const std::size_t k = cohorts[i - 1].count;
    const Rational& x = cohorts[i - 1].height;
    std::size_t expect;
    if (rule == FlushingOptions::Rule::Floor) {
      expect = static_cast<std::size_t>((of_size(k) / (x + kOne)).floor().to_int64());
    } else {
      // Largest m whose raise, (c-1)x per cup, fits into k-m flushes.
      expect = 0;
      for (std::size_t m = k; m > 0; --m) {
        if (((c - kOne) * x * of_size(m)).ceil() <= of_size(k - m)) {
          expect = m;
          break;
        }
      }
    }
    if (cohorts[i].count != expect) {
      ++out.size_mismatches;
      note("generation " + std::to_string(i) + ": " + std::to_string(cohorts[i].count) + " cups, expected " +
           std::to_string(expect));
    }
    if (cohorts[i].height != c * x) {
      ++out.height_mismatches;
      note("generation " + std::to_string(i) + ": height " + cohorts[i].height.str() + ", expected " +
           (c * x).str());
    }
  }
  for (const auto& s : report.slack) {
    if (!s.ok) {
      ++out.slack_failures;
      note("generation " + std::to_string(s.generation) + ": slack fails");
    }
  }

  // The product guarantees below belong to the floor(k/(x+1)) rule only.
  if (rule != FlushingOptions::Rule::Floor) return out;

  // k_i >= floor((n-1) / prod_{j<i} (ceil(c^j) + 1)), so generation i is
  // non-empty while that product is at most n - 1.
  std::uint64_t prod = 1;
  Rational power(1);
  for (std::size_t i = 0; prod <= n - 1; ++i) {
    out.guaranteed_generation = i;
    if (i < cohorts.size()) {
      const std::uint64_t bound = (n - 1) / prod;
      if (cohorts[i].count < bound) {
        ++out.floor_bound_failures;
        note("generation " + std::to_string(i) + ": " + std::to_string(cohorts[i].count) + " cups, below " +
             std::to_string(bound));
      }
    }
    prod *= static_cast<std::uint64_t>(power.ceil().to_int64()) + 1;
    power *= c;
  }
  if (out.guaranteed_generation && *out.guaranteed_generation >= cohorts.size()) {
    out.guarantee_met = false;
    note("generation " + std::to_string(*out.guaranteed_generation) + " is guaranteed but not reached");
  }
  return out;
}

// -------------------------------------------------------------- potential

Rational e_squared() { return Rational(7389056099LL, 1000000000LL); }

PotentialParams PotentialParams::make(const Rational& c, double tolerance) {
  if (!(tolerance > 0)) throw GameError(ErrorKind::InvalidSpec, "quadrature tolerance must be positive");
  PotentialParams p;
  p.requested_c = c;
  const Rational floor_c = e_squared();
  p.clamped = c < floor_c;
  p.c = p.clamped ? floor_c : c;
  const double lc = std::log(p.c.to_double());
  p.alpha = 1.0 / (4.0 * lc * lc);
  p.tolerance = tolerance;
  p.threshold = Rational(4) * p.c;
  return p;
}

double potential_integral(const Rational& h, const PotentialParams& params) {
  if (h <= kOne) return 0.0;
  const double b = h.to_double();
  const double alpha = params.alpha;
  auto f = [alpha](double x) {
    const double l = std::log(x);
    return std::exp(alpha * l * l);
  };
  double error = 0;
  double l1 = 0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 1.0, b, 15, params.tolerance, &error, &l1);
  if (!std::isfinite(value) || error > params.tolerance * l1) {
    throw GameError(ErrorKind::QuadratureNonConvergence,
                    "height " + h.str() + ": error estimate " + std::to_string(error) + " for value " +
                        std::to_string(value));
  }
  return value;
}

double potential(const CupState& state, const PotentialParams& params) {
  double sum = 0;
  for (const auto& h : state.heights) sum += potential_integral(h, params);
  return sum;
}

PotentialReport check_potential_descent(const Trace& trace, const PotentialParams& params) {
  const GameSpec& spec = trace.spec;
  if (spec.removal != RemovalModel::Flush) {
    throw GameError(ErrorKind::InvalidSpec, "potential monitor expects a flushing game");
  }
  PotentialReport report;
  report.params = params;
  const std::size_t n = spec.n;
  std::map<Rational, double> cache;
  auto integral = [&](const Rational& h) {
    if (h <= kOne) return 0.0;
    auto it = cache.find(h);
    if (it != cache.end()) return it->second;
    const double v = potential_integral(h, params);
    cache.emplace(h, v);
    return v;
  };
  report.cap = static_cast<double>(n) * potential_integral(params.threshold, params);
  std::vector<double> per_cup(n, 0.0);
  double phi = 0;
  report.initial = phi;

  std::vector<std::size_t> changed;
  replay(trace, [&](const StepRecord& rec, const CupState&, const CupState& mid, const CupState& after) {
    ++report.steps;
    changed.clear();
    const RationalVec& fill = *rec.fill;
    for (std::size_t i = 0; i < n; ++i) {
      if (!fill[i].is_zero()) changed.push_back(i);
    }
    if (rec.chosen && (fill[*rec.chosen].is_zero())) changed.push_back(*rec.chosen);
    double delta = 0;
    double scale = 0;
    for (std::size_t i : changed) {
      const double now = integral(after.heights[i]);
      delta += now - per_cup[i];
      scale += now + per_cup[i];
      per_cup[i] = now;
    }
    phi += delta;
    report.max_potential = std::max(report.max_potential, phi);

    const Rational ell = mid.max();
    if (ell >= params.threshold) {
      ++report.descent_checked;
      if (report.descent_checked == 1 || delta > report.worst_descent) report.worst_descent = delta;
      if (!(delta < -10.0 * params.tolerance * std::max(scale, 1.0))) {
        ++report.descent_violations;
        if (!report.first_violation) {
          report.first_violation = Finding{rec.t, "descent",
                                           "intermediate max " + ell.str() + ", change " + std::to_string(delta)};
        }
      }
    } else {
      ++report.cap_checked;
      if (!(phi < report.cap)) {
        ++report.cap_violations;
        if (!report.first_violation) {
          report.first_violation = Finding{rec.t, "cap", "potential " + std::to_string(phi)};
        }
      }
    }
  });
  return report;
}

}  // namespace cupgame
