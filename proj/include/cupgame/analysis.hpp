#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cupgame/adversaries.hpp"
#include "cupgame/game.hpp"

namespace cupgame {

// ------------------------------------------------------------- numbers

Rational harmonic(std::size_t n);

// prod_{i=1}^{n} (1 + c/i), exact. Requires c > -1.
Rational harmonic_product(std::size_t n, const Rational& c);

// Natural log of a positive rational, accurate for values far outside the
// double range.
double log_of(const Rational& value);

struct RatioSample {
  std::size_t n;
  double ratio;  // harmonic_product(n, c) / n^c
};

struct RatioStability {
  Rational c;
  std::vector<RatioSample> samples;
  double min = 0;
  double max = 0;
};

// Samples at n = 2^lo .. 2^hi.
RatioStability fact1_ratios(const Rational& c, unsigned lo_exp, unsigned hi_exp);

// Frozen ratio intervals over n = 2^4 .. 2^16, measured once and rounded
// outward at 1e-6. They guard against regressions only; the Theta constants
// are not known in closed form.
struct RatioBand {
  Rational c;
  double lo;
  double hi;
};
const std::vector<RatioBand>& fact1_bands();

// ------------------------------------------------------------- bounds

struct BoundSpec {
  std::string name;
  std::size_t n = 0;
  Rational c;
  std::optional<Rational> exact;  // set when the bound is a closed-form rational
  double approx = 0;
  bool asymptotic = false;  // approx is the growth term only, constants unknown
  std::string formula;
};

// Throws GameError(UnknownBound).
BoundSpec bound_value(const std::string& name, std::size_t n, const Rational& c = Rational());
const std::vector<std::string>& bound_names();

// (c+1+c/(c-1)) * prod_{i=1}^{n-1} (1 + (c-1)/(ci))
Rational multiplicative_upper_bound(std::size_t n, const Rational& c);
// c + 2 + (c+1) H(n-1)
Rational additive_upper_bound(std::size_t n, const Rational& c);

// ------------------------------------------------------------- replay

// Re-derives every state of a fully recorded trace with the pure transition
// functions. Throws GameError(ParseError) on summary-only records.
using ReplayVisitor = std::function<void(const StepRecord& rec, const CupState& before, const CupState& intermediate,
                                         const CupState& after)>;
void replay(const Trace& trace, const ReplayVisitor& visit);

struct Finding {
  std::uint64_t t = 0;
  std::string check;
  std::string detail;
};

struct InvariantReport {
  std::uint64_t steps = 0;
  std::vector<Finding> findings;  // capped; `violations` counts all
  std::uint64_t violations = 0;
  bool ok() const { return violations == 0; }
};

// Conservation, non-negativity, backlog dominance, estimate sandwich and
// eligibility of every choice, plus the recorded maxima and backlog.
InvariantReport verify_trace(const Trace& trace);

// ------------------------------------------------------------- lemmas

struct LemmaViolation {
  std::uint64_t t = 0;
  std::size_t m = 0;
  Rational g_t_m;        // g(t, m)
  Rational g_prev_m;     // g(t-1, m)
  Rational g_prev_m1;    // g(t-1, m+1)
  Rational rhs;          // right side of the second disjunct
};

struct LemmaReport {
  std::string lemma;
  Rational threshold;  // scope is intermediate max >= threshold
  std::uint64_t steps_in_scope = 0;
  std::uint64_t pairs_checked = 0;
  std::uint64_t cells_checked = 0;
  std::uint64_t first_disjunct = 0;
  std::uint64_t second_only = 0;
  std::uint64_t violations = 0;
  std::optional<LemmaViolation> first_violation;
  bool ok() const { return violations == 0; }
};

// Both check every pair (t-1, t) of consecutive steps inside a maximal run
// whose intermediate maxima stay at or above the threshold (c, resp. c+1),
// for 1 <= m <= n-1, in exact arithmetic.
LemmaReport check_lemma1(const Trace& trace, const Rational& c);
LemmaReport check_lemma3(const Trace& trace, const Rational& c);

// Lower level entry points over explicit intermediate height sequences.
LemmaReport check_lemma1_sequence(const std::vector<RationalVec>& intermediates, const Rational& c);
LemmaReport check_lemma3_sequence(const std::vector<RationalVec>& intermediates, const Rational& c);

// ------------------------------------------------------------- flushing

struct FlushingStructure {
  std::size_t generations = 0;       // cohorts recorded, generation 0 included
  std::size_t size_mismatches = 0;   // cohort size differs from the selection rule
  std::size_t height_mismatches = 0; // cohort height differs from c times the previous one
  std::size_t slack_failures = 0;
  // Largest i with prod_{j<i} (ceil(c^j) + 1) <= n - 1; that generation
  // must be reached. Floor rule only, as is the bound on k_i.
  std::optional<std::size_t> guaranteed_generation;
  bool guarantee_met = true;
  // k_i >= floor((n-1) / prod_{j<i} (ceil(c^j) + 1)) for each reached i.
  std::size_t floor_bound_failures = 0;
  std::vector<std::string> details;
  bool ok() const {
    return generations > 0 && size_mismatches == 0 && height_mismatches == 0 && slack_failures == 0 &&
           guarantee_met && floor_bound_failures == 0;
  }
};

// Recomputes cohort sizes and heights from the construction's formulas and
// compares them with the simulated report.
FlushingStructure check_flushing_structure(const FlushingReport& report, std::size_t n, const Rational& c,
                                           FlushingOptions::Rule rule = FlushingOptions::Rule::Floor);

// ------------------------------------------------------------ potential

struct PotentialParams {
  Rational requested_c;
  Rational c;  // max(requested_c, e^2)
  bool clamped = false;
  double alpha = 0;  // 1 / (4 ln^2 c)
  double tolerance = 1e-10;
  Rational threshold;  // 4c

  static PotentialParams make(const Rational& c, double tolerance = 1e-10);
};

// Rational stand-in for e^2 used by the clamp.
Rational e_squared();

// int_1^h e^{alpha ln^2 x} dx, zero for h <= 1. Throws
// GameError(QuadratureNonConvergence).
double potential_integral(const Rational& h, const PotentialParams& params);
double potential(const CupState& state, const PotentialParams& params);

struct PotentialReport {
  PotentialParams params;
  std::uint64_t steps = 0;
  std::uint64_t descent_checked = 0;
  std::uint64_t descent_violations = 0;
  std::uint64_t cap_checked = 0;
  std::uint64_t cap_violations = 0;
  double cap = 0;  // n * int_1^{4c}
  double initial = 0;
  double max_potential = 0;
  double worst_descent = 0;  // largest (least negative) in-scope change
  std::optional<Finding> first_violation;
  bool ok() const { return descent_violations == 0 && cap_violations == 0; }
};

PotentialReport check_potential_descent(const Trace& trace, const PotentialParams& params);

}  // namespace cupgame
