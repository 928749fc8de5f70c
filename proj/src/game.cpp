#include "cupgame/game.hpp"

#include <algorithm>
#include <numeric>

namespace cupgame {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::FillSumMismatch: return "FillSumMismatch";
    case ErrorKind::NegativeFill: return "NegativeFill";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::PhaseMismatch: return "PhaseMismatch";
    case ErrorKind::EligibilityViolation: return "EligibilityViolation";
    case ErrorKind::EstimateOutOfBounds: return "EstimateOutOfBounds";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::RateSumExceedsOne: return "RateSumExceedsOne";
    case ErrorKind::InfeasibleSplit: return "InfeasibleSplit";
    case ErrorKind::CohortExhausted: return "CohortExhausted";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::UnknownBound: return "UnknownBound";
    case ErrorKind::ReplayMismatch: return "ReplayMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

GameError::GameError(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

Rational InfoModel::upper_estimate(const Rational& g) const {
  switch (kind) {
    case Kind::Exact: return g;
    case Kind::Multiplicative: return c * g;
    case Kind::Additive: return g + c;
  }
  return g;
}

Rational InfoModel::eligibility_threshold(const Rational& g_max) const {
  switch (kind) {
    case Kind::Exact: return g_max;
    case Kind::Multiplicative: return g_max / c;
    case Kind::Additive: return g_max - c;
  }
  return g_max;
}

void GameSpec::validate() const {
  if (n == 0) throw GameError(ErrorKind::InvalidSpec, "cup count must be positive");
  if (info.kind == InfoModel::Kind::Multiplicative && info.c <= Rational(1)) {
    throw GameError(ErrorKind::InvalidSpec, "multiplicative error requires c > 1, got " + info.c.str());
  }
  if (info.kind == InfoModel::Kind::Additive && info.c.sign() <= 0) {
    throw GameError(ErrorKind::InvalidSpec, "additive error requires c > 0, got " + info.c.str());
  }
  if (fixed_rates) {
    if (fixed_rates->size() != n) {
      throw GameError(ErrorKind::InvalidSpec, "rate vector length " + std::to_string(fixed_rates->size()) +
                                                  " does not match n = " + std::to_string(n));
    }
    Rational sum;
    for (const auto& r : *fixed_rates) {
      if (r.sign() < 0) throw GameError(ErrorKind::InvalidSpec, "negative rate " + r.str());
      sum += r;
    }
    if (sum > Rational(1)) throw GameError(ErrorKind::RateSumExceedsOne, "rates sum to " + sum.str());
  }
}

CupState CupState::initial(std::size_t n) {
  CupState s;
  s.heights.assign(n, Rational());
  return s;
}

Rational CupState::max() const {
  if (heights.empty()) return Rational();
  return *std::max_element(heights.begin(), heights.end());
}

Rational CupState::total() const {
  Rational sum;
  for (const auto& h : heights) sum += h;
  return sum;
}

void check_fill(std::span<const Rational> fill, std::size_t n, const Rational& discarded) {
  if (fill.size() != n) {
    throw GameError(ErrorKind::LengthMismatch,
                    "fill has " + std::to_string(fill.size()) + " entries, expected " + std::to_string(n));
  }
  if (discarded.sign() < 0) throw GameError(ErrorKind::NegativeFill, "negative discard " + discarded.str());
  Rational sum = discarded;
  for (std::size_t i = 0; i < fill.size(); ++i) {
    if (fill[i].sign() < 0) {
      throw GameError(ErrorKind::NegativeFill, "cup " + std::to_string(i) + " receives " + fill[i].str());
    }
    sum += fill[i];
  }
  if (sum != Rational(1)) throw GameError(ErrorKind::FillSumMismatch, "fill sums to " + sum.str());
}

void inject_in_place(CupState& state, std::span<const Rational> fill, const Rational& discarded) {
  if (state.phase != Phase::PostRemoval) throw GameError(ErrorKind::PhaseMismatch, "inject expects PostRemoval");
  check_fill(fill, state.size(), discarded);
  for (std::size_t i = 0; i < fill.size(); ++i) {
    if (!fill[i].is_zero()) state.heights[i] += fill[i];
  }
  state.phase = Phase::PostInjection;
}

Rational remove_in_place(CupState& state, std::size_t cup, RemovalModel removal) {
  if (state.phase != Phase::PostInjection) throw GameError(ErrorKind::PhaseMismatch, "remove expects PostInjection");
  if (cup >= state.size()) {
    throw GameError(ErrorKind::IndexOutOfRange,
                    "cup " + std::to_string(cup) + " with n = " + std::to_string(state.size()));
  }
  Rational& h = state.heights[cup];
  Rational removed;
  if (removal == RemovalModel::Flush || h <= Rational(1)) {
    removed = h;
    h = Rational();
  } else {
    removed = Rational(1);
    h -= removed;
  }
  state.phase = Phase::PostRemoval;
  ++state.t;
  return removed;
}

CupState inject(const CupState& state, std::span<const Rational> fill, const Rational& discarded) {
  CupState out = state;
  inject_in_place(out, fill, discarded);
  return out;
}

CupState remove(const CupState& state, std::size_t cup, const GameSpec& spec) {
  CupState out = state;
  remove_in_place(out, cup, spec.removal);
  return out;
}

PrefixAverages prefix_averages(std::span<const Rational> heights) {
  PrefixAverages out;
  out.order.resize(heights.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return heights[b] < heights[a]; });
  out.means.reserve(heights.size());
  Rational sum;
  for (std::size_t m = 1; m <= heights.size(); ++m) {
    sum += heights[out.order[m - 1]];
    out.means.push_back(sum / Rational(static_cast<std::int64_t>(m)));
  }
  return out;
}

PrefixAverages prefix_averages(const CupState& state) { return prefix_averages(state.heights); }

bool is_eligible(const Rational& height, const Rational& g_max, const InfoModel& info) {
  return height >= info.eligibility_threshold(g_max);
}

std::vector<std::size_t> eligible_set(const CupState& state, const InfoModel& info) {
  std::vector<std::size_t> out;
  if (state.heights.empty()) return out;
  const Rational threshold = info.eligibility_threshold(state.max());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.heights[i] >= threshold) out.push_back(i);
  }
  return out;
}

SharedVec Adversary::estimates(const CupState& /*intermediate*/, const AdversaryMove& /*move*/) { return nullptr; }

namespace {

void check_estimates(const RationalVec& g, const RationalVec& est, const InfoModel& info) {
  if (est.size() != g.size()) {
    throw GameError(ErrorKind::LengthMismatch,
                    "estimates have " + std::to_string(est.size()) + " entries, expected " + std::to_string(g.size()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (est[i] == g[i]) continue;
    if (est[i] < g[i] || est[i] > info.upper_estimate(g[i])) {
      throw GameError(ErrorKind::EstimateOutOfBounds,
                      "cup " + std::to_string(i) + " height " + g[i].str() + " estimate " + est[i].str());
    }
  }
}

}  // namespace

Trace run_game(const GameSpec& spec, Adversary& adversary, Player& player, std::uint64_t steps,
               const RunOptions& options) {
  spec.validate();
  const std::size_t n = spec.n;
  Trace trace;
  trace.spec = spec;
  trace.records.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(steps, 1U << 22)));

  CupState state = CupState::initial(n);
  SharedVec validated_fill;
  Rational validated_discard;
  CupState intermediate_copy;

  for (std::uint64_t step = 0; step < steps; ++step) {
    std::optional<AdversaryMove> move = adversary.next(state);
    if (!move) break;
    if (!move->fill) throw GameError(ErrorKind::LengthMismatch, adversary.name() + " produced no fill");
    if (!move->discarded.is_zero() && !spec.fixed_rates) {
      throw GameError(ErrorKind::FillSumMismatch, "discarded water is only allowed in fixed-rate games");
    }
    if (move->fill != validated_fill || move->discarded != validated_discard) {
      check_fill(*move->fill, n, move->discarded);
      validated_fill = move->fill;
      validated_discard = move->discarded;
    }
    const RationalVec& fill = *move->fill;
    for (std::size_t i = 0; i < n; ++i) {
      if (!fill[i].is_zero()) state.heights[i] += fill[i];
    }
    state.phase = Phase::PostInjection;

    // Top two in one pass so the post-removal maximum needs no rescan.
    std::size_t argmax = 0;
    std::size_t runner_up = n;
    for (std::size_t i = 1; i < n; ++i) {
      if (state.heights[argmax] < state.heights[i]) {
        runner_up = argmax;
        argmax = i;
      } else if (runner_up == n || state.heights[runner_up] < state.heights[i]) {
        runner_up = i;
      }
    }
    const Rational g_max = state.heights[argmax];

    SharedVec est;
    if (!spec.info.is_exact()) {
      est = adversary.estimates(state, *move);
      if (est) check_estimates(state.heights, *est, spec.info);
      if (move->directed) {
        const std::size_t d = *move->directed;
        if (d >= n) throw GameError(ErrorKind::IndexOutOfRange, "directed cup " + std::to_string(d));
        if (!is_eligible(state.heights[d], g_max, spec.info)) {
          throw GameError(ErrorKind::EligibilityViolation,
                          "step " + std::to_string(state.t) + ": directed cup " + std::to_string(d) + " at height " +
                              state.heights[d].str() + " below threshold for max " + g_max.str());
        }
      }
    }

    const PlayerView view{spec, state, est.get(), move->directed, move->fill.get()};
    const std::optional<std::size_t> chosen = player.choose(view);
    if (chosen && *chosen >= n) {
      throw GameError(ErrorKind::IndexOutOfRange, player.name() + " chose cup " + std::to_string(*chosen));
    }

    if (options.observer) intermediate_copy = state;

    StepRecord rec;
    rec.t = state.t;
    if (options.record == RecordLevel::Full) {
      rec.fill = move->fill;
      rec.estimates = est;
    }
    rec.discarded = move->discarded;
    rec.directed = move->directed;
    rec.chosen = chosen;
    rec.intermediate_max = g_max;

    if (chosen) {
      remove_in_place(state, *chosen, spec.removal);
      if (*chosen == argmax) {
        const Rational& rest = runner_up == n ? state.heights[argmax] : state.heights[runner_up];
        rec.post_removal_max = max_of(rest, state.heights[argmax]);
      } else {
        rec.post_removal_max = g_max;
      }
    } else {
      state.phase = Phase::PostRemoval;
      ++state.t;
      rec.post_removal_max = g_max;
    }

    if (trace.records.empty() || trace.backlog < g_max) {
      trace.backlog = g_max;
      trace.backlog_step = rec.t;
    }
    if (options.observer) options.observer(rec, intermediate_copy, state);
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace cupgame
