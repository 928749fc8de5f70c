#include "cupgame/adversaries.hpp"

#include <algorithm>
#include <numeric>

namespace cupgame {

namespace {

const Rational kOne(1);

Rational frac(std::int64_t p, std::int64_t q) { return Rational(p, q); }

Rational of_size(std::size_t v) { return Rational(static_cast<std::int64_t>(v)); }

SharedVec equal_split(std::size_t n, std::size_t first, std::size_t count) {
  RationalVec fill(n);
  const Rational each = kOne / of_size(count);
  for (std::size_t i = first; i < first + count; ++i) fill[i] = each;
  return share(std::move(fill));
}

}  // namespace

SharedVec directed_estimates(const CupState& intermediate, std::size_t directed, const InfoModel& info) {
  RationalVec est = intermediate.heights;
  est[directed] = info.upper_estimate(intermediate.heights[directed]);
  return share(std::move(est));
}

// ---------------------------------------------------------------- bamboo

BambooAdversary::BambooAdversary(RationalVec rates) {
  Rational sum;
  for (const auto& r : rates) {
    if (r.sign() < 0) throw GameError(ErrorKind::NegativeFill, "negative rate " + r.str());
    sum += r;
  }
  if (sum > kOne) throw GameError(ErrorKind::RateSumExceedsOne, "rates sum to " + sum.str());
  move_.discarded = kOne - sum;
  move_.fill = share(std::move(rates));
}

std::optional<AdversaryMove> BambooAdversary::next(const CupState& /*state*/) { return move_; }

// -------------------------------------------------------------- scripted

ScriptedAdversary::ScriptedAdversary(const Trace& trace) : records_(trace.records) {
  for (const auto& rec : records_) {
    if (!rec.fill) throw GameError(ErrorKind::ParseError, "script step " + std::to_string(rec.t) + " has no fill");
    check_fill(*rec.fill, trace.spec.n, rec.discarded);
  }
}

std::optional<AdversaryMove> ScriptedAdversary::next(const CupState& /*state*/) {
  if (pos_ >= records_.size()) return std::nullopt;
  const StepRecord& rec = records_[pos_++];
  return AdversaryMove{rec.fill, rec.discarded, rec.directed};
}

SharedVec ScriptedAdversary::estimates(const CupState& /*intermediate*/, const AdversaryMove& /*move*/) {
  return records_[pos_ - 1].estimates;
}

// ------------------------------------------------- multiplicative bound

MultiplicativeLowerBound::MultiplicativeLowerBound(std::size_t n, Rational c)
    : n_(n), info_(InfoModel::multiplicative(std::move(c))) {
  if (n_ < 4) throw GameError(ErrorKind::InvalidSpec, "multiplicative construction needs n >= 4");
  if (info_.c <= kOne) throw GameError(ErrorKind::InvalidSpec, "multiplicative construction needs c > 1");
  // Cup n takes 1/c, cups 1..n-1 share the rest.
  RationalVec fill(n_, (kOne - kOne / info_.c) / of_size(n_ - 1));
  fill[n_ - 1] = kOne / info_.c;
  setup_fill_ = share(std::move(fill));
}

GameSpec MultiplicativeLowerBound::spec() const {
  GameSpec s;
  s.n = n_;
  s.info = info_;
  s.tiebreak = TieBreak::AdversaryDirected;
  return s;
}

Rational MultiplicativeLowerBound::target(std::size_t n, const Rational& c) {
  Rational prod(1);
  for (std::size_t i = 1; i + 3 <= n; ++i) {
    const Rational ci = c * of_size(i);
    prod *= ci / (ci + kOne);
  }
  return of_size(n - 1) * prod;
}

void MultiplicativeLowerBound::enter_phase(const CupState& state) {
  report_.t_of_x[x_] = state.t;
  report_.h_of_x[x_] = state.heights[0];
  for (std::size_t i = 1; i < x_; ++i) {
    if (state.heights[i] != state.heights[0]) {
      report_.notes.push_back("x=" + std::to_string(x_) + ": cup " + std::to_string(i + 1) + " at " +
                              state.heights[i].str() + " differs from cup 1 at " + state.heights[0].str());
      break;
    }
  }
  phase_fill_.reset();
}

std::optional<AdversaryMove> MultiplicativeLowerBound::next(const CupState& state) {
  if (stage_ == Stage::Setup) {
    const Rational& share_each = (*setup_fill_)[0];
    ++report_.setup_steps;
    if (state.heights[0] + share_each < kOne) return AdversaryMove{setup_fill_, Rational(), n_ - 1};
    // Last setup step: top cups 1..n-1 up to exactly 1, the rest goes to cup
    // n, and the player is pointed at cup n-1.
    RationalVec fill(n_);
    Rational used;
    for (std::size_t i = 0; i + 1 < n_; ++i) {
      fill[i] = kOne - state.heights[i];
      used += fill[i];
    }
    fill[n_ - 1] = kOne - used;
    stage_ = Stage::Filling;
    x_ = n_ - 2;
    return AdversaryMove{share(std::move(fill)), Rational(), n_ - 2};
  }
  if (stage_ == Stage::Done) return std::nullopt;

  if (report_.t_of_x.empty()) enter_phase(state);
  while (x_ >= 2) {
    const Rational step = kOne / of_size(x_ - 1);
    if (state.heights[0] + step <= info_.c * state.heights[x_ - 1]) {
      if (!phase_fill_) phase_fill_ = equal_split(n_, 0, x_ - 1);
      return AdversaryMove{phase_fill_, Rational(), x_ - 1};
    }
    --x_;
    enter_phase(state);
  }
  stage_ = Stage::Done;
  return std::nullopt;
}

SharedVec MultiplicativeLowerBound::estimates(const CupState& intermediate, const AdversaryMove& move) {
  return directed_estimates(intermediate, *move.directed, info_);
}

// ------------------------------------------------------- additive bound

AdditiveLowerBound::AdditiveLowerBound(std::size_t n, Rational c)
    : n_(n), info_(InfoModel::additive(std::move(c))), x_(n) {
  if (n_ < 2) throw GameError(ErrorKind::InvalidSpec, "additive construction needs n >= 2");
  if (info_.c.sign() <= 0) throw GameError(ErrorKind::InvalidSpec, "additive construction needs c > 0");
  report_.t_of_x[n_] = 0;
  report_.h_of_x[n_] = Rational();
}

GameSpec AdditiveLowerBound::spec() const {
  GameSpec s;
  s.n = n_;
  s.info = info_;
  s.tiebreak = TieBreak::AdversaryDirected;
  return s;
}

Rational AdditiveLowerBound::target(std::size_t n, const Rational& c) {
  Rational sum;
  for (std::size_t i = 1; i < n; ++i) sum += (c + kOne) / of_size(i + 1);
  return sum;
}

std::optional<AdversaryMove> AdditiveLowerBound::next(const CupState& state) {
  if (x_ <= 1) return std::nullopt;
  const Rational& f1 = state.heights[0];
  const Rational& fx = state.heights[x_ - 1];
  const Rational step = kOne / of_size(x_ - 1);
  if (f1 + step <= fx + info_.c) {
    if (!phase_fill_ || phase_fill_x_ != x_) {
      phase_fill_ = equal_split(n_, 0, x_ - 1);
      phase_fill_x_ = x_;
    }
    return AdversaryMove{phase_fill_, Rational(), x_ - 1};
  }
  // Equalising split: a to each of cups 1..x-1, the rest to cup x, so that
  // g_1 = g_x + c after injection.
  const Rational a = (fx - f1 + kOne + info_.c) / of_size(x_);
  const Rational rest = kOne - a * of_size(x_ - 1);
  if (a.sign() < 0 || rest.sign() < 0) {
    throw GameError(ErrorKind::InfeasibleSplit, "x=" + std::to_string(x_) + " f1=" + f1.str() + " fx=" + fx.str() +
                                                    " gives share " + a.str() + ", remainder " + rest.str());
  }
  RationalVec fill(n_);
  for (std::size_t i = 0; i + 1 < x_; ++i) fill[i] = a;
  fill[x_ - 1] = rest;
  const std::size_t directed = x_ - 1;
  report_.transition_steps.push_back(state.t);
  --x_;
  report_.t_of_x[x_] = state.t;
  report_.h_of_x[x_] = f1 + a;
  return AdversaryMove{share(std::move(fill)), Rational(), directed};
}

SharedVec AdditiveLowerBound::estimates(const CupState& intermediate, const AdversaryMove& move) {
  return directed_estimates(intermediate, *move.directed, info_);
}

// ------------------------------------------------------- flushing bound

FlushingLowerBound::FlushingLowerBound(std::size_t n, Rational c, FlushingOptions options)
    : n_(n),
      c_(std::move(c)),
      info_(InfoModel::multiplicative(options.game_c ? *options.game_c : c_)),
      options_(std::move(options)) {
  if (n_ < 3) throw GameError(ErrorKind::InvalidSpec, "flushing construction needs n >= 3");
  if (c_ <= kOne) throw GameError(ErrorKind::InvalidSpec, "flushing construction needs c > 1, got " + c_.str());
  if (options_.rule == FlushingOptions::Rule::Floor && c_ >= frac(3, 2)) {
    throw GameError(ErrorKind::InvalidSpec, "the floor(k/(x+1)) rule needs c < 3/2, got " + c_.str());
  }
  if (info_.c < c_) {
    throw GameError(ErrorKind::InvalidSpec,
                    "game error " + info_.c.str() + " is below the construction ratio " + c_.str());
  }
  RationalVec fill(n_, (kOne - kOne / info_.c) / of_size(n_ - 1));
  fill[0] = kOne / info_.c;
  setup_fill_ = share(std::move(fill));
}

GameSpec FlushingLowerBound::spec() const {
  GameSpec s;
  s.n = n_;
  s.removal = RemovalModel::Flush;
  s.info = info_;
  s.tiebreak = TieBreak::AdversaryDirected;
  return s;
}

std::uint64_t FlushingLowerBound::cups_needed(std::size_t generation, const Rational& c) {
  std::uint64_t prod = 1;
  Rational power(1);
  for (std::size_t j = 0; j < generation; ++j) {
    prod *= static_cast<std::uint64_t>(power.ceil().to_int64()) + 1;
    power *= c;
  }
  return prod;
}

void FlushingLowerBound::stop(std::string reason) {
  report_.stop_reason = std::move(reason);
  stage_ = Stage::Done;
  const std::size_t reached = report_.cohorts.empty() ? 0 : report_.cohorts.back().generation;
  const auto& target = options_.target_generation;
  if (target && reached < *target) {
    throw GameError(ErrorKind::CohortExhausted, "reached generation " + std::to_string(reached) + " of " +
                                                    std::to_string(*target) + ": " + report_.stop_reason);
  }
}

std::size_t FlushingLowerBound::selection(std::size_t k, const Rational& x, const Rational& c,
                                         FlushingOptions::Rule rule) {
  if (rule == FlushingOptions::Rule::Floor) {
    return static_cast<std::size_t>((of_size(k) / (x + kOne)).floor().to_int64());
  }
  const Rational per_cup = (c - kOne) * x;
  auto fits = [&](std::size_t m) { return (per_cup * of_size(m)).ceil() <= of_size(k - m); };
  auto m = static_cast<std::size_t>((of_size(k) / (per_cup + kOne)).floor().to_int64());
  while (m > 0 && !fits(m)) --m;
  while (m + 1 <= k && fits(m + 1)) ++m;
  return m;
}

bool FlushingLowerBound::start_cohort(const CupState& state) {
  FlushingCohort cohort;
  cohort.count = cohort_.size();
  cohort.height = state.heights[cohort_.front()];
  cohort.generation = report_.cohorts.size();
  cohort.start_step = state.t;
  for (std::size_t idx : cohort_) {
    if (state.heights[idx] != cohort.height) {
      stop("cohort " + std::to_string(cohort.generation) + " has unequal heights");
      return false;
    }
  }
  report_.cohorts.push_back(cohort);
  if (options_.target_generation && cohort.generation >= *options_.target_generation) {
    stop("target generation reached");
    return false;
  }

  const std::size_t k = cohort.count;
  const Rational& x = cohort.height;
  const std::size_t m = selection(k, x, c_, options_.rule);
  if (m == 0) {
    stop("cohort of " + std::to_string(k) + " cups at height " + x.str() + " cannot be split");
    return false;
  }
  const Rational work = (c_ - kOne) * x * of_size(m);
  const auto steps_needed = static_cast<std::uint64_t>(work.ceil().to_int64());
  const std::size_t budget = k - m;
  const bool ok = budget >= steps_needed;
  report_.slack.push_back({cohort.generation, budget, steps_needed, ok});
  if (!ok) {
    stop("timing slack fails at generation " + std::to_string(cohort.generation) + ": " + std::to_string(budget) +
         " flushes for " + std::to_string(steps_needed) + " pours");
    return false;
  }
  selected_.assign(cohort_.begin(), cohort_.begin() + static_cast<std::ptrdiff_t>(m));
  flush_queue_.assign(cohort_.begin() + static_cast<std::ptrdiff_t>(m), cohort_.end());
  flush_pos_ = 0;
  goal_ = c_ * x;
  raise_fill_.reset();
  stage_ = Stage::Raising;
  return true;
}

std::optional<AdversaryMove> FlushingLowerBound::next(const CupState& state) {
  if (stage_ == Stage::Setup) {
    const Rational& share_each = (*setup_fill_)[1];
    ++report_.setup_steps;
    if (state.heights[1] + share_each < kOne) return AdversaryMove{setup_fill_, Rational(), 0};
    RationalVec fill(n_);
    Rational used;
    for (std::size_t i = 1; i < n_; ++i) {
      fill[i] = kOne - state.heights[i];
      used += fill[i];
    }
    fill[0] = kOne - used;
    cohort_.resize(n_ - 1);
    std::iota(cohort_.begin(), cohort_.end(), std::size_t{1});
    stage_ = Stage::Raising;
    selected_.clear();
    return AdversaryMove{share(std::move(fill)), Rational(), 0};
  }
  if (stage_ == Stage::Raising && selected_.empty()) {
    if (!start_cohort(state)) return std::nullopt;
  }
  if (stage_ == Stage::Done) return std::nullopt;

  const Rational deficit = goal_ - state.heights[selected_.front()];
  const std::size_t m = selected_.size();
  const Rational per = kOne / of_size(m);
  const std::size_t directed = flush_queue_[flush_pos_++];
  if (deficit > per) {
    if (!raise_fill_ || raise_fill_target_ != report_.cohorts.size()) {
      RationalVec fill(n_);
      for (std::size_t idx : selected_) fill[idx] = per;
      raise_fill_ = share(std::move(fill));
      raise_fill_target_ = report_.cohorts.size();
    }
    return AdversaryMove{raise_fill_, Rational(), directed};
  }
  // Final pour: top the selected cups up to exactly cx, spill the rest into
  // the cup about to be flushed.
  RationalVec fill(n_);
  for (std::size_t idx : selected_) fill[idx] = deficit;
  fill[directed] = kOne - deficit * of_size(m);
  cohort_ = selected_;
  selected_.clear();
  return AdversaryMove{share(std::move(fill)), Rational(), directed};
}

SharedVec FlushingLowerBound::estimates(const CupState& intermediate, const AdversaryMove& move) {
  return directed_estimates(intermediate, *move.directed, info_);
}

// ------------------------------------------------------------------ fuzz

FuzzAdversary::FuzzAdversary(GameSpec spec, std::uint64_t seed, Style style, std::int64_t grid)
    : spec_(std::move(spec)), rng_(seed), style_(style), grid_(grid) {
  spec_.validate();
  if (grid_ < 1) throw GameError(ErrorKind::InvalidSpec, "fuzz grid must be positive");
}

RationalVec FuzzAdversary::draw_fill(const CupState& state) {
  const std::size_t n = spec_.n;
  std::vector<std::int64_t> units(n, 0);
  Style style = style_;
  if (style == Style::Mixed) style = static_cast<Style>(std::uniform_int_distribution<int>(0, 2)(rng_));

  std::vector<std::size_t> pool;
  switch (style) {
    case Style::Uniform:
      pool.resize(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      break;
    case Style::Sparse: {
      const std::size_t k = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(n, 3))(rng_);
      std::uniform_int_distribution<std::size_t> any(0, n - 1);
      for (std::size_t i = 0; i < k; ++i) pool.push_back(any(rng_));
      break;
    }
    case Style::Focused:
    case Style::Mixed: {
      // Feed the tallest cups, which is what the classic lower bounds do.
      std::vector<std::size_t> order(n);
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return state.heights[b] < state.heights[a]; });
      const std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng_);
      const std::size_t skip = std::uniform_int_distribution<std::size_t>(0, 1)(rng_);
      for (std::size_t i = skip; i < std::min(n, k + skip); ++i) pool.push_back(order[i]);
      break;
    }
  }
  if (pool.empty()) pool.push_back(0);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  if (style == Style::Focused) {
    const std::int64_t each = grid_ / static_cast<std::int64_t>(pool.size());
    for (std::size_t idx : pool) units[idx] += each;
    for (std::int64_t left = grid_ - each * static_cast<std::int64_t>(pool.size()); left > 0; --left) {
      ++units[pool[pick(rng_)]];
    }
  } else {
    for (std::int64_t u = 0; u < grid_; ++u) ++units[pool[pick(rng_)]];
  }
  RationalVec fill(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (units[i] != 0) fill[i] = Rational(units[i], grid_);
  }
  return fill;
}

std::size_t FuzzAdversary::pick_directed(const CupState& intermediate) {
  const std::vector<std::size_t> eligible = eligible_set(intermediate, spec_.info);
  // Usually the lowest eligible cup, the choice that hurts the player most.
  if (std::uniform_int_distribution<int>(0, 3)(rng_) != 0) {
    std::size_t best = eligible.front();
    for (std::size_t idx : eligible) {
      if (intermediate.heights[idx] < intermediate.heights[best]) best = idx;
    }
    return best;
  }
  return eligible[std::uniform_int_distribution<std::size_t>(0, eligible.size() - 1)(rng_)];
}

std::optional<AdversaryMove> FuzzAdversary::next(const CupState& state) {
  RationalVec fill = draw_fill(state);
  AdversaryMove move;
  if (!spec_.info.is_exact()) {
    CupState intermediate = state;
    for (std::size_t i = 0; i < fill.size(); ++i) {
      if (!fill[i].is_zero()) intermediate.heights[i] += fill[i];
    }
    move.directed = pick_directed(intermediate);
  }
  move.fill = share(std::move(fill));
  return move;
}

SharedVec FuzzAdversary::estimates(const CupState& intermediate, const AdversaryMove& move) {
  if (!move.directed) return nullptr;
  return directed_estimates(intermediate, *move.directed, spec_.info);
}

}  // namespace cupgame
