#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cupgame/game.hpp"

namespace cupgame {

// Estimates that make `directed` the argmax of the estimate vector: the
// directed cup reports its largest legal estimate, every other cup its true
// height. Valid whenever `directed` is eligible.
SharedVec directed_estimates(const CupState& intermediate, std::size_t directed, const InfoModel& info);

// Constant fill equal to the rate vector; any residual below one is discarded.
class BambooAdversary final : public Adversary {
 public:
  explicit BambooAdversary(RationalVec rates);
  std::optional<AdversaryMove> next(const CupState& state) override;
  std::string name() const override { return "bamboo"; }

 private:
  AdversaryMove move_;
};

// Replays recorded fills, estimates and directions verbatim.
class ScriptedAdversary final : public Adversary {
 public:
  explicit ScriptedAdversary(const Trace& trace);
  std::optional<AdversaryMove> next(const CupState& state) override;
  SharedVec estimates(const CupState& intermediate, const AdversaryMove& move) override;
  std::string name() const override { return "scripted"; }

 private:
  std::vector<StepRecord> records_;
  std::size_t pos_ = 0;
};

struct MultiplicativeReport {
  std::uint64_t setup_steps = 0;
  std::map<std::size_t, std::uint64_t> t_of_x;  // x -> step at which the active count became x
  std::map<std::size_t, Rational> h_of_x;       // x -> common height of cups 1..x at t(x)
  std::vector<std::string> notes;               // equal-height assertion failures, if any
};

// Three-step construction against greedy with multiplicative error c. Cup
// numbering in comments is 1-based as in the construction; cup j is index j-1.
class MultiplicativeLowerBound final : public Adversary {
 public:
  MultiplicativeLowerBound(std::size_t n, Rational c);
  std::optional<AdversaryMove> next(const CupState& state) override;
  SharedVec estimates(const CupState& intermediate, const AdversaryMove& move) override;
  std::string name() const override { return "multiplicative_lb"; }

  GameSpec spec() const;
  const MultiplicativeReport& report() const { return report_; }
  // (n-1) * prod_{i=1}^{n-3} ci/(ci+1)
  static Rational target(std::size_t n, const Rational& c);

 private:
  void enter_phase(const CupState& state);

  std::size_t n_;
  InfoModel info_;
  enum class Stage { Setup, Filling, Done } stage_ = Stage::Setup;
  std::size_t x_ = 0;
  SharedVec setup_fill_;
  SharedVec phase_fill_;
  MultiplicativeReport report_;
};

struct AdditiveReport {
  std::map<std::size_t, std::uint64_t> t_of_x;
  std::map<std::size_t, Rational> h_of_x;  // g_1 right after the count drops to x
  std::vector<std::uint64_t> transition_steps;
};

class AdditiveLowerBound final : public Adversary {
 public:
  AdditiveLowerBound(std::size_t n, Rational c);
  std::optional<AdversaryMove> next(const CupState& state) override;
  SharedVec estimates(const CupState& intermediate, const AdversaryMove& move) override;
  std::string name() const override { return "additive_lb"; }

  GameSpec spec() const;
  const AdditiveReport& report() const { return report_; }
  // sum_{i=1}^{n-1} (c+1)/(i+1)
  static Rational target(std::size_t n, const Rational& c);

 private:
  std::size_t n_;
  InfoModel info_;
  std::size_t x_;
  SharedVec phase_fill_;
  std::size_t phase_fill_x_ = 0;
  AdditiveReport report_;
};

struct FlushingCohort {
  std::size_t count = 0;
  Rational height;
  std::size_t generation = 0;
  std::uint64_t start_step = 0;
};

struct FlushingReport {
  std::uint64_t setup_steps = 0;
  std::vector<FlushingCohort> cohorts;  // generation order
  struct Slack {
    std::size_t generation;
    std::size_t flush_budget;     // k - m
    std::uint64_t steps_needed;   // ceil((c-1) x m)
    bool ok;
  };
  std::vector<Slack> slack;
  std::string stop_reason;
};

struct FlushingOptions {
  // Raise CohortExhausted if the recursion dies before this generation.
  std::optional<std::size_t> target_generation;
  // Error bound of the game itself; defaults to the construction ratio and
  // must be at least that large.
  std::optional<Rational> game_c;
  // Floor: select floor(k/(x+1)) cups, valid for 1 < c < 3/2. Balanced:
  // select the most cups whose raise still fits in the flush budget, which
  // keeps the construction feasible for any ratio up to the game's c.
  enum class Rule { Floor, Balanced } rule = Rule::Floor;
};

// Cohort construction for the flushing game: k cups at height x become m cups
// at height cx while the player flushes the other k - m. Cup 0 is the setup
// sink.
class FlushingLowerBound final : public Adversary {
 public:
  FlushingLowerBound(std::size_t n, Rational c, FlushingOptions options = {});
  std::optional<AdversaryMove> next(const CupState& state) override;
  SharedVec estimates(const CupState& intermediate, const AdversaryMove& move) override;
  std::string name() const override { return "flushing_lb"; }

  GameSpec spec() const;
  const FlushingReport& report() const { return report_; }
  // prod_{j=0}^{i-1} (ceil(c^j) + 1)
  static std::uint64_t cups_needed(std::size_t generation, const Rational& c);
  // Cohort size selected from k cups at height x under `rule`.
  static std::size_t selection(std::size_t k, const Rational& x, const Rational& c, FlushingOptions::Rule rule);

 private:
  bool start_cohort(const CupState& state);
  void stop(std::string reason);

  std::size_t n_;
  Rational c_;
  InfoModel info_;
  FlushingOptions options_;
  enum class Stage { Setup, Raising, Done } stage_ = Stage::Setup;
  SharedVec setup_fill_;
  std::vector<std::size_t> cohort_;    // current cohort members
  std::vector<std::size_t> selected_;  // being raised
  std::vector<std::size_t> flush_queue_;
  std::size_t flush_pos_ = 0;
  Rational goal_;
  SharedVec raise_fill_;
  std::size_t raise_fill_target_ = 0;
  FlushingReport report_;
};

// Randomised adversary for property checks. Fills live on a fixed grid of
// denominator `grid` so heights stay small rationals.
class FuzzAdversary final : public Adversary {
 public:
  enum class Style { Uniform, Sparse, Focused, Mixed };

  FuzzAdversary(GameSpec spec, std::uint64_t seed, Style style = Style::Mixed, std::int64_t grid = 360);
  std::optional<AdversaryMove> next(const CupState& state) override;
  SharedVec estimates(const CupState& intermediate, const AdversaryMove& move) override;
  std::string name() const override { return "fuzz"; }

 private:
  RationalVec draw_fill(const CupState& state);
  std::size_t pick_directed(const CupState& intermediate);

  GameSpec spec_;
  std::mt19937_64 rng_;
  Style style_;
  std::int64_t grid_;
};

}  // namespace cupgame
