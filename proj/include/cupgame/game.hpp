#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cupgame/rational.hpp"

namespace cupgame {

enum class ErrorKind {
  FillSumMismatch,
  NegativeFill,
  LengthMismatch,
  IndexOutOfRange,
  PhaseMismatch,
  EligibilityViolation,
  EstimateOutOfBounds,
  InvalidSpec,
  RateSumExceedsOne,
  InfeasibleSplit,
  CohortExhausted,
  ParseError,
  QuadratureNonConvergence,
  UnknownBound,
  ReplayMismatch,
  ConfigError,
};

const char* to_string(ErrorKind kind);

class GameError : public std::runtime_error {
 public:
  GameError(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

using RationalVec = std::vector<Rational>;
using SharedVec = std::shared_ptr<const RationalVec>;

inline SharedVec share(RationalVec v) { return std::make_shared<const RationalVec>(std::move(v)); }

enum class RemovalModel { Unit, Flush };
enum class TieBreak { LowestIndex, AdversaryDirected };

struct InfoModel {
  enum class Kind { Exact, Multiplicative, Additive };

  Kind kind = Kind::Exact;
  Rational c;  // unused for Exact

  static InfoModel exact() { return {}; }
  static InfoModel multiplicative(Rational c) { return {Kind::Multiplicative, std::move(c)}; }
  static InfoModel additive(Rational c) { return {Kind::Additive, std::move(c)}; }
  bool is_exact() const { return kind == Kind::Exact; }

  // Largest estimate the adversary may report for true height `g`.
  Rational upper_estimate(const Rational& g) const;
  // Smallest true height whose upper estimate still reaches `g_max`.
  Rational eligibility_threshold(const Rational& g_max) const;
};

struct GameSpec {
  std::size_t n = 1;
  RemovalModel removal = RemovalModel::Unit;
  std::optional<RationalVec> fixed_rates;  // nullopt: variable-rate game
  InfoModel info;
  TieBreak tiebreak = TieBreak::LowestIndex;

  // Throws GameError(InvalidSpec / RateSumExceedsOne).
  void validate() const;
};

enum class Phase { PostRemoval, PostInjection };

struct CupState {
  RationalVec heights;
  std::uint64_t t = 0;  // completed steps
  Phase phase = Phase::PostRemoval;

  static CupState initial(std::size_t n);
  std::size_t size() const { return heights.size(); }
  Rational max() const;
  Rational total() const;
};

// One step as seen after the fact. `t` is the time index at which the
// adversary moved: the first injection happens at t = 0.
struct StepRecord {
  std::uint64_t t = 0;
  SharedVec fill;  // null when the run recorded summaries only
  Rational discarded;
  SharedVec estimates;
  std::optional<std::size_t> directed;
  std::optional<std::size_t> chosen;
  Rational intermediate_max;
  Rational post_removal_max;
};

struct Trace {
  GameSpec spec;
  std::vector<StepRecord> records;
  Rational backlog;
  std::uint64_t backlog_step = 0;  // first step attaining the backlog
};

// Pure state transitions. `discarded` is the part of the unit the adversary
// does not place; it must be zero except in fixed-rate games whose rates sum
// below one.
CupState inject(const CupState& state, std::span<const Rational> fill, const Rational& discarded = Rational());
CupState remove(const CupState& state, std::size_t cup, const GameSpec& spec);

void inject_in_place(CupState& state, std::span<const Rational> fill, const Rational& discarded = Rational());
// Returns the amount of water removed.
Rational remove_in_place(CupState& state, std::size_t cup, RemovalModel removal);

// Validates a fill vector without applying it.
void check_fill(std::span<const Rational> fill, std::size_t n, const Rational& discarded = Rational());

struct PrefixAverages {
  std::vector<std::size_t> order;  // descending height, ties by lowest index
  RationalVec means;               // means[m-1] = mean of the m largest heights
};

PrefixAverages prefix_averages(const CupState& state);
PrefixAverages prefix_averages(std::span<const Rational> heights);

// Cups an adversary-chosen estimate can make greedy select.
std::vector<std::size_t> eligible_set(const CupState& state, const InfoModel& info);
bool is_eligible(const Rational& height, const Rational& g_max, const InfoModel& info);

struct AdversaryMove {
  SharedVec fill;
  Rational discarded;
  std::optional<std::size_t> directed;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  // Called with the post-removal state; nullopt ends the game.
  virtual std::optional<AdversaryMove> next(const CupState& state) = 0;
  // Called with the post-injection state in semi-oblivious games.
  virtual SharedVec estimates(const CupState& intermediate, const AdversaryMove& move);
  virtual std::string name() const = 0;
};

struct PlayerView {
  const GameSpec& spec;
  const CupState& state;        // post-injection
  const RationalVec* estimates;  // null in exact-information games
  std::optional<std::size_t> directed;
  const RationalVec* last_fill;
};

class Player {
 public:
  virtual ~Player() = default;
  // nullopt is a no-op turn.
  virtual std::optional<std::size_t> choose(const PlayerView& view) = 0;
  virtual std::string name() const = 0;
};

enum class RecordLevel { Full, Summary };

struct RunOptions {
  RecordLevel record = RecordLevel::Full;
  // Invoked after every step with the post-injection and post-removal states.
  std::function<void(const StepRecord&, const CupState& intermediate, const CupState& after)> observer;
};

Trace run_game(const GameSpec& spec, Adversary& adversary, Player& player, std::uint64_t steps,
               const RunOptions& options = {});

}  // namespace cupgame
