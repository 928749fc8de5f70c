#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cupgame/game.hpp"
#include "cupgame/json_io.hpp"

namespace cupgame {

// Observable events. Every kind reads the intermediate (post-growth) heights.
//   Backlog     trace.backlog == value, first attained at `step`
//   Attain      intermediate max == value at `step`
//   Height      cup `cup` stands at `value` at `step`
//   Cut         the player cuts `cup` at `step`
//   LastCut     last cut of `cup` before the backlog step is at `step`
//   Exceeds     first step at which some cup with index >= `cup` is above `value`
//   CountAbove  exactly `count` cups with index >= `cup` are above `value`
enum class EventKind { Backlog, Attain, Height, Cut, LastCut, Exceeds, CountAbove };

const char* to_string(EventKind kind);

struct TimelineEvent {
  std::uint64_t step = 0;
  EventKind kind = EventKind::Backlog;
  std::size_t cup = 0;
  Rational value;
  std::uint64_t count = 0;  // CountAbove only
};

struct BambooInstance {
  std::string name;
  RationalVec rates;
  Rational epsilon;
  std::optional<Rational> expected_backlog;
  std::optional<std::uint64_t> expected_backlog_step;
  std::vector<TimelineEvent> timeline;

  std::size_t size() const { return rates.size(); }
  // Flushing, exact information, lowest-index ties.
  GameSpec spec() const;
  // Throws GameError(NegativeFill / RateSumExceedsOne / InvalidSpec).
  void validate() const;
};

BambooInstance warmup_instance();
BambooInstance main_instance();
const std::vector<std::string>& instance_names();
// "warmup" or "main"; throws GameError(ConfigError) otherwise.
BambooInstance bundled_instance(const std::string& name);

// Step indices are soft: an event passes if it holds within this many steps
// of the stated one. The backlog value is the only hard assertion.
inline constexpr std::uint64_t kStepTolerance = 3;

struct EventResult {
  TimelineEvent event;
  bool hard = false;
  bool passed = false;
  bool exact_step = false;  // held at exactly the stated step
  std::optional<std::uint64_t> observed_step;
  std::string detail;
};

struct TimelineReport {
  std::vector<EventResult> events;
  std::size_t hard_failures = 0;
  std::size_t soft_failures = 0;
  bool ok() const { return hard_failures == 0; }
};

// `trace` must be a full-record greedy trace on `instance`.
TimelineReport check_timeline(const Trace& trace, const BambooInstance& instance);

struct GrowthReport {
  std::uint64_t cells_checked = 0;
  std::uint64_t violations = 0;
  std::optional<std::uint64_t> first_violation_step;
  bool ok() const { return violations == 0; }
};

// Each intermediate height equals rate * (steps since the cup was last cut).
GrowthReport check_growth_identity(const Trace& trace, const BambooInstance& instance);

json to_json(const BambooInstance& instance);
BambooInstance instance_from_json(const json& value);
void write_instance_file(const std::string& path, const BambooInstance& instance);
BambooInstance read_instance_file(const std::string& path);

// A run configuration for the command line tool that plays `player` on the
// instance for `steps` steps.
json run_config_json(const BambooInstance& instance, const std::string& player, std::uint64_t steps);

}  // namespace cupgame
