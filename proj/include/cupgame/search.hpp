#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cupgame/instances.hpp"

namespace cupgame {

// Integer form of a bamboo instance: rate_i = weights[i] / denominator.
// Searches work on this form so perturbations stay exact.
struct WeightedInstance {
  std::vector<std::int64_t> weights;
  std::int64_t denominator = 1;
  std::size_t fast = 0;  // weights[0..fast) vary, the rest are the slow bamboos

  BambooInstance to_instance(const std::string& name) const;
  // Common-denominator form; fast bamboos are the ones not sharing the
  // smallest rate. Throws GameError(InvalidSpec) if the denominators do not
  // fit in 64 bits.
  static WeightedInstance from_instance(const BambooInstance& instance);
};

enum class Family { Steep2, Steep3, Custom };

const char* to_string(Family family);
Family family_from_string(const std::string& name);

struct SearchConfig {
  Family family = Family::Steep2;
  // Raw integer rate ranges of the fast bamboos; preset for Steep2/Steep3.
  std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
  std::pair<std::size_t, std::size_t> n_slow{1200, 3000};
  std::uint64_t seed = 1;
  std::uint64_t seeds = 1;  // independent searches, seeds seed .. seed+seeds-1
  std::uint64_t iterations = 0;
  double sigma = 1e-4;
  std::uint64_t horizon = 40000;
  // Perturbations act on weights rescaled to sum to at least this.
  std::int64_t grid = 10'000'000;

  // Ranges for the family presets and validation; throws GameError(ConfigError).
  void validate();
};

// Steep2: [2500, 5000] and [1250, 2500]. Steep3: [800, 2500], [1200, 2500]
// and [2500, 5000]. Slow bamboos get raw rate 1.
std::vector<std::pair<std::int64_t, std::int64_t>> family_ranges(Family family);

WeightedInstance generate_steep(const std::vector<std::pair<std::int64_t, std::int64_t>>& ranges,
                                std::size_t n_slow, std::mt19937_64& rng);
WeightedInstance generate_steep(const SearchConfig& config, std::mt19937_64& rng);

struct Evaluation {
  Rational backlog;
  std::uint64_t backlog_step = 0;
};

// Greedy with lowest-index ties on the flushing game, run for `horizon`
// steps. Uses integer heights and keeps the identical slow bamboos in
// last-cut cohorts, so a step costs O(fast) rather than O(n).
Evaluation evaluate_fast(const WeightedInstance& instance, std::uint64_t horizon);
// Same quantity through the generic exact engine.
Evaluation evaluate_exact(const BambooInstance& instance, std::uint64_t horizon);

struct Perturbation {
  std::uint64_t iteration = 0;
  std::vector<std::int64_t> delta;  // added to the fast weights
  Rational backlog;
  std::uint64_t backlog_step = 0;
};

struct SearchResult {
  std::uint64_t seed = 0;
  std::string family;
  WeightedInstance start;
  WeightedInstance best;
  Rational backlog;
  std::uint64_t backlog_step = 0;
  std::uint64_t horizon = 0;
  std::vector<Perturbation> lineage;  // accepted steps, backlogs strictly increasing
  bool horizon_too_short = false;     // best breach happens in the last tenth of the horizon

  bool counterexample() const { return Rational(2) < backlog; }
};

SearchResult hill_climb(const WeightedInstance& start, const SearchConfig& config, std::mt19937_64& rng);
SearchResult hill_climb(const BambooInstance& start, const SearchConfig& config);

// One fresh search per seed. Results are in seed order.
std::vector<SearchResult> run_search(const SearchConfig& config);

// Re-simulates the best instance with the exact engine and compares the
// backlog and its step. Throws GameError(ReplayMismatch).
bool replay_verify(const SearchResult& result);

json to_json(const SearchResult& result);
SearchResult search_result_from_json(const json& value);
void append_archive(std::ostream& out, const SearchResult& result);
std::vector<SearchResult> read_archive(std::istream& in);

json search_config_to_json(const SearchConfig& config);
SearchConfig search_config_from_json(const json& value);

}  // namespace cupgame
