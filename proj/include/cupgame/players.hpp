#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "cupgame/game.hpp"

namespace cupgame {

struct RateEstimate {
  enum class Source { DeclaredFixed, LastFill };

  RationalVec rates;
  Source source = Source::DeclaredFixed;
};

// Argmax of `estimates` when given, else of `heights`. Ties go to the lowest
// index, or to `directed` under TieBreak::AdversaryDirected when the directed
// cup attains the maximum.
std::size_t greedy_select(std::span<const Rational> heights, const RationalVec* estimates = nullptr,
                          TieBreak tiebreak = TieBreak::LowestIndex,
                          std::optional<std::size_t> directed = std::nullopt);

// Among cups with height >= 1, the one that reaches height 2 soonest at its
// rate; zero-rate cups never reach it. nullopt when no cup has height >= 1.
std::optional<std::size_t> deadline_select(std::span<const Rational> heights, const RateEstimate& rates);

// Deadline-driven while the fullest cup is below 2, greedy from 2 upward. A
// deadline no-op falls through to greedy.
std::size_t hybrid_select(std::span<const Rational> heights, const RateEstimate& rates,
                          const RationalVec* estimates = nullptr, TieBreak tiebreak = TieBreak::LowestIndex,
                          std::optional<std::size_t> directed = std::nullopt);

// Declared rates in fixed-rate games, otherwise the fill just injected.
RateEstimate rates_for(const PlayerView& view);

class GreedyPlayer final : public Player {
 public:
  std::optional<std::size_t> choose(const PlayerView& view) override;
  std::string name() const override { return "greedy"; }
};

class DeadlinePlayer final : public Player {
 public:
  std::optional<std::size_t> choose(const PlayerView& view) override;
  std::string name() const override { return "deadline"; }
};

class HybridPlayer final : public Player {
 public:
  std::optional<std::size_t> choose(const PlayerView& view) override;
  std::string name() const override { return "hybrid"; }
};

// "greedy", "deadline" or "hybrid"; throws GameError(ConfigError) otherwise.
std::unique_ptr<Player> make_player(const std::string& name);

}  // namespace cupgame
