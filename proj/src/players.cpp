#include "cupgame/players.hpp"

namespace cupgame {

std::size_t greedy_select(std::span<const Rational> heights, const RationalVec* estimates, TieBreak tiebreak,
                          std::optional<std::size_t> directed) {
  const std::span<const Rational> v = estimates ? std::span<const Rational>(*estimates) : heights;
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[best] < v[i]) best = i;
  }
  if (tiebreak == TieBreak::AdversaryDirected && directed && *directed < v.size() && v[*directed] == v[best]) {
    return *directed;
  }
  return best;
}

std::optional<std::size_t> deadline_select(std::span<const Rational> heights, const RateEstimate& rates) {
  if (rates.rates.size() != heights.size()) {
    throw GameError(ErrorKind::LengthMismatch, "rate estimate length does not match cup count");
  }
  static const Rational kOne(1);
  static const Rational kTwo(2);
  std::optional<std::size_t> best;
  std::optional<Rational> best_deadline;  // nullopt = infinite
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (heights[i] < kOne) continue;
    const Rational& r = rates.rates[i];
    if (r.sign() <= 0) {
      if (!best) best = i;
      continue;
    }
    Rational deadline = (kTwo - heights[i]) / r;
    if (!best_deadline || deadline < *best_deadline) {
      best = i;
      best_deadline = std::move(deadline);
    }
  }
  return best;
}

std::size_t hybrid_select(std::span<const Rational> heights, const RateEstimate& rates, const RationalVec* estimates,
                          TieBreak tiebreak, std::optional<std::size_t> directed) {
  const std::span<const Rational> v = estimates ? std::span<const Rational>(*estimates) : heights;
  Rational top;
  for (const auto& h : v) {
    if (top < h) top = h;
  }
  if (top < Rational(2)) {
    if (auto pick = deadline_select(v, rates)) return *pick;
  }
  return greedy_select(heights, estimates, tiebreak, directed);
}

RateEstimate rates_for(const PlayerView& view) {
  if (view.spec.fixed_rates) return {*view.spec.fixed_rates, RateEstimate::Source::DeclaredFixed};
  if (view.last_fill) return {*view.last_fill, RateEstimate::Source::LastFill};
  return {RationalVec(view.state.size()), RateEstimate::Source::LastFill};
}

std::optional<std::size_t> GreedyPlayer::choose(const PlayerView& view) {
  return greedy_select(view.state.heights, view.estimates, view.spec.tiebreak, view.directed);
}

std::optional<std::size_t> DeadlinePlayer::choose(const PlayerView& view) {
  const RationalVec& v = view.estimates ? *view.estimates : view.state.heights;
  return deadline_select(v, rates_for(view));
}

std::optional<std::size_t> HybridPlayer::choose(const PlayerView& view) {
  return hybrid_select(view.state.heights, rates_for(view), view.estimates, view.spec.tiebreak, view.directed);
}

std::unique_ptr<Player> make_player(const std::string& name) {
  if (name == "greedy") return std::make_unique<GreedyPlayer>();
  if (name == "deadline") return std::make_unique<DeadlinePlayer>();
  if (name == "hybrid") return std::make_unique<HybridPlayer>();
  throw GameError(ErrorKind::ConfigError, "unknown player '" + name + "'");
}

}  // namespace cupgame
