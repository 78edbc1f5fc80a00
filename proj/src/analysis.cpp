#include "ipd/analysis.hpp"

#include <cmath>

#include "ipd/errors.hpp"

namespace ipd {

std::string_view to_string(PriorState s) noexcept {
  switch (s) {
    case PriorState::CC: return "CC";
    case PriorState::DC: return "DC";
    case PriorState::CD: return "CD";
    case PriorState::DD: return "DD";
  }
  return "??";
}

PriorState prior_state(Move own, Move opponent) noexcept {
  if (own == Move::C) return opponent == Move::C ? PriorState::CC : PriorState::CD;
  return opponent == Move::C ? PriorState::DC : PriorState::DD;
}

std::optional<double> Fingerprint::probability(PriorState s) const {
  const auto i = static_cast<std::size_t>(s);
  if (counts[i] == 0) return std::nullopt;
  return static_cast<double>(cooperations[i]) / static_cast<double>(counts[i]);
}

namespace {

// Calls fn(own_moves_accessor...) for every seat occupied by `strategy`.
template <class Fn>
bool for_each_seat(const std::vector<PhaseLog>& phases, const std::string& strategy, Fn&& fn) {
  bool found = false;
  for (const auto& phase : phases) {
    for (const auto& match : phase.matches) {
      if (match.strategy_a == strategy) {
        found = true;
        fn(match, true);
      }
      if (match.strategy_b == strategy) {
        found = true;
        fn(match, false);
      }
    }
  }
  return found;
}

struct SeatTotals {
  long long moves = 0;
  long long cooperations = 0;
  long long score = 0;
};

SeatTotals totals_for(const std::vector<PhaseLog>& phases, const std::string& strategy) {
  SeatTotals t;
  const bool found = for_each_seat(phases, strategy, [&](const MatchRecord& m, bool seat_a) {
    for (const auto& r : m.rounds) {
      const Move mv = seat_a ? r.move_a : r.move_b;
      t.moves += 1;
      t.cooperations += mv == Move::C ? 1 : 0;
      t.score += seat_a ? r.payoff_a : r.payoff_b;
    }
  });
  if (!found || t.moves == 0) throw StrategyAbsent("strategy '" + strategy + "' never played");
  return t;
}

}  // namespace

Fingerprint fingerprint(const std::vector<PhaseLog>& phases, const std::string& strategy) {
  Fingerprint fp;
  const bool found = for_each_seat(phases, strategy, [&](const MatchRecord& m, bool seat_a) {
    for (std::size_t k = 1; k < m.rounds.size(); ++k) {
      const auto& prev = m.rounds[k - 1];
      const auto& now = m.rounds[k];
      const PriorState s = seat_a ? prior_state(prev.move_a, prev.move_b)
                                  : prior_state(prev.move_b, prev.move_a);
      const Move decided = seat_a ? now.move_a : now.move_b;
      const auto i = static_cast<std::size_t>(s);
      fp.counts[i] += 1;
      fp.cooperations[i] += decided == Move::C ? 1 : 0;
    }
  });
  if (!found) throw StrategyAbsent("strategy '" + strategy + "' never played");
  return fp;
}

double cooperation_rate(const std::vector<PhaseLog>& phases, const std::string& strategy) {
  const SeatTotals t = totals_for(phases, strategy);
  return static_cast<double>(t.cooperations) / static_cast<double>(t.moves);
}

double score_per_move(const std::vector<PhaseLog>& phases, const std::string& strategy) {
  const SeatTotals t = totals_for(phases, strategy);
  return static_cast<double>(t.score) / static_cast<double>(t.moves);
}

HeadToHead head_to_head(const std::vector<PhaseLog>& phases, const std::string& a,
                        const std::string& b) {
  long long matches = 0;
  long long seats = 0;
  long long score = 0;
  long long moves = 0;
  long long cooperations = 0;
  auto take_seat = [&](const MatchRecord& m, bool seat_a) {
    ++seats;
    for (const auto& r : m.rounds) {
      ++moves;
      cooperations += (seat_a ? r.move_a : r.move_b) == Move::C ? 1 : 0;
      score += seat_a ? r.payoff_a : r.payoff_b;
    }
  };
  for (const auto& phase : phases) {
    for (const auto& m : phase.matches) {
      const bool a_first = m.strategy_a == a && m.strategy_b == b;
      const bool a_second = m.strategy_b == a && m.strategy_a == b;
      if (!a_first && !a_second) continue;
      ++matches;
      if (a_first) take_seat(m, true);
      if (a_second) take_seat(m, false);
    }
  }
  if (matches == 0) throw PairingAbsent("no matches between '" + a + "' and '" + b + "'");
  HeadToHead h;
  h.matches = matches;
  h.avg_score_per_match = static_cast<double>(score) / static_cast<double>(seats);
  h.cooperation_rate = moves ? static_cast<double>(cooperations) / static_cast<double>(moves) : 0.0;
  return h;
}

double population_distance(const Population& from, const Population& to) {
  if (from.counts.size() != to.counts.size()) {
    throw MismatchedUniverse("populations cover different strategy sets");
  }
  double sum = 0.0;
  auto it = to.counts.begin();
  for (const auto& [id, n] : from.counts) {
    if (it->first != id) throw MismatchedUniverse("strategy '" + id + "' missing from population");
    const double d = static_cast<double>(it->second - n);
    sum += d * d;
    ++it;
  }
  return std::sqrt(sum);
}

InstabilityScore instability(const std::vector<Population>& populations) {
  if (populations.size() < 2) throw Error("instability needs at least two phases");
  InstabilityScore score;
  double sum = 0.0;
  for (std::size_t t = 1; t < populations.size(); ++t) {
    score.transitions.push_back(population_distance(populations[t - 1], populations[t]));
    sum += score.transitions.back();
  }
  score.mean = sum / static_cast<double>(score.transitions.size());
  return score;
}

}  // namespace ipd
