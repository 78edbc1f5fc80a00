#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ipd/engine.hpp"
#include "ipd/population.hpp"

namespace ipd {

// Previous-round outcome from the deciding agent's seat: first letter is its
// own move, second the opponent's.
enum class PriorState { CC = 0, DC = 1, CD = 2, DD = 3 };

inline constexpr std::array<PriorState, 4> kPriorStates = {PriorState::CC, PriorState::DC,
                                                           PriorState::CD, PriorState::DD};

std::string_view to_string(PriorState s) noexcept;
PriorState prior_state(Move own, Move opponent) noexcept;

struct Fingerprint {
  std::array<long long, 4> counts{};        // times the state was encountered
  std::array<long long, 4> cooperations{};  // times the agent then played C

  // P(C | state); nullopt when the state never occurred.
  std::optional<double> probability(PriorState s) const;
  long long count(PriorState s) const { return counts[static_cast<std::size_t>(s)]; }
};

// Pools every decision from round 2 onward by any agent of `strategy`.
// Throws StrategyAbsent if the strategy never played.
Fingerprint fingerprint(const std::vector<PhaseLog>& phases, const std::string& strategy);

// Fraction of the strategy's moves that were C.
double cooperation_rate(const std::vector<PhaseLog>& phases, const std::string& strategy);

// Points earned per move.
double score_per_move(const std::vector<PhaseLog>& phases, const std::string& strategy);

struct HeadToHead {
  long long matches = 0;
  double avg_score_per_match = 0.0;  // points to `a` per match
  double cooperation_rate = 0.0;     // a's C moves over a's moves in these matches
};

// All matches between any agent of `a` and any agent of `b`. When a == b both
// seats count as `a`. Throws PairingAbsent if they never met.
HeadToHead head_to_head(const std::vector<PhaseLog>& phases, const std::string& a,
                        const std::string& b);

// Euclidean distance between count vectors over a shared universe; throws
// MismatchedUniverse if the key sets differ.
double population_distance(const Population& from, const Population& to);

struct InstabilityScore {
  std::vector<double> transitions;
  double mean = 0.0;
};

InstabilityScore instability(const std::vector<Population>& populations);

}  // namespace ipd
