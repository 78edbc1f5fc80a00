#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ipd/game.hpp"
#include "ipd/population.hpp"
#include "ipd/registry.hpp"

namespace ipd {

struct PhaseOptions {
  std::string tournament_id;
  int phase = 1;
  MatchConfig match;  // match.rng_seed is ignored; per-match seeds derive from master_seed
  PayoffMatrix matrix;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
};

struct AbortedMatch {
  int match_id = 0;
  std::string agent_a_id;
  std::string agent_b_id;
  std::string strategy_a;
  std::string strategy_b;
  std::string reason;

  bool operator==(const AbortedMatch&) const = default;
};

struct AgentTotals {
  std::string agent_id;
  std::string strategy;
  long long score = 0;
  long long moves = 0;
  long long cooperations = 0;
};

struct PhaseLog {
  int phase = 0;
  Population population;
  std::vector<MatchRecord> matches;  // sorted by match_id
  std::vector<AbortedMatch> aborted;  // sorted by match_id

  // Per-agent sums over completed matches only.
  std::vector<AgentTotals> agent_totals() const;

  bool operator==(const PhaseLog&) const = default;
};

constexpr std::size_t round_robin_match_count(std::size_t agents) noexcept {
  return agents < 2 ? 0 : agents * (agents - 1) / 2;
}

// Seeds for one match: termination draws, then each seat's private stream.
std::uint64_t termination_seed(std::uint64_t master, int phase, int match_id) noexcept;
std::uint64_t agent_seed(std::uint64_t master, int phase, int match_id, int seat) noexcept;

// Every unordered pair of distinct agent instances plays one match. Matches
// are numbered in (i, j) lexicographic order over expand(population) and may
// run on several workers; the result is identical to a sequential run.
// A match whose agent raises AgentFailure is recorded in `aborted` and
// excluded from `matches`.
PhaseLog run_phase(const Population& population, const PhaseOptions& options,
                   const StrategyRegistry& registry);

}  // namespace ipd
