#pragma once

#include <map>
#include <string>

#include "ipd/engine.hpp"
#include "ipd/population.hpp"

namespace ipd {

struct StrategyFitness {
  long long total_score = 0;  // S
  long long total_moves = 0;  // M
  double fitness = 0.0;       // S / M, points per move
  int agents = 0;
};

struct FitnessReport {
  std::map<std::string, StrategyFitness> strategies;
  double mean_fitness = 0.0;  // unweighted over strategies present

  std::size_t unique_strategies() const noexcept { return strategies.size(); }
  double fitness(const std::string& id) const;
};

// Average score per move for every strategy that played, from completed
// matches only. Throws EmptyPhase if nothing was played.
FitnessReport compute_fitness(const PhaseLog& log);

// Builds a report directly from per-strategy fitness values (mean is the
// unweighted average over the map).
FitnessReport fitness_from_values(const std::map<std::string, double>& fitness);

// Next-phase counts: raw = N (F / mean)^2, rounded half away from zero (raw
// below 0.5 goes extinct), then trimmed from the lowest-fitness surviving
// strategy or padded onto the highest-fitness one until the total equals
// target_size. Fitness ties go to the lexicographically smaller id.
// Throws AllExtinct when nothing survives rounding.
Population reproduce(const Population& population, const FitnessReport& fitness, int target_size);

// Mutation regime: when Random has died out, one agent of the most populous
// strategy (ties: lower fitness, then smaller id) becomes a Random agent.
Population inject_mutation(const Population& population, const FitnessReport& fitness,
                           const std::string& random_id = "Random");

}  // namespace ipd
