#include "ipd/evolution.hpp"

#include <cmath>
#include <optional>

#include "ipd/errors.hpp"

namespace ipd {

double FitnessReport::fitness(const std::string& id) const {
  auto it = strategies.find(id);
  if (it == strategies.end()) throw StrategyAbsent("no fitness recorded for '" + id + "'");
  return it->second.fitness;
}

FitnessReport compute_fitness(const PhaseLog& log) {
  FitnessReport report;
  for (const auto& totals : log.agent_totals()) {
    auto& s = report.strategies[totals.strategy];
    s.total_score += totals.score;
    s.total_moves += totals.moves;
    s.agents += 1;
  }
  if (report.strategies.empty()) throw EmptyPhase("phase has no completed matches");
  double sum = 0.0;
  for (auto& [id, s] : report.strategies) {
    s.fitness = static_cast<double>(s.total_score) / static_cast<double>(s.total_moves);
    sum += s.fitness;
  }
  report.mean_fitness = sum / static_cast<double>(report.strategies.size());
  return report;
}

FitnessReport fitness_from_values(const std::map<std::string, double>& fitness) {
  FitnessReport report;
  double sum = 0.0;
  for (const auto& [id, f] : fitness) {
    report.strategies[id].fitness = f;
    sum += f;
  }
  if (!report.strategies.empty()) report.mean_fitness = sum / static_cast<double>(fitness.size());
  return report;
}

namespace {

// Raw counts landing within this distance of a .5 boundary are treated as
// exact halves; fitness is a ratio of integers, so such ties are real.
constexpr double kHalfTolerance = 1e-9;

int round_half_away(double raw) {
  const double floor_part = std::floor(raw);
  const double frac = raw - floor_part;
  if (std::abs(frac - 0.5) <= kHalfTolerance * std::max(1.0, raw)) {
    return static_cast<int>(floor_part) + 1;
  }
  return static_cast<int>(std::llround(raw));
}

// Surviving strategy with extreme fitness; ties to the smaller id.
std::optional<std::string> pick(const std::map<std::string, int>& counts, const FitnessReport& fit,
                                bool lowest) {
  std::optional<std::string> best;
  double best_f = 0.0;
  for (const auto& [id, n] : counts) {
    if (n <= 0) continue;
    const double f = fit.fitness(id);
    if (!best || (lowest ? f < best_f : f > best_f)) {
      best = id;
      best_f = f;
    }
  }
  return best;
}

}  // namespace

Population reproduce(const Population& population, const FitnessReport& fit, int target_size) {
  if (!(fit.mean_fitness > 0.0)) throw EmptyPhase("mean fitness must be positive");
  Population next;
  int survivors = 0;
  for (const auto& [id, n] : population.counts) {
    if (n <= 0) {
      next.counts[id] = 0;
      continue;
    }
    const double relative = fit.fitness(id) / fit.mean_fitness;
    const double raw = n * relative * relative;
    const int rounded = raw < 0.5 - kHalfTolerance ? 0 : round_half_away(raw);
    next.counts[id] = rounded;
    survivors += rounded > 0 ? 1 : 0;
  }
  if (survivors == 0) throw AllExtinct("every strategy's raw offspring count fell below 0.5");

  int total = next.total();
  while (total > target_size) {
    --next.counts[*pick(next.counts, fit, true)];
    --total;
  }
  while (total < target_size) {
    ++next.counts[*pick(next.counts, fit, false)];
    ++total;
  }
  return next;
}

Population inject_mutation(const Population& population, const FitnessReport& fit,
                           const std::string& random_id) {
  if (population.count(random_id) > 0) return population;
  std::optional<std::string> donor;
  for (const auto& [id, n] : population.counts) {
    if (n <= 0 || id == random_id) continue;
    if (!donor) {
      donor = id;
      continue;
    }
    const int best_n = population.count(*donor);
    if (n > best_n || (n == best_n && fit.fitness(id) < fit.fitness(*donor))) donor = id;
  }
  if (!donor) return population;
  Population next = population;
  --next.counts[*donor];
  ++next.counts[random_id];
  return next;
}

}  // namespace ipd
