#include "ipd/engine.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <variant>

#include "ipd/errors.hpp"
#include "ipd/rng.hpp"

namespace ipd {

std::vector<AgentTotals> PhaseLog::agent_totals() const {
  std::map<std::string, AgentTotals> by_agent;
  auto add = [&](const std::string& agent, const std::string& strategy, Move m, int pts) {
    auto& t = by_agent[agent];
    t.agent_id = agent;
    t.strategy = strategy;
    t.score += pts;
    t.moves += 1;
    t.cooperations += (m == Move::C) ? 1 : 0;
  };
  for (const auto& match : matches) {
    for (const auto& r : match.rounds) {
      add(match.agent_a_id, match.strategy_a, r.move_a, r.payoff_a);
      add(match.agent_b_id, match.strategy_b, r.move_b, r.payoff_b);
    }
  }
  std::vector<AgentTotals> out;
  out.reserve(by_agent.size());
  for (auto& [id, t] : by_agent) out.push_back(std::move(t));
  return out;
}

std::uint64_t termination_seed(std::uint64_t master, int phase, int match_id) noexcept {
  return derive_seed(master, {static_cast<std::uint64_t>(phase),
                              static_cast<std::uint64_t>(match_id), 0});
}

std::uint64_t agent_seed(std::uint64_t master, int phase, int match_id, int seat) noexcept {
  return derive_seed(master, {static_cast<std::uint64_t>(phase),
                              static_cast<std::uint64_t>(match_id),
                              static_cast<std::uint64_t>(seat)});
}

namespace {

struct Pairing {
  int match_id;
  const AgentSlot* a;
  const AgentSlot* b;
};

using MatchResult = std::variant<MatchRecord, AbortedMatch>;

MatchResult play_pairing(const Pairing& pairing, const PhaseOptions& options,
                         const StrategyRegistry& registry) {
  AgentContext ctx;
  ctx.tournament_id = options.tournament_id;
  ctx.phase = options.phase;
  ctx.match_id = pairing.match_id;
  ctx.termination_probability = options.match.termination_probability;
  ctx.matrix = options.matrix;

  ctx.agent_id = pairing.a->id();
  ctx.seed = agent_seed(options.master_seed, options.phase, pairing.match_id, 1);
  auto agent_a = registry.create(pairing.a->strategy, ctx);
  ctx.agent_id = pairing.b->id();
  ctx.seed = agent_seed(options.master_seed, options.phase, pairing.match_id, 2);
  auto agent_b = registry.create(pairing.b->strategy, ctx);

  MatchConfig cfg = options.match;
  cfg.rng_seed = termination_seed(options.master_seed, options.phase, pairing.match_id);
  try {
    MatchRecord record = play_match(*agent_a, *agent_b, cfg, options.matrix);
    record.phase = options.phase;
    record.match_id = pairing.match_id;
    record.agent_a_id = pairing.a->id();
    record.agent_b_id = pairing.b->id();
    record.strategy_a = pairing.a->strategy;
    record.strategy_b = pairing.b->strategy;
    return record;
  } catch (const AgentFailure& failure) {
    return AbortedMatch{pairing.match_id, pairing.a->id(), pairing.b->id(),
                        pairing.a->strategy, pairing.b->strategy, failure.what()};
  }
}

}  // namespace

PhaseLog run_phase(const Population& population, const PhaseOptions& options,
                   const StrategyRegistry& registry) {
  options.match.validate();
  const std::vector<AgentSlot> slots = expand(population);
  if (slots.size() < 2) throw EmptyPhase("a phase needs at least two agents");

  std::vector<Pairing> pairings;
  pairings.reserve(round_robin_match_count(slots.size()));
  for (std::size_t i = 0; i < slots.size(); ++i) {
    for (std::size_t j = i + 1; j < slots.size(); ++j) {
      pairings.push_back({static_cast<int>(pairings.size()), &slots[i], &slots[j]});
    }
  }

  std::vector<std::optional<MatchResult>> results(pairings.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= pairings.size()) return;
      try {
        results[k] = play_pairing(pairings[k], options, registry);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error) {
          first_error = std::make_exception_ptr(
              Error("phase " + std::to_string(options.phase) + " match " +
                    std::to_string(pairings[k].match_id) + " (" + pairings[k].a->id() +
                    " vs " + pairings[k].b->id() + "): " + e.what()));
        }
        next.store(pairings.size());
        return;
      }
    }
  };

  const unsigned n_workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(pairings.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  PhaseLog log;
  log.phase = options.phase;
  log.population = population;
  for (auto& result : results) {
    if (auto* record = std::get_if<MatchRecord>(&*result)) {
      log.matches.push_back(std::move(*record));
    } else {
      log.aborted.push_back(std::get<AbortedMatch>(std::move(*result)));
    }
  }
  return log;
}

}  // namespace ipd
