#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipd/engine.hpp"
#include "ipd/evolution.hpp"
#include "ipd/provider.hpp"
#include "ipd/registry.hpp"

namespace ipd {

struct LlmAgentConfig {
  std::string id;            // e.g. "Gemini"
  std::string abbreviation;  // e.g. "Gem"; defaults to id
  ProviderConfig provider;
};

// Config file schema (JSON):
//   tournament_id            string
//   condition                string, label used when grouping rationales (default: tournament_id)
//   roster                   {strategy id or abbreviation: initial count}
//   termination_probability  number in (0, 1)
//   phases                   integer >= 1 (default 5)
//   target_size              integer (default: sum of roster counts; must equal it)
//   master_seed              unsigned integer
//   mutation                 bool, re-inject Random when it dies out (default false)
//   hard_cap, history_window integers (default 30, 20)
//   payoffs                  {"R":3,"S":0,"T":5,"P":1}
//   llm_agents               [{"id","abbreviation","provider":{ProviderConfig}}]
//   output_dir               directory for logs (optional)
//   workers                  concurrent matches per phase (default 1)
struct TournamentConfig {
  std::string tournament_id = "tournament";
  std::string condition;
  std::map<std::string, int> roster;
  double termination_probability = 0.10;
  int phases = 5;
  int target_size = 0;
  std::uint64_t master_seed = 0;
  bool mutation = false;
  int hard_cap = 30;
  int history_window = 20;
  PayoffMatrix matrix;
  std::vector<LlmAgentConfig> llm_agents;
  std::string output_dir;
  unsigned workers = 1;

  MatchConfig match_config() const;
  // Strategy universe: roster strategies plus Random under mutation.
  std::vector<std::string> universe() const;
  Population initial_population() const;
  std::string label() const { return condition.empty() ? tournament_id : condition; }
  // Checks invariants and resolves roster names against the registry.
  void validate(const StrategyRegistry& registry);
};

void to_json(nlohmann::json& j, const TournamentConfig& c);
void from_json(const nlohmann::json& j, TournamentConfig& c);
TournamentConfig load_config(const std::string& path);

// Classic strategies plus one entry per configured LLM agent. Creating the
// registry opens provider clients, so API keys must be resolvable.
StrategyRegistry build_registry(const TournamentConfig& config);

struct RationaleRecord {
  std::int64_t rationale_id = 0;
  std::string tournament_id;
  std::string condition;
  int phase = 0;
  int match_id = 0;
  int round_idx = 0;  // 1-based
  std::string agent_id;
  std::string strategy;
  std::string provider;
  std::string model;
  std::string text;
  Move chosen_move = Move::C;

  bool operator==(const RationaleRecord&) const = default;
};

struct TournamentLog {
  TournamentConfig config;
  std::string prompt_hash;
  std::map<std::string, std::string> abbreviations;  // strategy id -> table column
  std::vector<PhaseLog> phases;
  std::vector<Population> populations;  // population that played each phase
  std::vector<FitnessReport> fitness;   // one per completed phase
  std::vector<RationaleRecord> rationales;
};

// Pulls rationale text out of a freshly played phase, assigning ids in
// (match_id, round, seat a then b) order starting at next_id.
std::vector<RationaleRecord> collect_rationales(PhaseLog& phase, const TournamentConfig& config,
                                                std::int64_t next_id);

struct RunOptions {
  bool resume = false;
  // Stop (leaving a checkpoint) once this many phases are complete.
  std::optional<int> stop_after_phase;
  std::function<void(const PhaseLog&, const FitnessReport&)> on_phase;
};

// Plays the configured phases: round robin, fitness, reproduction (and
// mutation if enabled) between phases. With an output_dir, all CSVs and a
// checkpoint are rewritten after every phase; resume continues from it and
// yields the same files as an uninterrupted run.
TournamentLog run_tournament(TournamentConfig config, const StrategyRegistry& registry,
                             const RunOptions& options = {});

}  // namespace ipd
