#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ipd/game.hpp"

namespace ipd {

// Where a freshly created agent will play.
struct AgentContext {
  std::string tournament_id;
  int phase = 0;
  int match_id = 0;
  std::string agent_id;
  std::uint64_t seed = 0;  // the agent's private random stream for this match
  double termination_probability = 0.10;
  PayoffMatrix matrix;
};

using AgentFactory = std::function<std::unique_ptr<Agent>(const AgentContext&)>;

struct StrategyInfo {
  std::string id;            // canonical name, e.g. "TitForTat"
  std::string abbreviation;  // table column, e.g. "TFT"
  bool llm = false;
  AgentFactory factory;
};

// Strategy ids and the table abbreviations used in population CSVs:
//   Alternator Alt, Bayesian Bayes, GenerousTFT GTFT, Gradual Grad,
//   GrimTrigger Grim, Prober Prob, Random Rand, SuspiciousTFT STFT,
//   TitForTat TFT, WinStayLoseShift WSLS; LLM agents register their own
//   (Gemini Gem, OpenAI OpenAI, Anthropic Anthropic by default).
class StrategyRegistry {
 public:
  // Registry preloaded with the ten classic strategies.
  static StrategyRegistry with_classics();

  void add(StrategyInfo info);

  bool contains(const std::string& id) const;
  const StrategyInfo& info(const std::string& id) const;
  // Accepts a canonical id or an abbreviation; throws ConfigError if unknown.
  std::string resolve(const std::string& name) const;

  std::unique_ptr<Agent> create(const std::string& id, const AgentContext& ctx) const;

  std::vector<std::string> ids() const;

 private:
  std::map<std::string, StrategyInfo> entries_;
};

}  // namespace ipd
