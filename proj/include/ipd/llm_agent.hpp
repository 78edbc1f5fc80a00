#pragma once

#include <memory>
#include <string>

#include "ipd/game.hpp"
#include "ipd/provider.hpp"
#include "ipd/registry.hpp"

namespace ipd {

struct LlmDecision {
  Move move = Move::C;
  std::string rationale;
  int attempts = 0;
};

// One move from a language model: prompt, call with retries, parse.
// Throws AgentFailure when retries are exhausted or the provider refuses.
LlmDecision llm_decide(ChatProvider& provider, const RetryPolicy& policy, const MatchView& view,
                       const PayoffMatrix& matrix);

class LlmAgent final : public Agent {
 public:
  LlmAgent(std::shared_ptr<ChatProvider> provider, RetryPolicy policy, PayoffMatrix matrix,
           std::string agent_id);

  Move decide(const MatchView& view) override;
  std::optional<std::string> take_rationale() override;

 private:
  std::shared_ptr<ChatProvider> provider_;
  RetryPolicy policy_;
  PayoffMatrix matrix_;
  std::string agent_id_;
  std::optional<std::string> rationale_;
};

// Registry entry for an LLM-backed strategy. The provider is shared by every
// instance of the strategy.
StrategyInfo llm_strategy(std::string id, std::string abbreviation,
                          std::shared_ptr<ChatProvider> provider, RetryPolicy policy);

}  // namespace ipd
