#include "ipd/llm_agent.hpp"

#include "ipd/prompt.hpp"

namespace ipd {

LlmDecision llm_decide(ChatProvider& provider, const RetryPolicy& policy, const MatchView& view,
                       const PayoffMatrix& matrix) {
  LlmDecision decision;
  const std::string prompt = build_prompt(view, matrix);
  const ParsedResponse parsed =
      call_with_retry(provider, prompt, policy, parse_response, &decision.attempts);
  decision.move = parsed.move;
  decision.rationale = parsed.rationale;
  return decision;
}

LlmAgent::LlmAgent(std::shared_ptr<ChatProvider> provider, RetryPolicy policy, PayoffMatrix matrix,
                   std::string agent_id)
    : provider_(std::move(provider)),
      policy_(std::move(policy)),
      matrix_(matrix),
      agent_id_(std::move(agent_id)) {}

Move LlmAgent::decide(const MatchView& view) {
  try {
    LlmDecision d = llm_decide(*provider_, policy_, view, matrix_);
    rationale_ = std::move(d.rationale);
    return d.move;
  } catch (const AgentFailure& f) {
    throw AgentFailure(agent_id_, f.what(), f.attempts());
  }
}

std::optional<std::string> LlmAgent::take_rationale() {
  std::optional<std::string> out = std::move(rationale_);
  rationale_.reset();
  return out;
}

StrategyInfo llm_strategy(std::string id, std::string abbreviation,
                          std::shared_ptr<ChatProvider> provider, RetryPolicy policy) {
  StrategyInfo info;
  info.id = std::move(id);
  info.abbreviation = std::move(abbreviation);
  info.llm = true;
  info.factory = [provider = std::move(provider), policy = std::move(policy)](const AgentContext& ctx) {
    return std::make_unique<LlmAgent>(provider, policy, ctx.matrix, ctx.agent_id);
  };
  return info;
}

}  // namespace ipd
