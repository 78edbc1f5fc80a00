#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ipd/errors.hpp"

namespace ipd {

enum class ProviderKind { openai_compatible, gemini_compatible, anthropic_compatible, mock };

std::string_view to_string(ProviderKind k) noexcept;
ProviderKind parse_provider_kind(std::string_view text);

struct ProviderConfig {
  ProviderKind provider = ProviderKind::mock;
  std::string model_name;
  std::optional<double> temperature;  // unset: provider default
  std::string api_key_env;
  std::string base_url;  // empty: the provider's public endpoint
  double request_timeout = 60.0;  // seconds
  int max_retries = 3;
  int max_inflight = 4;
  int max_tokens = 1024;
  double backoff_initial = 0.5;  // seconds; doubles per retry
  double backoff_max = 30.0;
  std::string mock_fixture;  // path to the mock provider's script

  void validate() const;
};

void to_json(nlohmann::json& j, const ProviderConfig& c);
void from_json(const nlohmann::json& j, ProviderConfig& c);

// Transport for a single-turn text completion. Implementations are
// thread-safe and cap their own concurrency at max_inflight.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  // Throws TransportError / RateLimited (retryable), AuthError, ProviderError.
  virtual std::string complete(const std::string& prompt) = 0;
};

std::shared_ptr<ChatProvider> make_provider(const ProviderConfig& config);

// Scripted provider. A script is either a list of replies consumed in order
// (entries may be {"error": "transport"|"rate_limit"|"auth"|"provider"}) or a
// rule answering from the prompt itself:
//   {"responses": [...], "cycle": true}
//   {"rule": "tit_for_tat" | "always_cooperate" | "always_defect"}
class MockProvider final : public ChatProvider {
 public:
  explicit MockProvider(nlohmann::json script);
  static std::shared_ptr<MockProvider> from_file(const std::string& path);
  static std::shared_ptr<MockProvider> scripted(std::vector<nlohmann::json> replies, bool cycle = false);

  std::string complete(const std::string& prompt) override;
  int calls() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_delay{500};
  std::chrono::milliseconds max_delay{30000};
  // Replaced in tests to avoid real sleeps.
  std::function<void(std::chrono::milliseconds)> sleep;

  static RetryPolicy from(const ProviderConfig& config);
  std::chrono::milliseconds delay_before(int retry) const;
};

// Calls the provider and parses the reply, retrying retryable provider errors
// and MalformedResponse up to policy.max_retries times. AuthError and
// ProviderError are not retried. Exhaustion or a non-retryable failure
// surfaces as AgentFailure. `attempts_out` receives the number of calls made.
template <class Parse>
auto call_with_retry(ChatProvider& provider, const std::string& prompt, const RetryPolicy& policy,
                     Parse&& parse, int* attempts_out = nullptr) -> decltype(parse(std::string{}));

namespace detail {
void retry_sleep(const RetryPolicy& policy, int retry);
}

template <class Parse>
auto call_with_retry(ChatProvider& provider, const std::string& prompt, const RetryPolicy& policy,
                     Parse&& parse, int* attempts_out) -> decltype(parse(std::string{})) {
  std::string last_error;
  for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
    if (attempts_out) *attempts_out = attempt + 1;
    if (attempt > 0) detail::retry_sleep(policy, attempt);
    try {
      return parse(provider.complete(prompt));
    } catch (const AuthError& e) {
      throw AgentFailure("", std::string("authentication failed: ") + e.what(), attempt + 1);
    } catch (const TransportError& e) {
      last_error = e.what();
    } catch (const RateLimited& e) {
      last_error = e.what();
    } catch (const MalformedResponse& e) {
      last_error = e.what();
    } catch (const ProviderError& e) {
      throw AgentFailure("", std::string("provider rejected request: ") + e.what(), attempt + 1);
    }
  }
  throw AgentFailure("",
                     "gave up after " + std::to_string(policy.max_retries + 1) +
                         " attempts: " + last_error,
                     policy.max_retries + 1);
}

}  // namespace ipd
