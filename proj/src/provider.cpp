#include "ipd/provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <semaphore>
#include <thread>

#include <httplib.h>

#include "ipd/prompt.hpp"

namespace ipd {

using nlohmann::json;

std::string_view to_string(ProviderKind k) noexcept {
  switch (k) {
    case ProviderKind::openai_compatible: return "openai-compatible";
    case ProviderKind::gemini_compatible: return "gemini-compatible";
    case ProviderKind::anthropic_compatible: return "anthropic-compatible";
    case ProviderKind::mock: return "mock";
  }
  return "mock";
}

ProviderKind parse_provider_kind(std::string_view text) {
  for (auto k : {ProviderKind::openai_compatible, ProviderKind::gemini_compatible,
                 ProviderKind::anthropic_compatible, ProviderKind::mock}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown provider '" + std::string(text) + "'");
}

void ProviderConfig::validate() const {
  if (temperature && (*temperature < 0.0 || *temperature > 2.0)) {
    throw ConfigError("temperature must lie in [0, 2]");
  }
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (max_inflight < 1) throw ConfigError("max_inflight must be >= 1");
  if (request_timeout <= 0.0) throw ConfigError("request_timeout must be positive");
  if (provider == ProviderKind::mock) {
    if (mock_fixture.empty()) throw ConfigError("mock provider needs a mock_fixture path");
  } else {
    if (model_name.empty()) throw ConfigError("model_name is required");
    if (api_key_env.empty()) throw ConfigError("api_key_env is required");
  }
}

void to_json(json& j, const ProviderConfig& c) {
  j = json{{"provider", to_string(c.provider)},
           {"model_name", c.model_name},
           {"api_key_env", c.api_key_env},
           {"base_url", c.base_url},
           {"request_timeout", c.request_timeout},
           {"max_retries", c.max_retries},
           {"max_inflight", c.max_inflight},
           {"max_tokens", c.max_tokens},
           {"backoff_initial", c.backoff_initial},
           {"backoff_max", c.backoff_max},
           {"mock_fixture", c.mock_fixture}};
  j["temperature"] = c.temperature ? json(*c.temperature) : json(nullptr);
}

void from_json(const json& j, ProviderConfig& c) {
  c = ProviderConfig{};
  c.provider = parse_provider_kind(j.at("provider").get<std::string>());
  c.model_name = j.value("model_name", c.model_name);
  if (j.contains("temperature") && !j.at("temperature").is_null()) {
    c.temperature = j.at("temperature").get<double>();
  }
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.base_url = j.value("base_url", c.base_url);
  c.request_timeout = j.value("request_timeout", c.request_timeout);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.max_inflight = j.value("max_inflight", c.max_inflight);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.backoff_initial = j.value("backoff_initial", c.backoff_initial);
  c.backoff_max = j.value("backoff_max", c.backoff_max);
  c.mock_fixture = j.value("mock_fixture", c.mock_fixture);
}

// ---- retry ---------------------------------------------------------------

RetryPolicy RetryPolicy::from(const ProviderConfig& config) {
  RetryPolicy p;
  p.max_retries = config.max_retries;
  p.initial_delay = std::chrono::milliseconds(static_cast<long>(config.backoff_initial * 1000.0));
  p.max_delay = std::chrono::milliseconds(static_cast<long>(config.backoff_max * 1000.0));
  return p;
}

std::chrono::milliseconds RetryPolicy::delay_before(int retry) const {
  if (retry <= 0) return std::chrono::milliseconds{0};
  const int shift = std::min(retry - 1, 30);
  const long long scaled = initial_delay.count() * (1LL << shift);
  return std::chrono::milliseconds(std::min<long long>(scaled, max_delay.count()));
}

namespace detail {
void retry_sleep(const RetryPolicy& policy, int retry) {
  const auto d = policy.delay_before(retry);
  if (policy.sleep) {
    policy.sleep(d);
  } else if (d.count() > 0) {
    std::this_thread::sleep_for(d);
  }
}
}  // namespace detail

// ---- mock ----------------------------------------------------------------

struct MockProvider::State {
  json script;
  std::size_t next = 0;
  int calls = 0;
  std::mutex mutex;
};

MockProvider::MockProvider(json script) : state_(std::make_shared<State>()) {
  if (script.is_array()) script = json{{"responses", std::move(script)}};
  if (!script.is_object() || (!script.contains("responses") && !script.contains("rule"))) {
    throw ConfigError("mock script needs \"responses\" or \"rule\"");
  }
  state_->script = std::move(script);
}

std::shared_ptr<MockProvider> MockProvider::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock fixture '" + path + "'");
  try {
    return std::make_shared<MockProvider>(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("mock fixture '" + path + "': " + e.what());
  }
}

std::shared_ptr<MockProvider> MockProvider::scripted(std::vector<json> replies, bool cycle) {
  return std::make_shared<MockProvider>(json{{"responses", json(std::move(replies))}, {"cycle", cycle}});
}

int MockProvider::calls() const {
  std::lock_guard lock(state_->mutex);
  return state_->calls;
}

namespace {

[[noreturn]] void raise_scripted(const std::string& kind) {
  if (kind == "transport") throw TransportError("scripted transport failure");
  if (kind == "rate_limit") throw RateLimited("scripted rate limit");
  if (kind == "auth") throw AuthError("scripted auth failure");
  throw ProviderError("scripted provider error");
}

}  // namespace

std::string MockProvider::complete(const std::string& prompt) {
  std::lock_guard lock(state_->mutex);
  ++state_->calls;
  const json& script = state_->script;
  if (script.contains("rule")) {
    const std::string rule = script["rule"].get<std::string>();
    if (rule == "always_cooperate") return "Mutual cooperation maximizes the joint score.\nC";
    if (rule == "always_defect") return "Defection is never worse for me this round.\nD";
    if (rule == "tit_for_tat") {
      const auto last = last_opponent_move_in_prompt(prompt);
      if (!last) return "No history yet, so I open with trust.\nC";
      return std::string("I mirror my opponent's previous move.\n") + to_char(*last);
    }
    throw ConfigError("unknown mock rule '" + rule + "'");
  }
  const json& replies = script["responses"];
  if (replies.empty()) throw ProviderError("mock script has no responses");
  if (state_->next >= replies.size()) {
    if (!script.value("cycle", false)) throw ProviderError("mock script exhausted");
    state_->next = 0;
  }
  const json& reply = replies[state_->next++];
  if (reply.is_object()) raise_scripted(reply.value("error", "provider"));
  return reply.get<std::string>();
}

// ---- HTTP providers -------------------------------------------------------

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: '" + url + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint e;
  e.origin = url.substr(0, path_start);
  e.prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

std::string default_base_url(ProviderKind k) {
  switch (k) {
    case ProviderKind::openai_compatible: return "https://api.openai.com/v1";
    case ProviderKind::gemini_compatible: return "https://generativelanguage.googleapis.com/v1beta";
    case ProviderKind::anthropic_compatible: return "https://api.anthropic.com/v1";
    case ProviderKind::mock: break;
  }
  return "";
}

class HttpProvider : public ChatProvider {
 public:
  explicit HttpProvider(ProviderConfig config)
      : config_(std::move(config)),
        endpoint_(split_url(config_.base_url.empty() ? default_base_url(config_.provider)
                                                     : config_.base_url)),
        inflight_(config_.max_inflight) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key) {
      throw AuthError("environment variable " + config_.api_key_env + " is not set");
    }
    api_key_ = key;
  }

  std::string complete(const std::string& prompt) override {
    inflight_.acquire();
    struct Release {
      std::counting_semaphore<1024>& s;
      ~Release() { s.release(); }
    } release{inflight_};

    httplib::Client client(endpoint_.origin);
    const auto timeout = std::chrono::duration<double>(config_.request_timeout);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    httplib::Headers headers;
    std::string path;
    json body = request_body(prompt, headers, path);
    auto res = client.Post(endpoint_.prefix + path, headers, body.dump(), "application/json");
    if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
    check_status(res->status, res->body);
    json reply;
    try {
      reply = json::parse(res->body);
    } catch (const json::exception& e) {
      throw TransportError(std::string("unparseable response body: ") + e.what());
    }
    return extract_text(reply);
  }

 protected:
  virtual json request_body(const std::string& prompt, httplib::Headers& headers,
                            std::string& path) const = 0;
  virtual std::string extract_text(const json& reply) const = 0;

  const ProviderConfig& config() const { return config_; }
  const std::string& api_key() const { return api_key_; }

 private:
  static void check_status(int status, const std::string& body) {
    if (status >= 200 && status < 300) return;
    const std::string detail = "HTTP " + std::to_string(status) + ": " + body.substr(0, 200);
    if (status == 401 || status == 403) throw AuthError(detail);
    if (status == 429) throw RateLimited(detail);
    if (status >= 500 || status == 408) throw TransportError(detail);
    throw ProviderError(detail);
  }

  ProviderConfig config_;
  Endpoint endpoint_;
  std::string api_key_;
  std::counting_semaphore<1024> inflight_;
};

class OpenAiProvider final : public HttpProvider {
 public:
  using HttpProvider::HttpProvider;

 protected:
  json request_body(const std::string& prompt, httplib::Headers& headers,
                    std::string& path) const override {
    path = "/chat/completions";
    headers.emplace("Authorization", "Bearer " + api_key());
    json body{{"model", config().model_name},
              {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    if (config().temperature) body["temperature"] = *config().temperature;
    return body;
  }
  std::string extract_text(const json& reply) const override {
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw MalformedResponse("chat completion reply has no message content");
    }
  }
};

class AnthropicProvider final : public HttpProvider {
 public:
  using HttpProvider::HttpProvider;

 protected:
  json request_body(const std::string& prompt, httplib::Headers& headers,
                    std::string& path) const override {
    path = "/messages";
    headers.emplace("x-api-key", api_key());
    headers.emplace("anthropic-version", "2023-06-01");
    json body{{"model", config().model_name},
              {"max_tokens", config().max_tokens},
              {"messages", json::array({{{"role", "user"}, {"content", prompt}}})}};
    if (config().temperature) body["temperature"] = *config().temperature;
    return body;
  }
  std::string extract_text(const json& reply) const override {
    std::string text;
    if (reply.contains("content") && reply["content"].is_array()) {
      for (const auto& part : reply["content"]) {
        if (part.value("type", "") == "text") text += part.value("text", "");
      }
    }
    if (text.empty()) throw MalformedResponse("messages reply has no text content");
    return text;
  }
};

class GeminiProvider final : public HttpProvider {
 public:
  using HttpProvider::HttpProvider;

 protected:
  json request_body(const std::string& prompt, httplib::Headers& headers,
                    std::string& path) const override {
    path = "/models/" + config().model_name + ":generateContent";
    headers.emplace("x-goog-api-key", api_key());
    json body{{"contents", json::array({{{"role", "user"},
                                         {"parts", json::array({{{"text", prompt}}})}}})}};
    if (config().temperature) body["generationConfig"] = {{"temperature", *config().temperature}};
    return body;
  }
  std::string extract_text(const json& reply) const override {
    std::string text;
    try {
      for (const auto& part : reply.at("candidates").at(0).at("content").at("parts")) {
        text += part.value("text", "");
      }
    } catch (const json::exception&) {
      throw MalformedResponse("generateContent reply has no candidate text");
    }
    if (text.empty()) throw MalformedResponse("generateContent reply has no candidate text");
    return text;
  }
};

}  // namespace

std::shared_ptr<ChatProvider> make_provider(const ProviderConfig& config) {
  config.validate();
  switch (config.provider) {
    case ProviderKind::mock: return MockProvider::from_file(config.mock_fixture);
    case ProviderKind::openai_compatible: return std::make_shared<OpenAiProvider>(config);
    case ProviderKind::anthropic_compatible: return std::make_shared<AnthropicProvider>(config);
    case ProviderKind::gemini_compatible: return std::make_shared<GeminiProvider>(config);
  }
  throw ConfigError("unknown provider");
}

}  // namespace ipd
