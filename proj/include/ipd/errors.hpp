#pragma once

#include <stdexcept>
#include <string>

namespace ipd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An agent could not produce a move (LLM retries exhausted, provider rejected
// the request). The match it occurred in is aborted and never scored.
class AgentFailure : public Error {
 public:
  AgentFailure(std::string agent_id, const std::string& what, int attempts = 0)
      : Error(agent_id.empty() ? what : agent_id + ": " + what),
        agent_id_(std::move(agent_id)),
        attempts_(attempts) {}

  const std::string& agent_id() const noexcept { return agent_id_; }
  int attempts() const noexcept { return attempts_; }

 private:
  std::string agent_id_;
  int attempts_;
};

// Provider errors. TransportError and RateLimited are retryable, AuthError
// and ProviderError are not.
class ProviderError : public Error {
 public:
  using Error::Error;
};
class TransportError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};
class RateLimited : public ProviderError {
 public:
  using ProviderError::ProviderError;
};
class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyPhase : public Error {
 public:
  using Error::Error;
};
class AllExtinct : public Error {
 public:
  using Error::Error;
};
class DegenerateBelief : public Error {
 public:
  using Error::Error;
};

class StrategyAbsent : public Error {
 public:
  using Error::Error;
};
class PairingAbsent : public Error {
 public:
  using Error::Error;
};
class MismatchedUniverse : public Error {
 public:
  using Error::Error;
};

class NoOverlap : public Error {
 public:
  using Error::Error;
};
class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};
class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace ipd
