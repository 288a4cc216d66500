#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace vlprobe {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (bad argument, bad shape).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Data failed a consistency, integrity or semantic check.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A probe or placement request cannot be realized geometrically.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A generative backend failed. Carries the inpaint-plan step when known.
class BackendError : public Error {
 public:
  explicit BackendError(const std::string& what, std::optional<int> step = std::nullopt,
                        std::string code = "backend_error")
      : Error(step ? what + " (step " + std::to_string(*step) + ")" : what),
        step_(step),
        code_(std::move(code)) {}

  std::optional<int> step() const { return step_; }
  const std::string& code() const { return code_; }

 private:
  std::optional<int> step_;
  std::string code_;
};

/// Transport-level failure (connection refused, timeout). Retryable.
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace vlprobe
