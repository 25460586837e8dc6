#pragma once

#include <stdexcept>
#include <string>

namespace storygen {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Network failure or non-auth HTTP error, after retries were exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// Credential rejected (HTTP 401/403) or no credential available.
class AuthError : public Error {
 public:
  using Error::Error;
};

/// The scripted backend has no unconsumed entry for the requested role tag.
/// Signals a mismatch between a test script and the call sequence.
class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

/// A backend response could not be parsed into the expected structure.
/// Keeps the raw response so callers can inspect what came back.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw_response)
      : Error(what), raw_response_(std::move(raw_response)) {}

  const std::string& raw_response() const noexcept { return raw_response_; }

 private:
  std::string raw_response_;
};

class AlreadyInitialized : public Error {
 public:
  using Error::Error;
};

/// The context budget cannot fit even the round-0 anchor entries.
class BudgetTooSmall : public Error {
 public:
  using Error::Error;
};

class EmptyOutline : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized data (graph files, script files, persisted state).
class FormatError : public Error {
 public:
  using Error::Error;
};

class CorruptCheckpoint : public Error {
 public:
  using Error::Error;
};

class ScoreParseError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

/// Too many consecutive rounds added zero words; the run was aborted.
class PipelineStalled : public Error {
 public:
  using Error::Error;
};

}  // namespace storygen
