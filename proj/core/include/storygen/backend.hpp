#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

/// One chat-completion request. role_tag names the calling agent
/// ("starter", "reader_sim", ...) and is what the scripted backend and the
/// call log key on.
struct ChatRequest {
  std::string role_tag;
  std::string system_text;
  std::string user_text;
  double temperature = 0.7;
  int max_tokens = 2048;
};

struct ChatResponse {
  std::string text;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  std::int64_t latency_ms = 0;
};

struct CallLogEntry {
  std::string role_tag;
  std::string request_digest;
  std::string response_digest;
  bool ok = true;
  std::string error;  // set when ok == false
};

/// FNV-1a 64-bit hash of the text, rendered as 16 lowercase hex digits.
std::string text_digest(std::string_view text);

/// Digest of a request's text: text_digest(system_text + '\x1e' + user_text).
std::string request_digest(const ChatRequest& request);

/// Uniform chat-completion abstraction all agents run over. complete() is a
/// template method: it validates the request, dispatches to the concrete
/// backend, and records one call-log entry per invocation, failures included.
/// Instances tolerate concurrent callers.
class Backend {
 public:
  virtual ~Backend() = default;

  Backend() = default;
  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  ChatResponse complete(const ChatRequest& request);

  /// Snapshot of all complete() invocations, in call order.
  std::vector<CallLogEntry> call_log() const;

 protected:
  virtual ChatResponse do_complete(const ChatRequest& request) = 0;

 private:
  void log_call(CallLogEntry entry);

  mutable std::mutex log_mutex_;
  std::vector<CallLogEntry> log_;
};

}  // namespace storygen
