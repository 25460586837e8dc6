#pragma once

#include <string>

#include "storygen/backend.hpp"

namespace storygen {

enum class WireFormat {
  OpenAi,
  Anthropic,
};

std::string to_string(WireFormat format);
WireFormat wire_format_from_string(std::string_view text);

struct HttpBackendConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  WireFormat wire_format = WireFormat::OpenAi;
  /// Environment variable consulted when api_key is empty.
  std::string api_key_env = "STORYGEN_API_KEY";
  std::string api_key;
  int max_retries = 3;
  int backoff_base_ms = 1000;
  int timeout_seconds = 120;
};

/// Chat-completion client over HTTP. Transient failures (transport errors,
/// 408, 429, 5xx) are retried max_retries times with exponential backoff
/// starting at backoff_base_ms. 401/403 raise AuthError immediately; other
/// 4xx raise TransportError without retry.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  const HttpBackendConfig& config() const { return config_; }

  /// The key actually in use: config_.api_key if set, else the value of
  /// config_.api_key_env. Empty when neither is present.
  std::string resolved_api_key() const;

 protected:
  ChatResponse do_complete(const ChatRequest& request) override;

 private:
  HttpBackendConfig config_;
};

}  // namespace storygen
