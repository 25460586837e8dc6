#include "storygen/http_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "storygen/errors.hpp"

namespace storygen {

std::string to_string(WireFormat format) {
  return format == WireFormat::OpenAi ? "openai" : "anthropic";
}

WireFormat wire_format_from_string(std::string_view text) {
  if (text == "openai") return WireFormat::OpenAi;
  if (text == "anthropic") return WireFormat::Anthropic;
  throw FormatError("unknown wire format: " + std::string(text));
}

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint has no scheme: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    return {endpoint, "/"};
  }
  return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

nlohmann::json build_body(const HttpBackendConfig& config,
                          const ChatRequest& request) {
  if (config.wire_format == WireFormat::OpenAi) {
    return {{"model", config.model},
            {"messages",
             {{{"role", "system"}, {"content", request.system_text}},
              {{"role", "user"}, {"content", request.user_text}}}},
            {"temperature", request.temperature},
            {"max_tokens", request.max_tokens}};
  }
  return {{"model", config.model},
          {"system", request.system_text},
          {"messages", {{{"role", "user"}, {"content", request.user_text}}}},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

ChatResponse parse_body(const HttpBackendConfig& config,
                        const std::string& body) {
  auto parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded()) {
    throw ParseError("response body is not JSON", body);
  }

  ChatResponse response;
  try {
    if (config.wire_format == WireFormat::OpenAi) {
      response.text = parsed.at("choices").at(0).at("message").at("content")
                          .get<std::string>();
      if (parsed.contains("usage")) {
        const auto& usage = parsed["usage"];
        response.prompt_tokens = usage.value("prompt_tokens", 0ull);
        response.completion_tokens = usage.value("completion_tokens", 0ull);
      }
    } else {
      response.text =
          parsed.at("content").at(0).at("text").get<std::string>();
      if (parsed.contains("usage")) {
        const auto& usage = parsed["usage"];
        response.prompt_tokens = usage.value("input_tokens", 0ull);
        response.completion_tokens = usage.value("output_tokens", 0ull);
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("unexpected response shape: ") + ex.what(),
                     body);
  }
  return response;
}

bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config)
    : config_(std::move(config)) {}

std::string HttpBackend::resolved_api_key() const {
  if (!config_.api_key.empty()) {
    return config_.api_key;
  }
  if (const char* env = std::getenv(config_.api_key_env.c_str())) {
    return env;
  }
  return {};
}

ChatResponse HttpBackend::do_complete(const ChatRequest& request) {
  const auto key = resolved_api_key();
  if (key.empty()) {
    throw AuthError("no API key: set " + config_.api_key_env +
                    " or configure one explicitly");
  }

  const auto url = split_url(config_.endpoint);
  const auto body = build_body(config_, request).dump();

  httplib::Headers headers;
  if (config_.wire_format == WireFormat::OpenAi) {
    headers.emplace("Authorization", "Bearer " + key);
  } else {
    headers.emplace("x-api-key", key);
    headers.emplace("anthropic-version", "2023-06-01");
  }

  std::string last_error;
  const auto start = std::chrono::steady_clock::now();
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(
          static_cast<long long>(config_.backoff_base_ms) << (attempt - 1)));
    }

    httplib::Client client(url.base);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);

    const auto result =
        client.Post(url.path, headers, body, "application/json");
    if (!result) {
      last_error = "transport failure: " + httplib::to_string(result.error());
      continue;
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
      throw AuthError("credential rejected with HTTP " +
                      std::to_string(status));
    }
    if (status >= 200 && status < 300) {
      auto response = parse_body(config_, result->body);
      response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::steady_clock::now() - start)
                                .count();
      return response;
    }
    if (!retryable_status(status)) {
      throw TransportError("HTTP " + std::to_string(status) + ": " +
                           result->body);
    }
    last_error = "HTTP " + std::to_string(status);
  }
  throw TransportError("gave up after " +
                       std::to_string(config_.max_retries + 1) +
                       " attempts; last error: " + last_error);
}

}  // namespace storygen
