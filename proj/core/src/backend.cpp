#include "storygen/backend.hpp"

#include <stdexcept>

namespace storygen {

namespace {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (const char ch : text) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

std::string text_digest(std::string_view text) {
  static constexpr char kHex[] = "0123456789abcdef";
  const std::uint64_t hash = fnv1a64(text);
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kHex[(hash >> (4 * i)) & 0xf];
  }
  return out;
}

std::string request_digest(const ChatRequest& request) {
  return text_digest(request.system_text + '\x1e' + request.user_text);
}

ChatResponse Backend::complete(const ChatRequest& request) {
  if (request.role_tag.empty()) {
    throw std::invalid_argument("request has no role_tag");
  }
  if (request.user_text.empty()) {
    throw std::invalid_argument("request has no user_text");
  }
  if (request.temperature < 0.0 || request.temperature > 2.0) {
    throw std::invalid_argument("temperature must lie in [0, 2]");
  }
  if (request.max_tokens <= 0) {
    throw std::invalid_argument("max_tokens must be positive");
  }
  CallLogEntry entry;
  entry.role_tag = request.role_tag;
  entry.request_digest = request_digest(request);
  try {
    ChatResponse response = do_complete(request);
    entry.response_digest = text_digest(response.text);
    log_call(std::move(entry));
    return response;
  } catch (const std::exception& ex) {
    entry.ok = false;
    entry.error = ex.what();
    log_call(std::move(entry));
    throw;
  }
}

std::vector<CallLogEntry> Backend::call_log() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

void Backend::log_call(CallLogEntry entry) {
  std::lock_guard lock(log_mutex_);
  log_.push_back(std::move(entry));
}

}  // namespace storygen
