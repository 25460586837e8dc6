#include "storygen/scripted_backend.hpp"

#include "json_io.hpp"
#include "serialize.hpp"
#include "storygen/errors.hpp"
#include "storygen/story.hpp"

namespace storygen {

std::vector<ScriptEntry> load_script(const std::filesystem::path& file) {
  const auto parsed = detail::read_json_file(file);
  if (!parsed.is_array()) {
    throw FormatError("script must be a JSON array: " + file.string());
  }
  std::vector<ScriptEntry> script;
  script.reserve(parsed.size());
  for (const auto& item : parsed) {
    script.push_back({detail::require(item, "role_tag").get<std::string>(),
                      detail::require(item, "response").get<std::string>()});
  }
  return script;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptEntry> script)
    : script_(std::move(script)), consumed_(script_.size(), false) {}

ScriptedBackend::ScriptedBackend(std::initializer_list<ScriptEntry> script)
    : ScriptedBackend(std::vector<ScriptEntry>(script)) {}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& file) {
  return ScriptedBackend(load_script(file));
}

std::vector<ChatRequest> ScriptedBackend::captured_requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::map<std::string, int> ScriptedBackend::consumed_counts() const {
  std::lock_guard lock(mutex_);
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < script_.size(); ++i) {
    if (consumed_[i]) {
      ++counts[script_[i].role_tag];
    }
  }
  return counts;
}

void ScriptedBackend::fast_forward(
    const std::map<std::string, int>& consumed_per_tag) {
  std::lock_guard lock(mutex_);
  for (const auto& [tag, count] : consumed_per_tag) {
    int skipped = 0;
    for (std::size_t i = 0; i < script_.size() && skipped < count; ++i) {
      if (!consumed_[i] && script_[i].role_tag == tag) {
        consumed_[i] = true;
        ++skipped;
      }
    }
    if (skipped < count) {
      throw ScriptExhausted("script too short to fast-forward '" + tag +
                            "' past " + std::to_string(count) + " entries");
    }
  }
}

int ScriptedBackend::remaining(std::string_view role_tag) const {
  std::lock_guard lock(mutex_);
  int count = 0;
  for (std::size_t i = 0; i < script_.size(); ++i) {
    if (!consumed_[i] && script_[i].role_tag == role_tag) {
      ++count;
    }
  }
  return count;
}

ChatResponse ScriptedBackend::do_complete(const ChatRequest& request) {
  std::lock_guard lock(mutex_);
  requests_.push_back(request);
  for (std::size_t i = 0; i < script_.size(); ++i) {
    if (!consumed_[i] && script_[i].role_tag == request.role_tag) {
      consumed_[i] = true;
      ChatResponse response;
      response.text = script_[i].response;
      response.completion_tokens = count_words(script_[i].response);
      return response;
    }
  }
  throw ScriptExhausted("no scripted response left for role_tag '" +
                        request.role_tag + "'");
}

}  // namespace storygen
