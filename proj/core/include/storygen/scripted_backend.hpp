#pragma once

#include <filesystem>
#include <initializer_list>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "storygen/backend.hpp"

namespace storygen {

struct ScriptEntry {
  std::string role_tag;
  std::string response;
};

/// Loads a JSON array of {"role_tag": ..., "response": ...} objects.
/// Throws FormatError on malformed input.
std::vector<ScriptEntry> load_script(const std::filesystem::path& file);

/// Deterministic mock backend. Entries are matched by role_tag and consumed
/// FIFO per tag, so prompt-template edits never break a test script. Replaying
/// the same request sequence against the same script yields the same response
/// sequence. Cursor updates are atomic with respect to concurrent callers.
class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::vector<ScriptEntry> script);
  ScriptedBackend(std::initializer_list<ScriptEntry> script);

  /// Convenience wrapper over load_script. Backends are pinned to their
  /// address (the call log mutex), so the result must be constructed in
  /// place; this relies on guaranteed copy elision.
  static ScriptedBackend from_file(const std::filesystem::path& file);

  /// Every request seen so far, in call order. Lets tests inspect the exact
  /// prompts the agents built.
  std::vector<ChatRequest> captured_requests() const;

  /// Consumed-entry count per role_tag.
  std::map<std::string, int> consumed_counts() const;

  /// Marks the first `count` unconsumed entries of each tag as consumed
  /// without logging calls. Used when resuming a checkpointed run so the
  /// remaining script lines up with the remaining call sequence. Throws
  /// ScriptExhausted if the script is shorter than the recorded history.
  void fast_forward(const std::map<std::string, int>& consumed_per_tag);

  int remaining(std::string_view role_tag) const;

 protected:
  ChatResponse do_complete(const ChatRequest& request) override;

 private:
  mutable std::mutex mutex_;
  std::vector<ScriptEntry> script_;
  std::vector<bool> consumed_;
  std::vector<ChatRequest> requests_;
};

}  // namespace storygen
