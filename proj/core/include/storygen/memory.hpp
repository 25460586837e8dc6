#pragma once

#include <cstddef>
#include <deque>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "storygen/story.hpp"

namespace storygen {

enum class EntryKind {
  Setting,
  Character,
  Goal,
  OutlineFact,
  StoryFact,
};

std::string to_string(EntryKind kind);
EntryKind entry_kind_from_string(std::string_view text);

struct LongTermEntry {
  EntryKind kind = EntryKind::StoryFact;
  /// Round the entry was recorded in; 0 for starter anchors.
  int round = 0;
  std::string text;

  bool operator==(const LongTermEntry&) const = default;
};

/// Append-only record of everything the pipeline has committed to: the
/// starter anchors from round 0 plus one batch of story facts per completed
/// round. Entries are never rewritten or dropped.
class LongTermMemory {
 public:
  void append(LongTermEntry entry);
  const std::vector<LongTermEntry>& entries() const { return entries_; }

  std::vector<LongTermEntry> of_kind(EntryKind kind) const;
  std::vector<LongTermEntry> of_round(int round) const;

 private:
  std::vector<LongTermEntry> entries_;
};

/// Sliding window over the most recent outlines. Capacity is fixed at
/// construction; pushing beyond it evicts the oldest entry.
class ShortTermMemory {
 public:
  static constexpr std::size_t kDefaultWindow = 2;

  explicit ShortTermMemory(std::size_t window = kDefaultWindow);

  void push(Outline outline);
  const std::deque<Outline>& window() const { return window_; }
  std::size_t capacity() const { return capacity_; }

  /// The two most recent outlines, oldest first. Empty unless the window
  /// holds at least two.
  std::vector<Outline> last_two() const;

 private:
  std::size_t capacity_;
  std::deque<Outline> window_;
};

/// The dual memory both agent groups read from. Long-term entries accumulate;
/// short-term holds the recent outline window that drives the twist gate.
struct MemoryStore {
  LongTermMemory long_term;
  ShortTermMemory short_term;

  /// Seeds round-0 anchors from the parsed starter output: one Setting entry
  /// for the topic, one Character per character, one Goal, and one
  /// OutlineFact holding the first outline text. Throws AlreadyInitialized
  /// when anchors exist, since they may be recorded exactly once.
  void seed_from_settings(const StorySettings& settings);

  void add_outline(const Outline& outline);
};

/// Renders the prompt context block, newest facts first, within `budget`
/// characters. Round-0 anchors are never truncated; throws BudgetTooSmall if
/// they alone exceed the budget. Budgets below 500 are rejected with
/// std::invalid_argument. Later sections are cut at item granularity: the
/// first header or item that does not fit ends the output.
std::string render_context(const MemoryStore& store, std::size_t budget);

/// The round-0 anchor block on its own, formatted as in render_context.
std::string format_round0_anchors(const LongTermMemory& memory);

void save_memory(const MemoryStore& store, const std::filesystem::path& dir);
MemoryStore load_memory(const std::filesystem::path& dir,
                        std::size_t window = ShortTermMemory::kDefaultWindow);

}  // namespace storygen
