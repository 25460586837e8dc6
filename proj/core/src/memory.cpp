#include "storygen/memory.hpp"

#include <stdexcept>

#include "json_io.hpp"
#include "serialize.hpp"
#include "storygen/errors.hpp"

namespace storygen {

std::string to_string(EntryKind kind) {
  switch (kind) {
    case EntryKind::Setting:
      return "setting";
    case EntryKind::Character:
      return "character";
    case EntryKind::Goal:
      return "goal";
    case EntryKind::OutlineFact:
      return "outline_fact";
    case EntryKind::StoryFact:
      return "story_fact";
  }
  return "story_fact";
}

EntryKind entry_kind_from_string(std::string_view text) {
  if (text == "setting") return EntryKind::Setting;
  if (text == "character") return EntryKind::Character;
  if (text == "goal") return EntryKind::Goal;
  if (text == "outline_fact") return EntryKind::OutlineFact;
  if (text == "story_fact") return EntryKind::StoryFact;
  throw FormatError("unknown memory entry kind: " + std::string(text));
}

void LongTermMemory::append(LongTermEntry entry) {
  entries_.push_back(std::move(entry));
}

std::vector<LongTermEntry> LongTermMemory::of_kind(EntryKind kind) const {
  std::vector<LongTermEntry> out;
  for (const auto& entry : entries_) {
    if (entry.kind == kind) {
      out.push_back(entry);
    }
  }
  return out;
}

std::vector<LongTermEntry> LongTermMemory::of_round(int round) const {
  std::vector<LongTermEntry> out;
  for (const auto& entry : entries_) {
    if (entry.round == round) {
      out.push_back(entry);
    }
  }
  return out;
}

ShortTermMemory::ShortTermMemory(std::size_t window) : capacity_(window) {
  if (window == 0) {
    throw std::invalid_argument("short-term window must be at least 1");
  }
}

void ShortTermMemory::push(Outline outline) {
  window_.push_back(std::move(outline));
  while (window_.size() > capacity_) {
    window_.pop_front();
  }
}

std::vector<Outline> ShortTermMemory::last_two() const {
  if (window_.size() < 2) {
    return {};
  }
  return {window_[window_.size() - 2], window_[window_.size() - 1]};
}

void MemoryStore::seed_from_settings(const StorySettings& settings) {
  if (!long_term.entries().empty()) {
    throw AlreadyInitialized("round-0 anchors were already recorded");
  }
  long_term.append({EntryKind::Setting, 0, settings.topic});
  for (const auto& character : settings.characters) {
    long_term.append(
        {EntryKind::Character, 0, character.name + ": " + character.description});
  }
  long_term.append({EntryKind::Goal, 0, settings.main_goal});
  long_term.append({EntryKind::OutlineFact, 0, settings.first_outline});
}

void MemoryStore::add_outline(const Outline& outline) {
  short_term.push(outline);
}

std::string format_round0_anchors(const LongTermMemory& memory) {
  std::string out;
  bool any = false;
  for (const auto& entry : memory.entries()) {
    if (entry.round != 0) {
      continue;
    }
    if (!any) {
      out += "=== STORY ANCHORS ===\n";
      any = true;
    }
    out += "[" + to_string(entry.kind) + "] " + entry.text + "\n";
  }
  return out;
}

std::string render_context(const MemoryStore& store, std::size_t budget) {
  if (budget < 500) {
    throw std::invalid_argument("context budget below 500 characters");
  }

  const auto anchors = format_round0_anchors(store.long_term);
  if (anchors.size() > budget) {
    throw BudgetTooSmall("round-0 anchors need " +
                         std::to_string(anchors.size()) +
                         " characters, budget is " + std::to_string(budget));
  }
  std::string out = anchors;

  // Later sections are best-effort: chunks are appended in order and the
  // first one that does not fit ends the whole rendering, so the result is
  // always an exact prefix of the unlimited rendering.
  std::vector<std::string> chunks;

  const auto& window = store.short_term.window();
  if (!window.empty()) {
    chunks.push_back("=== RECENT OUTLINES ===\n");
    for (const auto& outline : window) {
      chunks.push_back("(round " + std::to_string(outline.round_index) + ", " +
                       std::string(to_string(outline.origin)) + ") " +
                       outline.text + "\n");
    }
  }

  const auto& entries = store.long_term.entries();
  bool fact_header = false;
  std::vector<std::string> fact_chunks;
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (it->kind != EntryKind::StoryFact) {
      continue;
    }
    if (!fact_header) {
      fact_chunks.push_back("=== STORY FACTS (NEWEST FIRST) ===\n");
      fact_header = true;
    }
    fact_chunks.push_back("[round " + std::to_string(it->round) + "] " +
                          it->text + "\n");
  }
  chunks.insert(chunks.end(), fact_chunks.begin(), fact_chunks.end());

  for (const auto& chunk : chunks) {
    if (out.size() + chunk.size() > budget) {
      break;
    }
    out += chunk;
  }
  return out;
}

void save_memory(const MemoryStore& store, const std::filesystem::path& dir) {
  auto long_term = nlohmann::json::array();
  for (const auto& entry : store.long_term.entries()) {
    long_term.push_back(detail::to_json(entry));
  }
  detail::write_json_atomic(dir / "long_term.json",
                            {{"entries", long_term}});

  auto outlines = nlohmann::json::array();
  for (const auto& outline : store.short_term.window()) {
    outlines.push_back(detail::to_json(outline));
  }
  detail::write_json_atomic(
      dir / "short_term.json",
      {{"window", store.short_term.capacity()}, {"outlines", outlines}});
}

MemoryStore load_memory(const std::filesystem::path& dir, std::size_t window) {
  const auto long_term = detail::read_json_file(dir / "long_term.json");
  const auto short_term = detail::read_json_file(dir / "short_term.json");

  MemoryStore store{{}, ShortTermMemory(
                            short_term.value("window", window))};
  for (const auto& entry : detail::require(long_term, "entries")) {
    store.long_term.append(detail::entry_from_json(entry));
  }
  for (const auto& outline : detail::require(short_term, "outlines")) {
    store.short_term.push(detail::outline_from_json(outline));
  }
  return store;
}

}  // namespace storygen
