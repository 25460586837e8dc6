#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

struct CharacterSpec {
  std::string name;
  std::string description;

  bool operator==(const CharacterSpec&) const = default;
};

/// Premise produced by the story starter: the anchor every later stage
/// must stay consistent with.
struct StorySettings {
  std::string topic;
  std::string language;
  std::vector<CharacterSpec> characters;
  std::string main_goal;
  std::string first_outline;

  bool operator==(const StorySettings&) const = default;
};

enum class OutlineOrigin { Starter, Plain, Twist };

std::string_view to_string(OutlineOrigin origin);
OutlineOrigin outline_origin_from_string(std::string_view s);

/// One round's outline. Round 0 is reserved for the starter's first outline.
struct Outline {
  int round_index = 0;
  std::string text;
  OutlineOrigin origin = OutlineOrigin::Plain;

  bool operator==(const Outline&) const = default;
};

struct DialogueRound {
  std::string writer_draft;
  std::string reader_feedback;

  bool operator==(const DialogueRound&) const = default;
};

/// Full record of one writer/reader exchange plus the final edited text.
struct DialogueTranscript {
  std::vector<DialogueRound> rounds;
  std::string final_text;

  bool operator==(const DialogueTranscript&) const = default;
};

struct StorySegment {
  int round_index = 0;
  std::string text;
  std::size_t word_count = 0;
  DialogueTranscript transcript;

  bool operator==(const StorySegment&) const = default;
};

/// Whitespace-delimited token count. This is the counting rule behind the
/// run's word-length target, chosen because it is trivially auditable.
std::size_t count_words(std::string_view text);

StorySettings load_story_settings(const std::filesystem::path& file);
void save_story_settings(const StorySettings& settings,
                         const std::filesystem::path& file);

}  // namespace storygen
