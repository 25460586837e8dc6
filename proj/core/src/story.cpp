#include "storygen/story.hpp"

#include <cctype>

#include "json_io.hpp"
#include "serialize.hpp"
#include "storygen/errors.hpp"

namespace storygen {

std::string_view to_string(OutlineOrigin origin) {
  switch (origin) {
    case OutlineOrigin::Starter:
      return "starter";
    case OutlineOrigin::Plain:
      return "plain";
    case OutlineOrigin::Twist:
      return "twist";
  }
  return "plain";
}

OutlineOrigin outline_origin_from_string(std::string_view s) {
  if (s == "starter") return OutlineOrigin::Starter;
  if (s == "plain") return OutlineOrigin::Plain;
  if (s == "twist") return OutlineOrigin::Twist;
  throw FormatError("unknown outline origin: " + std::string(s));
}

std::size_t count_words(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (const char ch : text) {
    const bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    if (!space && !in_word) {
      ++count;
    }
    in_word = !space;
  }
  return count;
}

StorySettings load_story_settings(const std::filesystem::path& file) {
  return detail::settings_from_json(detail::read_json_file(file));
}

void save_story_settings(const StorySettings& settings,
                         const std::filesystem::path& file) {
  detail::write_json_atomic(file, detail::to_json(settings));
}

}  // namespace storygen
