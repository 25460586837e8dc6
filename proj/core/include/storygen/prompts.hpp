#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace storygen {

struct PromptTemplate {
  std::string system_text;
  std::string user_text;
};

/// Renders {placeholder} markers in `text` from `values`. Unknown
/// placeholders are left intact so a template can mention literal braces.
std::string render_template(std::string_view text,
                            const std::map<std::string, std::string>& values);

/// Holds one prompt template per agent role. Built-in defaults cover every
/// role the pipeline uses; load_overrides replaces individual roles from
/// plain-text files.
class PromptLibrary {
 public:
  PromptLibrary();

  bool has(std::string_view role_tag) const;
  const PromptTemplate& get(std::string_view role_tag) const;
  void set(const std::string& role_tag, PromptTemplate tmpl);

  /// Reads <role_tag>.txt files from `dir`. A file may split system and user
  /// text with "SYSTEM:" / "USER:" marker lines; without markers the whole
  /// file becomes the user text and the built-in system text is kept.
  /// Returns the role tags that were overridden.
  std::vector<std::string> load_overrides(const std::filesystem::path& dir);

  std::vector<std::string> role_tags() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

}  // namespace storygen
