#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace storygen::detail {

inline std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end &&
         std::isspace(static_cast<unsigned char>(text[begin])) != 0) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(text[end - 1])) != 0) {
    --end;
  }
  return std::string(text.substr(begin, end - begin));
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      nl = text.size();
    }
    auto line = std::string(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

/// Drops list markers ("- ", "* ", "3. ") so bulleted agent output parses too.
inline std::string_view strip_bullet(std::string_view line) {
  std::size_t pos = 0;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (pos < line.size() && (line[pos] == '-' || line[pos] == '*')) {
    ++pos;
  } else {
    auto digits = pos;
    while (digits < line.size() &&
           std::isdigit(static_cast<unsigned char>(line[digits])) != 0) {
      ++digits;
    }
    if (digits > pos && digits < line.size() && line[digits] == '.') {
      pos = digits + 1;
    }
  }
  while (pos < line.size() && line[pos] == ' ') ++pos;
  return line.substr(pos);
}

}  // namespace storygen::detail
