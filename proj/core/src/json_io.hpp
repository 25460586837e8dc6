#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace storygen::detail {

std::string read_text_file(const std::filesystem::path& file);

/// Writes to <file>.tmp in the same directory, then renames over the target,
/// so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& file,
                       std::string_view content);

nlohmann::json read_json_file(const std::filesystem::path& file);

/// dump(2) with a trailing newline; key order is nlohmann's sorted default,
/// which keeps every artifact byte-stable across runs.
void write_json_atomic(const std::filesystem::path& file,
                       const nlohmann::json& value);

}  // namespace storygen::detail
