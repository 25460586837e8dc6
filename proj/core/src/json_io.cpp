#include "json_io.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "storygen/errors.hpp"

namespace storygen::detail {

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw FormatError("cannot open for reading: " + file.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

void write_file_atomic(const std::filesystem::path& file,
                       std::string_view content) {
  const auto parent = file.parent_path();
  if (!parent.empty()) {
    std::filesystem::create_directories(parent);
  }
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw FormatError("cannot open for writing: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw FormatError("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, file);
}

nlohmann::json read_json_file(const std::filesystem::path& file) {
  const auto text = read_text_file(file);
  auto parsed = nlohmann::json::parse(text, nullptr, false);
  if (parsed.is_discarded()) {
    throw FormatError("invalid JSON in " + file.string());
  }
  return parsed;
}

void write_json_atomic(const std::filesystem::path& file,
                       const nlohmann::json& value) {
  write_file_atomic(file, value.dump(2) + "\n");
}

}  // namespace storygen::detail
