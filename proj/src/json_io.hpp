#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "sgqa/errors.hpp"

namespace sgqa::detail {

using nlohmann::json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Parses `text` and rethrows parse failures as ParseError carrying the byte
/// offset, shifted by `base_offset` when `text` is a slice of a larger file.
inline json parse_json(const std::string& text, const std::string& origin, std::size_t base_offset = 0) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t at = base_offset + (e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(origin + ": malformed JSON at byte " + std::to_string(at) + ": " + e.what(), at);
  }
}

inline json parse_json_file(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

}  // namespace sgqa::detail
