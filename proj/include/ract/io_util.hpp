#pragma once

#include <charconv>
#include <filesystem>
#include <string>
#include <string_view>

namespace ract {

/// Shortest round-trip decimal form of a double (to_chars), so emitted
/// CSV/JSONL bytes are reproducible and parse back to the same value.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ract
