#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ract::diff {

/// Flat vector of trainable scalars with a named-segment map.
/// Segments are disjoint and cover the value array exactly; that holds by
/// construction (segments are appended back to back) and is re-checked on
/// deserialization.
class ParameterVector {
 public:
  struct Segment {
    std::string name;
    uint64_t offset = 0;
    uint64_t length = 0;
  };

  ParameterVector() = default;

  /// Appends a segment of `length` zeros; returns its offset.
  uint64_t add_segment(std::string_view name, uint64_t length);

  size_t size() const { return values_.size(); }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  const std::vector<Segment>& segments() const { return segments_; }
  std::span<double> segment(std::string_view name);
  std::span<const double> segment(std::string_view name) const;
  bool has_segment(std::string_view name) const;

  /// Name of the segment holding flat index `i` (for error reporting).
  const std::string& segment_of_index(size_t i) const;

  bool all_finite() const;

  /// Checkpoint container format (all little-endian):
  ///   "RACT" | u32 version | u32 segment_count |
  ///   per segment: u32 name_len | name bytes | u64 offset | u64 length |
  ///   f64 x total_length raw values.
  std::string serialize() const;
  static ParameterVector deserialize(std::string_view bytes);

  void save(const std::filesystem::path& path) const;
  static ParameterVector load(const std::filesystem::path& path);

  static constexpr uint32_t kFormatVersion = 1;

 private:
  std::vector<double> values_;
  std::vector<Segment> segments_;
};

}  // namespace ract::diff
