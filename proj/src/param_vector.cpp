#include "ract/param_vector.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "ract/io_util.hpp"

namespace ract::diff {

namespace {

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  put_u64(out, std::bit_cast<uint64_t>(d));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str(size_t n) {
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(size_t n) const {
    if (bytes_.size() - pos_ < n) throw std::runtime_error("checkpoint: truncated data");
  }
  std::string_view bytes_;
  size_t pos_ = 0;
};

}  // namespace

uint64_t ParameterVector::add_segment(std::string_view name, uint64_t length) {
  if (has_segment(name)) throw std::invalid_argument("duplicate parameter segment: " + std::string(name));
  const uint64_t offset = values_.size();
  segments_.push_back({std::string(name), offset, length});
  values_.resize(values_.size() + length, 0.0);
  return offset;
}

bool ParameterVector::has_segment(std::string_view name) const {
  for (const auto& s : segments_)
    if (s.name == name) return true;
  return false;
}

std::span<double> ParameterVector::segment(std::string_view name) {
  for (const auto& s : segments_)
    if (s.name == name) return {values_.data() + s.offset, s.length};
  throw std::invalid_argument("no parameter segment named: " + std::string(name));
}

std::span<const double> ParameterVector::segment(std::string_view name) const {
  for (const auto& s : segments_)
    if (s.name == name) return {values_.data() + s.offset, s.length};
  throw std::invalid_argument("no parameter segment named: " + std::string(name));
}

const std::string& ParameterVector::segment_of_index(size_t i) const {
  for (const auto& s : segments_)
    if (i >= s.offset && i < s.offset + s.length) return s.name;
  throw std::out_of_range("parameter index outside every segment");
}

bool ParameterVector::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string ParameterVector::serialize() const {
  std::string out;
  out.reserve(16 + segments_.size() * 32 + values_.size() * 8);
  out += "RACT";
  put_u32(out, kFormatVersion);
  put_u32(out, static_cast<uint32_t>(segments_.size()));
  for (const auto& s : segments_) {
    put_u32(out, static_cast<uint32_t>(s.name.size()));
    out += s.name;
    put_u64(out, s.offset);
    put_u64(out, s.length);
  }
  for (double v : values_) put_f64(out, v);
  return out;
}

ParameterVector ParameterVector::deserialize(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "RACT")
    throw std::runtime_error("checkpoint: bad magic bytes (expected RACT)");
  Reader r(bytes.substr(4));
  const uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw std::runtime_error("checkpoint: unsupported format version " + std::to_string(version));
  const uint32_t nseg = r.u32();

  ParameterVector pv;
  uint64_t expected_offset = 0;
  for (uint32_t i = 0; i < nseg; ++i) {
    const uint32_t name_len = r.u32();
    Segment s;
    s.name = r.str(name_len);
    s.offset = r.u64();
    s.length = r.u64();
    if (s.offset != expected_offset)
      throw std::runtime_error("checkpoint: segment table is not contiguous at " + s.name);
    expected_offset += s.length;
    pv.segments_.push_back(std::move(s));
  }
  if (r.remaining() != expected_offset * 8)
    throw std::runtime_error("checkpoint: value payload size mismatch");
  pv.values_.resize(expected_offset);
  for (uint64_t i = 0; i < expected_offset; ++i) pv.values_[i] = r.f64();
  return pv;
}

void ParameterVector::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

ParameterVector ParameterVector::load(const std::filesystem::path& path) {
  return deserialize(read_file(path));
}

}  // namespace ract::diff
