#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnast {

// One execution, represented as a fixed-size vector of bucketed
// edge-transition counts. Class 0 means the edge was never taken;
// classes 1..7 are count magnitude buckets.
struct CoverageTrace {
  std::vector<std::uint8_t> classes;

  CoverageTrace() = default;
  explicit CoverageTrace(std::size_t map_size) : classes(map_size, 0) {}

  std::size_t map_size() const { return classes.size(); }
  bool all_zero() const {
    for (auto c : classes)
      if (c) return false;
    return true;
  }
  bool operator==(const CoverageTrace& o) const { return classes == o.classes; }
};

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Map index of the transition prev_loc -> cur_loc.
inline std::uint32_t edge_index(std::uint32_t prev_loc, std::uint32_t cur_loc,
                                std::uint32_t map_size) {
  if (!is_power_of_two(map_size))
    throw std::invalid_argument("edge_index: map_size must be a power of two");
  return (cur_loc ^ (prev_loc >> 1)) & (map_size - 1);
}

// Collapses a raw hit count into one of 8 magnitude classes.
inline std::uint8_t bucketize(std::uint64_t count) {
  if (count < 4) return static_cast<std::uint8_t>(count);
  if (count < 8) return 4;
  if (count < 16) return 5;
  if (count < 32) return 6;
  return 7;
}

// Per-execution hit counter. Each execution owns its own context, so
// concurrent executions never share coverage state.
class TraceContext {
 public:
  explicit TraceContext(std::size_t map_size)
      : counts_(map_size, 0), map_size_(static_cast<std::uint32_t>(map_size)), prev_(0) {
    if (!is_power_of_two(map_size_))
      throw std::invalid_argument("trace: map_size must be a power of two");
  }

  void hit(std::uint32_t location) {
    counts_[edge_index(prev_, location, map_size_)]++;
    prev_ = location;
  }

  CoverageTrace finalize() const {
    CoverageTrace t(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) t.classes[i] = bucketize(counts_[i]);
    return t;
  }

  std::size_t map_size() const { return map_size_; }

 private:
  std::vector<std::uint64_t> counts_;
  std::uint32_t map_size_;
  std::uint32_t prev_;
};

// Trace file format: "GNT1", u32-LE map size, then map_size class bytes.
inline void write_trace_file(const std::string& path, const CoverageTrace& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(t.map_size());
  const unsigned char len[4] = {static_cast<unsigned char>(n & 0xff),
                                static_cast<unsigned char>((n >> 8) & 0xff),
                                static_cast<unsigned char>((n >> 16) & 0xff),
                                static_cast<unsigned char>((n >> 24) & 0xff)};
  out.write("GNT1", 4);
  out.write(reinterpret_cast<const char*>(len), 4);
  out.write(reinterpret_cast<const char*>(t.classes.data()),
            static_cast<std::streamsize>(t.classes.size()));
  if (!out) throw std::runtime_error("short write: " + path);
}

inline CoverageTrace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  char magic[4];
  unsigned char len[4];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(len), 4);
  if (!in || std::memcmp(magic, "GNT1", 4) != 0)
    throw std::runtime_error("bad trace file header: " + path);
  const std::uint32_t n = static_cast<std::uint32_t>(len[0]) |
                          (static_cast<std::uint32_t>(len[1]) << 8) |
                          (static_cast<std::uint32_t>(len[2]) << 16) |
                          (static_cast<std::uint32_t>(len[3]) << 24);
  CoverageTrace t(n);
  in.read(reinterpret_cast<char*>(t.classes.data()), n);
  if (!in || in.gcount() != static_cast<std::streamsize>(n))
    throw std::runtime_error("truncated trace file: " + path);
  for (auto c : t.classes)
    if (c > 7) throw std::runtime_error("trace class out of range in: " + path);
  return t;
}

}  // namespace gnast
