#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnast/optimizer.hpp"

// Checkpoint container: magic "GNC1", rng seed, step counter, then named
// tensors as (name, shape, little-endian float32 data). Each parameter
// entry is stored as two tensors, "<name>" and "<name>.rms". Training runs
// in float32, so save -> load -> save is byte-identical.
namespace gnast {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace detail {

inline void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
inline void put_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), 8);
}
inline std::uint32_t get_u32(std::ifstream& in) {
  std::uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
inline std::uint64_t get_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

template <typename T>
void put_tensor(std::ofstream& out, const std::string& name, const Tensor<T>& t) {
  put_u32(out, static_cast<std::uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
  for (std::size_t d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
  for (const T& v : t.data) {
    const float f = static_cast<float>(v);
    out.write(reinterpret_cast<const char*>(&f), 4);
  }
}

template <typename T>
std::pair<std::string, Tensor<T>> get_tensor(std::ifstream& in) {
  const std::uint32_t name_len = get_u32(in);
  if (!in || name_len > 4096) throw std::runtime_error("checkpoint: bad tensor name length");
  std::string name(name_len, '\0');
  in.read(name.data(), name_len);
  const std::uint32_t rank = get_u32(in);
  if (!in || rank > 8) throw std::runtime_error("checkpoint: bad tensor rank");
  std::vector<std::size_t> shape(rank);
  for (auto& d : shape) d = get_u32(in);
  Tensor<T> t(shape);
  for (T& v : t.data) {
    float f = 0;
    in.read(reinterpret_cast<char*>(&f), 4);
    v = static_cast<T>(f);
  }
  if (!in) throw std::runtime_error("checkpoint: truncated tensor data");
  return {std::move(name), std::move(t)};
}

}  // namespace detail

template <typename T>
void save_checkpoint(const ModelParameters<T>& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write("GNC1", 4);
  detail::put_u64(out, params.rng_seed());
  detail::put_u64(out, params.step());
  detail::put_u32(out, static_cast<std::uint32_t>(params.size() * 2));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = params.entry(i);
    detail::put_tensor(out, e.name, e.value);
    detail::put_tensor(out, e.name + ".rms", e.rms);
  }
  if (!out) throw std::runtime_error("short write: " + path);
}

template <typename T>
ModelParameters<T> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "GNC1", 4) != 0)
    throw std::runtime_error("bad checkpoint header: " + path);
  ModelParameters<T> params(detail::get_u64(in));
  params.set_step(detail::get_u64(in));
  const std::uint32_t count = detail::get_u32(in);
  if (count % 2 != 0) throw std::runtime_error("checkpoint: odd tensor count in " + path);
  for (std::uint32_t i = 0; i < count; i += 2) {
    auto [name, value] = detail::get_tensor<T>(in);
    auto [rms_name, rms] = detail::get_tensor<T>(in);
    if (rms_name != name + ".rms")
      throw std::runtime_error("checkpoint: missing rms cache for " + name + " in " + path);
    if (rms.shape != value.shape)
      throw std::runtime_error("checkpoint: cache shape mismatch for " + name + " in " + path);
    const std::size_t idx = params.add(name, value.shape);
    params.value(idx) = std::move(value);
    params.entry(idx).rms = std::move(rms);
  }
  return params;
}

}  // namespace gnast
