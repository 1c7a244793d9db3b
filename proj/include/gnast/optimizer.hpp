#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnast/rng.hpp"
#include "gnast/tensor.hpp"

namespace gnast {

// Raised when training produces non-finite values (the exploding-loss case).
struct instability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One trainable tensor plus its RMSProp running squared-gradient cache.
template <typename T>
struct ParamEntry {
  std::string name;
  Tensor<T> value;
  Tensor<T> rms;
};

// Named, ordered collection of trainable tensors with optimizer state.
// Order is fixed at construction and is part of the serialized form, so
// gradient buffers address entries by index.
template <typename T>
class ModelParameters {
 public:
  ModelParameters() = default;
  explicit ModelParameters(std::uint64_t rng_seed) : rng_seed_(rng_seed) {}

  std::size_t add(std::string name, std::vector<std::size_t> shape) {
    for (const auto& e : entries_)
      if (e.name == name) throw std::invalid_argument("duplicate parameter name: " + name);
    entries_.push_back({std::move(name), Tensor<T>(shape), Tensor<T>(shape)});
    return entries_.size() - 1;
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
      if (entries_[i].name == name) return i;
    throw std::invalid_argument("no parameter named: " + name);
  }

  Tensor<T>& value(std::size_t i) { return entries_[i].value; }
  const Tensor<T>& value(std::size_t i) const { return entries_[i].value; }
  ParamEntry<T>& entry(std::size_t i) { return entries_[i]; }
  const ParamEntry<T>& entry(std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }

  std::uint64_t rng_seed() const { return rng_seed_; }
  void set_rng_seed(std::uint64_t s) { rng_seed_ = s; }
  std::uint64_t step() const { return step_; }
  void set_step(std::uint64_t s) { step_ = s; }
  void bump_step() { ++step_; }

  // Gradient buffer with one tensor per entry, all zero.
  std::vector<Tensor<T>> grad_buffer() const {
    std::vector<Tensor<T>> g;
    g.reserve(entries_.size());
    for (const auto& e : entries_) g.emplace_back(e.value.shape);
    return g;
  }

  bool finite() const {
    for (const auto& e : entries_)
      if (!e.value.finite()) return false;
    return true;
  }

 private:
  std::vector<ParamEntry<T>> entries_;
  std::uint64_t rng_seed_ = 0;
  std::uint64_t step_ = 0;
};

// Glorot-style uniform init in +-sqrt(6 / (fan_in + fan_out)).
template <typename T>
void init_uniform(Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (T& v : t.data) v = static_cast<T>((rng.uniform() * 2.0 - 1.0) * limit);
}

// cache <- rho*cache + (1-rho)*g^2 ; theta <- theta - lr*g/(sqrt(cache)+eps).
// A non-finite gradient aborts the whole step before touching any tensor.
template <typename T>
void rmsprop_step(ModelParameters<T>& params, const std::vector<Tensor<T>>& grads, T lr,
                  T rho = T(0.9), T eps = T(1e-8)) {
  if (grads.size() != params.size())
    throw std::invalid_argument("rmsprop_step: gradient buffer size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (grads[i].shape != params.value(i).shape)
      throw std::invalid_argument("rmsprop_step: gradient shape mismatch at " +
                                  params.entry(i).name);
    if (!grads[i].finite())
      throw instability_error("non-finite gradient for " + params.entry(i).name);
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    auto& e = params.entry(i);
    for (std::size_t j = 0; j < e.value.numel(); ++j) {
      const T g = grads[i].data[j];
      e.rms.data[j] = rho * e.rms.data[j] + (T(1) - rho) * g * g;
      e.value.data[j] -= lr * g / (std::sqrt(e.rms.data[j]) + eps);
    }
  }
  params.bump_step();
}

// Order-sensitive digest of all parameter bytes; used to assert that
// generative passes leave the weights untouched.
template <typename T>
std::uint64_t params_fingerprint(const ModelParameters<T>& params) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ull;
    }
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = params.entry(i);
    mix(e.name.data(), e.name.size());
    mix(e.value.data.data(), e.value.data.size() * sizeof(T));
    mix(e.rms.data.data(), e.rms.data.size() * sizeof(T));
  }
  return h;
}

}  // namespace gnast
