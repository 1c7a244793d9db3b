#pragma once

#include <cmath>
#include <stdexcept>

#include "gnast/tensor.hpp"

namespace gnast {

// Cross-entropy of softmax(logits) against a one-hot target class,
// stabilized by max subtraction.
template <typename T>
T softmax_ce(const Tensor<T>& logits, std::size_t target_class) {
  const std::size_t c = logits.numel();
  if (target_class >= c) throw std::invalid_argument("softmax_ce: target class out of range");
  T m = logits(0);
  for (std::size_t j = 1; j < c; ++j) m = std::max(m, logits(j));
  T sum = 0;
  for (std::size_t j = 0; j < c; ++j) sum += std::exp(logits(j) - m);
  return std::log(sum) - (logits(target_class) - m);
}

// d(softmax_ce)/d(logits) = softmax(logits) - onehot(target).
template <typename T>
Tensor<T> softmax_ce_grad(const Tensor<T>& logits, std::size_t target_class) {
  const std::size_t c = logits.numel();
  if (target_class >= c) throw std::invalid_argument("softmax_ce: target class out of range");
  Tensor<T> g(logits.shape);
  T m = logits(0);
  for (std::size_t j = 1; j < c; ++j) m = std::max(m, logits(j));
  T sum = 0;
  for (std::size_t j = 0; j < c; ++j) {
    g(j) = std::exp(logits(j) - m);
    sum += g(j);
  }
  for (std::size_t j = 0; j < c; ++j) g(j) /= sum;
  g(target_class) -= T(1);
  return g;
}

// Summed cross-entropy over rows of a (rows x classes) logit matrix, with
// one target class per row. Writes softmax(row) - onehot into dlogits when
// given; this is the workhorse for both network heads.
template <typename T, typename TargetAt>
T softmax_ce_rows(const Tensor<T>& logits, TargetAt target_at, Tensor<T>* dlogits) {
  const std::size_t rows = logits.rows(), c = logits.cols();
  if (dlogits && (dlogits->rows() != rows || dlogits->cols() != c))
    throw std::invalid_argument("softmax_ce_rows: grad shape mismatch");
  T total = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t tc = target_at(i);
    if (tc >= c) throw std::invalid_argument("softmax_ce_rows: target class out of range");
    const T* row = logits.data.data() + i * c;
    T m = row[0];
    for (std::size_t j = 1; j < c; ++j) m = std::max(m, row[j]);
    T sum = 0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(row[j] - m);
    total += std::log(sum) - (row[tc] - m);
    if (dlogits) {
      T* g = dlogits->data.data() + i * c;
      for (std::size_t j = 0; j < c; ++j) g[j] = std::exp(row[j] - m) / sum;
      g[tc] -= T(1);
    }
  }
  return total;
}

// KL divergence of N(mu, exp(logvar)) from N(0, I), closed form summed over
// dimensions: -1/2 sum(1 + logvar - mu^2 - exp(logvar)).
template <typename T>
T kl_gauss(const Tensor<T>& mu, const Tensor<T>& logvar) {
  if (mu.numel() != logvar.numel()) throw std::invalid_argument("kl_gauss: shape mismatch");
  T total = 0;
  for (std::size_t i = 0; i < mu.numel(); ++i) {
    total += T(-0.5) * (T(1) + logvar(i) - mu(i) * mu(i) - std::exp(logvar(i)));
  }
  return total;
}

template <typename T>
struct KlGrads {
  Tensor<T> dmu, dlogvar;
};

template <typename T>
KlGrads<T> kl_gauss_grads(const Tensor<T>& mu, const Tensor<T>& logvar) {
  KlGrads<T> g{Tensor<T>(mu.shape), Tensor<T>(logvar.shape)};
  for (std::size_t i = 0; i < mu.numel(); ++i) {
    g.dmu(i) = mu(i);
    g.dlogvar(i) = T(0.5) * (std::exp(logvar(i)) - T(1));
  }
  return g;
}

}  // namespace gnast
