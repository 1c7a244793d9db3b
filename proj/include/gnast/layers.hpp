#pragma once

#include <cstddef>
#include <stdexcept>

#include "gnast/tensor.hpp"

// Layer primitives with explicit forward and backward passes. All matrix
// inputs are row-major with rows = samples (or sequence positions); the
// single-vector overloads below match the one-sample contracts and are thin
// wrappers over the batched code so both paths stay identical.
namespace gnast {

// y = x W^T + b, W is (out x in).
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  const std::size_t out = w.rows(), in = w.cols();
  if (x.cols() != in || b.numel() != out)
    throw std::invalid_argument("dense_forward: shape mismatch");
  const std::size_t rows = x.rows();
  Tensor<T> y({rows, out});
  as_matrix(y, rows, out).noalias() = as_matrix(x, rows, in) * as_matrix(w, out, in).transpose();
  as_matrix(y, rows, out).rowwise() += as_vector(b).transpose();
  return y;
}

// One-sample convenience: x is a length-in vector, result a length-out vector.
template <typename T>
Tensor<T> dense_apply(const Tensor<T>& w, const Tensor<T>& b, const Tensor<T>& x) {
  Tensor<T> row({1, x.numel()});
  row.data = x.data;
  Tensor<T> y = dense_forward(row, w, b);
  return Tensor<T>({w.rows()}, std::move(y.data));
}

template <typename T>
struct DenseGrads {
  Tensor<T> dx, dw, db;
};

template <typename T>
DenseGrads<T> dense_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy) {
  const std::size_t out = w.rows(), in = w.cols(), rows = x.rows();
  if (dy.rows() != rows || dy.cols() != out)
    throw std::invalid_argument("dense_backward: shape mismatch");
  DenseGrads<T> g{Tensor<T>({rows, in}), Tensor<T>({out, in}), Tensor<T>({out})};
  as_matrix(g.dx, rows, in).noalias() = as_matrix(dy, rows, out) * as_matrix(w, out, in);
  as_matrix(g.dw, out, in).noalias() =
      as_matrix(dy, rows, out).transpose() * as_matrix(x, rows, in);
  as_vector(g.db) = as_matrix(dy, rows, out).colwise().sum().transpose();
  return g;
}

// Transposed 1-D convolution. input is (len_in x c_in), kernels is
// (k x c_in x c_out), stride 1 or 2. Each input position scatters a
// kernel-weighted contribution; len_out = (len_in - 1) * stride + k.
template <typename T>
Tensor<T> deconv1d_forward(const Tensor<T>& input, const Tensor<T>& kernels, int stride) {
  if (stride != 1 && stride != 2) throw std::invalid_argument("deconv1d: stride must be 1 or 2");
  if (kernels.rank() != 3) throw std::invalid_argument("deconv1d: kernels must be rank 3");
  const std::size_t k = kernels.shape[0], c_in = kernels.shape[1], c_out = kernels.shape[2];
  if (k < 1) throw std::invalid_argument("deconv1d: kernel size must be >= 1");
  const std::size_t len_in = input.rows();
  if (input.cols() != c_in) throw std::invalid_argument("deconv1d: channel mismatch");
  const std::size_t len_out = (len_in - 1) * static_cast<std::size_t>(stride) + k;

  Tensor<T> out({len_out, c_out});
  auto in_m = as_matrix(input, len_in, c_in);
  auto out_m = as_matrix(out, len_out, c_out);
  MatrixRM<T> tap(len_in, c_out);
  for (std::size_t t = 0; t < k; ++t) {
    CMapMat<T> k_t(kernels.data.data() + t * c_in * c_out, c_in, c_out);
    tap.noalias() = in_m * k_t;
    for (std::size_t i = 0; i < len_in; ++i)
      out_m.row(static_cast<Eigen::Index>(i * stride + t)) += tap.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

template <typename T>
struct Deconv1dGrads {
  Tensor<T> dinput, dkernels;
};

template <typename T>
Deconv1dGrads<T> deconv1d_backward(const Tensor<T>& input, const Tensor<T>& kernels, int stride,
                                   const Tensor<T>& dout) {
  const std::size_t k = kernels.shape[0], c_in = kernels.shape[1], c_out = kernels.shape[2];
  const std::size_t len_in = input.rows();
  const std::size_t len_out = (len_in - 1) * static_cast<std::size_t>(stride) + k;
  if (dout.rows() != len_out || dout.cols() != c_out)
    throw std::invalid_argument("deconv1d_backward: dout shape mismatch");

  Deconv1dGrads<T> g{Tensor<T>({len_in, c_in}), Tensor<T>(kernels.shape)};
  auto din = as_matrix(g.dinput, len_in, c_in);
  auto in_m = as_matrix(input, len_in, c_in);
  auto dout_m = as_matrix(dout, len_out, c_out);
  MatrixRM<T> gathered(len_in, c_out);
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t i = 0; i < len_in; ++i)
      gathered.row(static_cast<Eigen::Index>(i)) =
          dout_m.row(static_cast<Eigen::Index>(i * stride + t));
    CMapMat<T> k_t(kernels.data.data() + t * c_in * c_out, c_in, c_out);
    MapMat<T> dk_t(g.dkernels.data.data() + t * c_in * c_out, c_in, c_out);
    din.noalias() += gathered * k_t.transpose();
    dk_t.noalias() += in_m.transpose() * gathered;
  }
  return g;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, T slope) {
  Tensor<T> y = x;
  for (T& v : y.data) v = v > T(0) ? v : slope * v;
  return y;
}

// dL/dx from dL/dy, using the pre-activation values.
template <typename T>
Tensor<T> leaky_relu_backward(const Tensor<T>& x_pre, const Tensor<T>& dy, T slope) {
  if (x_pre.numel() != dy.numel())
    throw std::invalid_argument("leaky_relu_backward: shape mismatch");
  Tensor<T> dx = dy;
  for (std::size_t i = 0; i < dx.numel(); ++i)
    if (x_pre.data[i] <= T(0)) dx.data[i] *= slope;
  return dx;
}

// Normalizes each column of x (rows x features) over the rows, then applies
// a learned per-feature scale and shift. With conv activations the rows are
// sequence positions, which makes this usable at batch size one.
template <typename T>
struct BatchNormCache {
  Tensor<T> xhat;
  std::vector<T> mean, inv_std;
};

template <typename T>
Tensor<T> batch_norm_forward(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                             BatchNormCache<T>* cache, T eps = T(1e-5)) {
  const std::size_t rows = x.rows(), f = x.cols();
  if (gamma.numel() != f || beta.numel() != f)
    throw std::invalid_argument("batch_norm: parameter shape mismatch");
  if (rows < 2) throw std::invalid_argument("batch_norm: needs at least 2 rows");
  Tensor<T> y({rows, f});
  if (cache) {
    cache->xhat = Tensor<T>({rows, f});
    cache->mean.assign(f, T(0));
    cache->inv_std.assign(f, T(0));
  }
  for (std::size_t j = 0; j < f; ++j) {
    T mean = 0, var = 0;
    for (std::size_t i = 0; i < rows; ++i) mean += x(i, j);
    mean /= static_cast<T>(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      T d = x(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<T>(rows);
    const T inv_std = T(1) / std::sqrt(var + eps);
    for (std::size_t i = 0; i < rows; ++i) {
      T xh = (x(i, j) - mean) * inv_std;
      if (cache) cache->xhat(i, j) = xh;
      y(i, j) = gamma(j) * xh + beta(j);
    }
    if (cache) {
      cache->mean[j] = mean;
      cache->inv_std[j] = inv_std;
    }
  }
  return y;
}

template <typename T>
struct BatchNormGrads {
  Tensor<T> dx, dgamma, dbeta;
};

template <typename T>
BatchNormGrads<T> batch_norm_backward(const Tensor<T>& gamma, const BatchNormCache<T>& cache,
                                      const Tensor<T>& dy) {
  const std::size_t rows = dy.rows(), f = dy.cols();
  BatchNormGrads<T> g{Tensor<T>({rows, f}), Tensor<T>({f}), Tensor<T>({f})};
  const T n = static_cast<T>(rows);
  for (std::size_t j = 0; j < f; ++j) {
    T sum_dy = 0, sum_dy_xhat = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      sum_dy += dy(i, j);
      sum_dy_xhat += dy(i, j) * cache.xhat(i, j);
    }
    g.dbeta(j) = sum_dy;
    g.dgamma(j) = sum_dy_xhat;
    const T scale = gamma(j) * cache.inv_std[j];
    for (std::size_t i = 0; i < rows; ++i) {
      g.dx(i, j) =
          scale * (dy(i, j) - sum_dy / n - cache.xhat(i, j) * sum_dy_xhat / n);
    }
  }
  return g;
}

// Keeps target_rows rows starting at offset (full - target) / 2. Used to
// trim transposed-convolution outputs back to the block's nominal length.
template <typename T>
Tensor<T> center_crop_rows(const Tensor<T>& x, std::size_t target_rows) {
  const std::size_t rows = x.rows(), cols = x.cols();
  if (target_rows > rows) throw std::invalid_argument("center_crop_rows: target too large");
  const std::size_t off = (rows - target_rows) / 2;
  Tensor<T> y({target_rows, cols});
  as_matrix(y, target_rows, cols) =
      as_matrix(x, rows, cols).middleRows(static_cast<Eigen::Index>(off),
                                          static_cast<Eigen::Index>(target_rows));
  return y;
}

template <typename T>
Tensor<T> center_crop_rows_backward(const Tensor<T>& dy, std::size_t full_rows) {
  const std::size_t target = dy.rows(), cols = dy.cols();
  const std::size_t off = (full_rows - target) / 2;
  Tensor<T> dx({full_rows, cols});
  as_matrix(dx, full_rows, cols)
      .middleRows(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(target)) =
      as_matrix(dy, target, cols);
  return dx;
}

// Row-wise softmax, numerically stabilized by max subtraction.
template <typename T>
Tensor<T> softmax_rows(const Tensor<T>& logits) {
  const std::size_t rows = logits.rows(), cols = logits.cols();
  Tensor<T> p({rows, cols});
  for (std::size_t i = 0; i < rows; ++i) {
    T m = logits(i, 0);
    for (std::size_t j = 1; j < cols; ++j) m = std::max(m, logits(i, j));
    T sum = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      T e = std::exp(logits(i, j) - m);
      p(i, j) = e;
      sum += e;
    }
    for (std::size_t j = 0; j < cols; ++j) p(i, j) /= sum;
  }
  return p;
}

}  // namespace gnast
