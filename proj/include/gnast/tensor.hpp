#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace gnast {

// Dense row-major tensor. Rank is dynamic but almost everything in this
// project is a vector or a matrix; higher ranks (deconv kernels) index
// through flat offsets.
template <typename T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), T(0));
  }

  Tensor(std::vector<std::size_t> s, std::vector<T> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel_of(shape))
      throw std::invalid_argument("tensor: shape/data size mismatch");
  }

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) {
      if (d == 0) throw std::invalid_argument("tensor: zero dimension");
      n *= d;
    }
    return n;
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }

  std::size_t rows() const { return shape.at(0); }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape.at(1); }

  T& operator()(std::size_t i) { return data[i]; }
  const T& operator()(std::size_t i) const { return data[i]; }
  T& operator()(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  bool finite() const {
    for (const T& v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

template <typename T>
using MatrixRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<MatrixRM<T>>;
template <typename T>
using CMapMat = Eigen::Map<const MatrixRM<T>>;
template <typename T>
using MapVec = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <typename T>
using CMapVec = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

// Views a tensor (or a contiguous slice of one) as a rows x cols matrix.
template <typename T>
MapMat<T> as_matrix(Tensor<T>& t, std::size_t rows, std::size_t cols) {
  if (rows * cols != t.numel())
    throw std::invalid_argument("as_matrix: element count mismatch");
  return MapMat<T>(t.data.data(), rows, cols);
}

template <typename T>
CMapMat<T> as_matrix(const Tensor<T>& t, std::size_t rows, std::size_t cols) {
  if (rows * cols != t.numel())
    throw std::invalid_argument("as_matrix: element count mismatch");
  return CMapMat<T>(t.data.data(), rows, cols);
}

template <typename T>
MapVec<T> as_vector(Tensor<T>& t) {
  return MapVec<T>(t.data.data(), static_cast<Eigen::Index>(t.numel()));
}

template <typename T>
CMapVec<T> as_vector(const Tensor<T>& t) {
  return CMapVec<T>(t.data.data(), static_cast<Eigen::Index>(t.numel()));
}

template <typename T>
Tensor<T> tensor_from(std::initializer_list<std::size_t> shape, std::initializer_list<T> vals) {
  return Tensor<T>(std::vector<std::size_t>(shape), std::vector<T>(vals));
}

}  // namespace gnast
