#ifndef TOURMLM_TENSOR_HPP
#define TOURMLM_TENSOR_HPP

// Minimal row-major matrix and the handful of kernels the encoder needs.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <span>
#include <vector>

namespace tourmlm {

template <class T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  T operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<T> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const T> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
  void zero() { std::fill(data.begin(), data.end(), T{}); }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// out = a * b (+ out when accumulate). a: n x k, b: k x m.
template <class T>
void matmul(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out, bool accumulate = false) {
  assert(a.cols == b.rows);
  if (!accumulate) out = Matrix<T>(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    T* o = out.data.data() + i * out.cols;
    for (std::size_t k = 0; k < a.cols; ++k) {
      const T s = a(i, k);
      const T* br = b.data.data() + k * b.cols;
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += s * br[j];
    }
  }
}

/// out += a^T * b. a: k x n, b: k x m, out: n x m.
template <class T>
void matmul_tn_acc(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out) {
  assert(a.rows == b.rows && out.rows == a.cols && out.cols == b.cols);
  for (std::size_t k = 0; k < a.rows; ++k) {
    const T* ar = a.data.data() + k * a.cols;
    const T* br = b.data.data() + k * b.cols;
    for (std::size_t i = 0; i < a.cols; ++i) {
      const T s = ar[i];
      if (s == T{}) continue;
      T* o = out.data.data() + i * out.cols;
      for (std::size_t j = 0; j < b.cols; ++j) o[j] += s * br[j];
    }
  }
}

/// out = a * b^T (+ out when accumulate). a: n x k, b: m x k.
template <class T>
void matmul_nt(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out, bool accumulate = false) {
  assert(a.cols == b.cols);
  if (!accumulate) out = Matrix<T>(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const T* ar = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < b.rows; ++j) {
      const T* br = b.data.data() + j * b.cols;
      T s{};
      for (std::size_t k = 0; k < a.cols; ++k) s += ar[k] * br[k];
      out(i, j) += s;
    }
  }
}

/// Adds the 1 x m row vector `bias` to every row of `m`.
template <class T>
void add_row(Matrix<T>& m, const Matrix<T>& bias) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    T* r = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) r[j] += bias.data[j];
  }
}

/// out(0, j) += sum_i m(i, j).
template <class T>
void column_sums_acc(const Matrix<T>& m, Matrix<T>& out) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const T* r = m.data.data() + i * m.cols;
    for (std::size_t j = 0; j < m.cols; ++j) out.data[j] += r[j];
  }
}

template <class T>
void hadamard_in_place(Matrix<T>& m, const Matrix<T>& other) {
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] *= other.data[i];
}

template <class T>
void add_in_place(Matrix<T>& m, const Matrix<T>& other) {
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] += other.data[i];
}

}  // namespace tourmlm

#endif
