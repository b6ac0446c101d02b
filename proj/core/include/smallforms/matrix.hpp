#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "smallforms/errors.hpp"
#include "smallforms/rational.hpp"

namespace smallforms {

// Dense row-major matrix over an exact rational or double scalar.
template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}

  Mat(std::size_t rows, std::size_t cols, const T& init = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, init) {}

  static Mat identity(std::size_t n) {
    Mat out(n, n);
    for (std::size_t i = 0; i < n; ++i) out.at(i, i) = T(1);
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<T>& data() const { return data_; }

  bool operator==(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> data_;
};

using MatQ = Mat<Rational>;
using MatD = Mat<double>;

template <typename T>
Mat<T> multiply(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols() != b.rows()) {
    fail(errkind::dimension_mismatch, "matrix product shape mismatch");
  }
  Mat<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T& aik = a.at(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) {
        out.at(i, j) = T(out.at(i, j) + aik * b.at(k, j));
      }
    }
  }
  return out;
}

template <typename T>
Mat<T> subtract(const Mat<T>& a, const Mat<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(errkind::dimension_mismatch, "matrix difference shape mismatch");
  }
  Mat<T> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      out.at(i, j) = T(a.at(i, j) - b.at(i, j));
    }
  }
  return out;
}

template <typename T>
Mat<T> submatrix(const Mat<T>& a, std::size_t row_begin, std::size_t row_end,
                 std::size_t col_begin, std::size_t col_end) {
  Mat<T> out(row_end - row_begin, col_end - col_begin);
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (std::size_t j = col_begin; j < col_end; ++j) {
      out.at(i - row_begin, j - col_begin) = a.at(i, j);
    }
  }
  return out;
}

template <typename T>
Mat<T> vstack(const Mat<T>& top, const Mat<T>& bottom) {
  if (top.cols() != bottom.cols()) {
    fail(errkind::dimension_mismatch, "vertical stack column mismatch");
  }
  Mat<T> out(top.rows() + bottom.rows(), top.cols());
  for (std::size_t i = 0; i < top.rows(); ++i) {
    for (std::size_t j = 0; j < top.cols(); ++j) out.at(i, j) = top.at(i, j);
  }
  for (std::size_t i = 0; i < bottom.rows(); ++i) {
    for (std::size_t j = 0; j < bottom.cols(); ++j) {
      out.at(top.rows() + i, j) = bottom.at(i, j);
    }
  }
  return out;
}

namespace detail {

inline double pivot_magnitude(double v) { return v < 0 ? -v : v; }
inline Rational pivot_magnitude(const Rational& v) { return rational_abs(v); }

}  // namespace detail

// Determinant by Gaussian elimination with partial pivoting (magnitude pivot
// for doubles, first-nonzero-but-prefer-larger for rationals; either choice
// is exact for rationals).
template <typename T>
T determinant(Mat<T> a) {
  if (a.rows() != a.cols()) {
    fail(errkind::dimension_mismatch, "determinant of non-square matrix");
  }
  const std::size_t n = a.rows();
  T det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    auto best = detail::pivot_magnitude(a.at(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      auto mag = detail::pivot_magnitude(a.at(i, col));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (a.at(pivot, col) == T(0)) return T(0);
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(pivot, j), a.at(col, j));
      det = T(-det);
    }
    det = T(det * a.at(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      T factor = T(a.at(i, col) / a.at(col, col));
      for (std::size_t j = col; j < n; ++j) {
        a.at(i, j) = T(a.at(i, j) - factor * a.at(col, j));
      }
    }
  }
  return det;
}

// Gauss-Jordan inverse; nullopt when singular (exactly singular for
// rationals, zero pivot for doubles).
template <typename T>
std::optional<Mat<T>> inverse(Mat<T> a) {
  if (a.rows() != a.cols()) {
    fail(errkind::dimension_mismatch, "inverse of non-square matrix");
  }
  const std::size_t n = a.rows();
  Mat<T> inv = Mat<T>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    auto best = detail::pivot_magnitude(a.at(col, col));
    for (std::size_t i = col + 1; i < n; ++i) {
      auto mag = detail::pivot_magnitude(a.at(i, col));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (a.at(pivot, col) == T(0)) return std::nullopt;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a.at(pivot, j), a.at(col, j));
        std::swap(inv.at(pivot, j), inv.at(col, j));
      }
    }
    T scale = a.at(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a.at(col, j) = T(a.at(col, j) / scale);
      inv.at(col, j) = T(inv.at(col, j) / scale);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      T factor = a.at(i, col);
      if (factor == T(0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a.at(i, j) = T(a.at(i, j) - factor * a.at(col, j));
        inv.at(i, j) = T(inv.at(i, j) - factor * inv.at(col, j));
      }
    }
  }
  return inv;
}

// Exact rank of a rational matrix.
std::size_t rank(MatQ a);

// A nonzero rational vector c with a·c = 0 (c indexed by columns), or nullopt
// when the columns are linearly independent.  The returned vector is scaled
// to coprime integers with positive leading entry, so it is canonical.
std::optional<std::vector<Rational>> kernel_vector(MatQ a);

// Smallest eigenvalue and eigenvector of a symmetric matrix by cyclic Jacobi
// rotations (used for the float-mode rank-deficiency witness via the Gram
// matrix of the columns).
std::pair<double, std::vector<double>> smallest_eigenpair(MatD sym);

// All eigenvalues of a symmetric matrix, sorted ascending (numerical rank
// estimation counts those above a threshold).
std::vector<double> symmetric_eigenvalues(MatD sym);

}  // namespace smallforms
