#include "smallforms/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace smallforms {

namespace {

// Row echelon reduction in place; returns pivot column per pivot row.
std::vector<std::size_t> echelon(MatQ& a) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t pivot = row;
    while (pivot < a.rows() && a.at(pivot, col) == 0) ++pivot;
    if (pivot == a.rows()) continue;
    if (pivot != row) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a.at(pivot, j), a.at(row, j));
    }
    Rational scale = a.at(row, col);
    for (std::size_t j = col; j < a.cols(); ++j) {
      a.at(row, j) = Rational(a.at(row, j) / scale);
    }
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row) continue;
      Rational factor = a.at(i, col);
      if (factor == 0) continue;
      for (std::size_t j = col; j < a.cols(); ++j) {
        a.at(i, j) = Rational(a.at(i, j) - factor * a.at(row, j));
      }
    }
    pivot_cols.push_back(col);
    ++row;
  }
  return pivot_cols;
}

}  // namespace

std::size_t rank(MatQ a) { return echelon(a).size(); }

std::optional<std::vector<Rational>> kernel_vector(MatQ a) {
  const std::size_t n = a.cols();
  std::vector<std::size_t> pivot_cols = echelon(a);
  if (pivot_cols.size() == n) return std::nullopt;

  // First free column (smallest index not a pivot) gives the canonical
  // kernel vector: free variable 1, pivot variables read off the echelon form.
  std::vector<bool> is_pivot(n, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;
  std::size_t free_col = 0;
  while (free_col < n && is_pivot[free_col]) ++free_col;

  std::vector<Rational> c(n, Rational(0));
  c[free_col] = Rational(1);
  for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
    c[pivot_cols[i]] = Rational(-a.at(i, free_col));
  }

  // Scale to coprime integers with positive leading entry.
  Integer lcm(1);
  for (const Rational& v : c) {
    Integer out;
    mpz_lcm(out.get_mpz_t(), lcm.get_mpz_t(), v.get_den().get_mpz_t());
    lcm = out;
  }
  Integer gcd(0);
  std::vector<Integer> scaled(n);
  for (std::size_t j = 0; j < n; ++j) {
    Rational s = Rational(c[j] * Rational(lcm));
    scaled[j] = s.get_num();
    Integer out;
    mpz_gcd(out.get_mpz_t(), gcd.get_mpz_t(), scaled[j].get_mpz_t());
    gcd = out;
  }
  if (gcd == 0) gcd = 1;
  int lead_sign = 0;
  for (std::size_t j = 0; j < n && lead_sign == 0; ++j) {
    lead_sign = sgn(scaled[j]);
  }
  if (lead_sign < 0) gcd = -gcd;
  for (std::size_t j = 0; j < n; ++j) {
    c[j] = Rational(Rational(scaled[j]) / Rational(gcd));
  }
  return c;
}

namespace {

// Cyclic Jacobi diagonalization in place; accumulates rotations into vecs.
void jacobi_diagonalize(MatD& sym, MatD& vecs) {
  const std::size_t n = sym.rows();
  if (n != sym.cols()) {
    fail(errkind::dimension_mismatch, "eigen-decomposition of non-square matrix");
  }
  vecs = MatD::identity(n);
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += sym.at(p, q) * sym.at(p, q);
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = sym.at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        double theta = (sym.at(q, q) - sym.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = sym.at(k, p);
          double akq = sym.at(k, q);
          sym.at(k, p) = c * akp - s * akq;
          sym.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = sym.at(p, k);
          double aqk = sym.at(q, k);
          sym.at(p, k) = c * apk - s * aqk;
          sym.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = vecs.at(k, p);
          double vkq = vecs.at(k, q);
          vecs.at(k, p) = c * vkp - s * vkq;
          vecs.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace

std::pair<double, std::vector<double>> smallest_eigenpair(MatD sym) {
  const std::size_t n = sym.rows();
  MatD vecs;
  jacobi_diagonalize(sym, vecs);
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (sym.at(i, i) < sym.at(best, best)) best = i;
  }
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = vecs.at(i, best);
  return {sym.at(best, best), v};
}

std::vector<double> symmetric_eigenvalues(MatD sym) {
  const std::size_t n = sym.rows();
  MatD vecs;
  jacobi_diagonalize(sym, vecs);
  std::vector<double> evals(n);
  for (std::size_t i = 0; i < n; ++i) evals[i] = sym.at(i, i);
  std::sort(evals.begin(), evals.end());
  return evals;
}

}  // namespace smallforms
