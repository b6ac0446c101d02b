#include "smallforms/problem.hpp"

#include <cstdlib>
#include <string>

#include "smallforms/errors.hpp"

namespace smallforms {

const char* variant_name(Variant v) {
  return v == Variant::Absolute ? "absolute" : "classical";
}

Variant variant_from_name(const std::string& name) {
  if (name == "absolute") return Variant::Absolute;
  if (name == "classical") return Variant::Classical;
  fail(errkind::parse, "unknown variant '" + name + "' (expected absolute|classical)");
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Singleton:
      return "Singleton";
    case Regime::Excluded:
      return "Excluded";
    case Regime::Hypersurface:
      return "Hypersurface";
    case Regime::Generic:
      return "Generic";
    case Regime::Classical:
      return "Classical";
    case Regime::Unresolved:
      return "Unresolved";
  }
  return "Unknown";
}

long long IntegerVector::height() const {
  long long h = 0;
  for (long long c : components) {
    long long a = c < 0 ? -c : c;
    if (a > h) h = a;
  }
  return h;
}

bool IntegerVector::is_zero() const { return height() == 0; }

HeightWindow::HeightWindow(long long lo, long long hi) : q_min(lo), q_max(hi) {
  if (!(1 <= lo && lo <= hi)) {
    fail(errkind::invalid_argument,
         "height window needs 1 <= q_min <= q_max (got [" + std::to_string(lo) +
             ", " + std::to_string(hi) + "])");
  }
}

namespace {

template <typename M, typename InRange>
void check_unit_interval(const M& entries, InRange in_range) {
  for (std::size_t i = 0; i < entries.rows(); ++i) {
    for (std::size_t j = 0; j < entries.cols(); ++j) {
      if (!in_range(entries.at(i, j))) {
        fail(errkind::invalid_argument,
             "form matrix entries must lie in [0, 1] (violated at row " +
                 std::to_string(i + 1) + ", column " + std::to_string(j + 1) + ")");
      }
    }
  }
}

}  // namespace

FormMatrix FormMatrix::exact(MatQ entries) {
  if (entries.rows() == 0 || entries.cols() == 0) {
    fail(errkind::invalid_argument, "form matrix must be non-empty");
  }
  check_unit_interval(entries, [](const Rational& v) { return v >= 0 && v <= 1; });
  FormMatrix out;
  out.m_ = static_cast<int>(entries.rows());
  out.n_ = static_cast<int>(entries.cols());
  out.exact_ = std::move(entries);
  return out;
}

FormMatrix FormMatrix::floating(MatD entries) {
  if (entries.rows() == 0 || entries.cols() == 0) {
    fail(errkind::invalid_argument, "form matrix must be non-empty");
  }
  check_unit_interval(entries, [](double v) { return v >= 0.0 && v <= 1.0; });
  FormMatrix out;
  out.m_ = static_cast<int>(entries.rows());
  out.n_ = static_cast<int>(entries.cols());
  out.float_ = std::move(entries);
  return out;
}

const MatQ& FormMatrix::exact_entries() const {
  if (!exact_) {
    fail(errkind::invalid_argument, "form matrix is not in exact representation");
  }
  return *exact_;
}

const MatD& FormMatrix::float_entries() const {
  if (!float_) {
    fail(errkind::invalid_argument, "form matrix is not in float representation");
  }
  return *float_;
}

double FormMatrix::entry_double(int i, int j) const {
  if (exact_) return to_double(exact_->at(i, j));
  return float_->at(i, j);
}

bool FormMatrix::operator==(const FormMatrix& other) const {
  if (is_exact() != other.is_exact() || m_ != other.m_ || n_ != other.n_) return false;
  if (is_exact()) return *exact_ == *other.exact_;
  return *float_ == *other.float_;
}

ProblemSpec::ProblemSpec(int m_in, int n_in, Variant variant_in, ApproxFunction psi_in)
    : m(m_in), n(n_in), variant(variant_in), psi(std::move(psi_in)) {
  if (m < 1 || n < 1) {
    fail(errkind::invalid_argument, "problem dimensions must satisfy m >= 1, n >= 1");
  }
  if (psi.family() == ApproxFamily::PerCoordinate &&
      psi.coordinate_count() != static_cast<std::size_t>(n)) {
    fail(errkind::invalid_argument,
         "per-coordinate approximating function must have exactly n=" +
             std::to_string(n) + " parts (got " +
             std::to_string(psi.coordinate_count()) + ")");
  }
}

Regime classify_regime(const ProblemSpec& spec) {
  if (spec.variant == Variant::Classical) return Regime::Classical;
  if (spec.m == 1) return Regime::Singleton;
  if (spec.m == 2 && spec.n == 1) return Regime::Excluded;
  if (spec.m > 2 && spec.m <= spec.n) return Regime::Hypersurface;
  if (spec.m > spec.n && spec.m + spec.n > 3) return Regime::Generic;
  return Regime::Unresolved;
}

}  // namespace smallforms
