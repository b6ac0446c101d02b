#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "smallforms/rational.hpp"

namespace smallforms {

enum class ApproxFamily { PowerLog, Table, PerCoordinate };

// The approximating function psi: {1, 2, ...} -> (0, inf), required to tend
// to zero at infinity.  Three families: the parametric power-log family
// psi(r) = c * r^(-tau) * log(r+1)^(-kappa), finite tables of values, and
// per-coordinate vectors assigning one function to each of the n forms.
// The scaled function Psi(r) = psi(r)/r is exposed as a derived evaluation.
//
// Instances are immutable after construction and safe to share across
// threads.  Exact-capable instances (integer tau, kappa = 0, rational c; or
// any table, whose double entries are exact dyadic rationals) additionally
// support exact rational evaluation, which certificate checks rely on.
class ApproxFunction {
 public:
  static ApproxFunction power_log(const Rational& c, double tau, double kappa);
  static ApproxFunction power_log(double c, double tau, double kappa);
  static ApproxFunction table(std::vector<double> values, std::size_t cut_index = 1);
  static ApproxFunction per_coordinate(std::vector<ApproxFunction> parts);

  ApproxFamily family() const { return family_; }

  // Number of independent coordinate functions (1 unless PerCoordinate).
  std::size_t coordinate_count() const;

  // psi(r); Table throws Error(range_error) outside the tabulated range.
  // PerCoordinate requires coordinate selection: eval_coord.
  double eval(long long r) const;
  // Psi(r) = psi(r) / r.
  double eval_scaled(long long r) const;

  double eval_coord(std::size_t i, long long r) const;

  bool exact_capable() const;
  Rational eval_exact(long long r) const;
  Rational eval_scaled_exact(long long r) const;
  Rational eval_coord_exact(std::size_t i, long long r) const;

  // Same family with every value multiplied by a positive rational factor
  // (used for the nearest-integer problem scaled by 1/(nN)).
  ApproxFunction scaled_by(const Rational& factor) const;

  // PowerLog accessors.
  const Rational& coefficient() const;
  double coefficient_double() const;
  double tau() const;
  double kappa() const;

  // Table accessors.
  const std::vector<double>& table_values() const;
  std::size_t table_cut_index() const;

  // PerCoordinate accessor.
  const std::vector<ApproxFunction>& coordinates() const;

  bool operator==(const ApproxFunction& other) const;

 private:
  ApproxFunction() = default;

  ApproxFamily family_ = ApproxFamily::PowerLog;
  // PowerLog state.
  Rational c_;
  double c_double_ = 0.0;
  double tau_ = 0.0;
  double kappa_ = 0.0;
  bool exact_power_ = false;
  long tau_int_ = 0;
  // Table state.
  std::vector<double> values_;
  std::size_t cut_index_ = 1;
  // PerCoordinate state.
  std::vector<ApproxFunction> parts_;
};

}  // namespace smallforms
