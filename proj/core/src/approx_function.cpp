#include "smallforms/approx_function.hpp"

#include <cmath>
#include <string>

#include "smallforms/errors.hpp"

namespace smallforms {

namespace {

void check_tends_to_zero(const Rational& c, double tau, double kappa) {
  if (c <= 0) {
    fail(errkind::invalid_argument, "power-log coefficient must be positive");
  }
  if (!(tau > 0.0 || (tau == 0.0 && kappa > 0.0))) {
    fail(errkind::invalid_argument,
         "power-log approximating function must tend to zero: need tau > 0, "
         "or tau = 0 with kappa > 0 (got tau=" +
             std::to_string(tau) + ", kappa=" + std::to_string(kappa) + ")");
  }
}

}  // namespace

ApproxFunction ApproxFunction::power_log(const Rational& c, double tau, double kappa) {
  check_tends_to_zero(c, tau, kappa);
  ApproxFunction f;
  f.family_ = ApproxFamily::PowerLog;
  f.c_ = c;
  f.c_double_ = to_double(c);
  f.tau_ = tau;
  f.kappa_ = kappa;
  f.exact_power_ = (kappa == 0.0) && (tau == std::floor(tau)) &&
                   std::fabs(tau) <= 1e6;
  if (f.exact_power_) f.tau_int_ = static_cast<long>(tau);
  return f;
}

ApproxFunction ApproxFunction::power_log(double c, double tau, double kappa) {
  // A double is an exact dyadic rational, so this stays exact-capable.
  return power_log(Rational(c), tau, kappa);
}

ApproxFunction ApproxFunction::table(std::vector<double> values, std::size_t cut_index) {
  if (values.empty()) {
    fail(errkind::invalid_argument, "table approximating function needs at least one value");
  }
  for (double v : values) {
    if (!(v > 0.0)) {
      fail(errkind::invalid_argument, "table approximating function values must be positive");
    }
  }
  if (cut_index < 1 || cut_index > values.size()) {
    fail(errkind::invalid_argument, "table cut index out of range");
  }
  for (std::size_t i = cut_index; i + 1 <= values.size(); ++i) {
    // Entries are indexed from r = 1; positions cut_index..R must be
    // non-increasing as the finite proxy for "tending to zero".
    if (i >= 1 && i < values.size() && values[i] > values[i - 1]) {
      fail(errkind::invalid_argument,
           "table approximating function must be non-increasing beyond the cut index "
           "(violated at r=" + std::to_string(i + 1) + ")");
    }
  }
  ApproxFunction f;
  f.family_ = ApproxFamily::Table;
  f.values_ = std::move(values);
  f.cut_index_ = cut_index;
  return f;
}

ApproxFunction ApproxFunction::per_coordinate(std::vector<ApproxFunction> parts) {
  if (parts.empty()) {
    fail(errkind::invalid_argument, "per-coordinate approximating function needs parts");
  }
  for (const ApproxFunction& p : parts) {
    if (p.family_ == ApproxFamily::PerCoordinate) {
      fail(errkind::invalid_argument, "per-coordinate approximating functions cannot nest");
    }
  }
  ApproxFunction f;
  f.family_ = ApproxFamily::PerCoordinate;
  f.parts_ = std::move(parts);
  return f;
}

std::size_t ApproxFunction::coordinate_count() const {
  return family_ == ApproxFamily::PerCoordinate ? parts_.size() : 1;
}

double ApproxFunction::eval(long long r) const {
  if (r < 1) fail(errkind::range, "approximating function argument must be >= 1");
  switch (family_) {
    case ApproxFamily::PowerLog: {
      double rr = static_cast<double>(r);
      double value = c_double_ * std::pow(rr, -tau_);
      if (kappa_ != 0.0) value *= std::pow(std::log(rr + 1.0), -kappa_);
      return value;
    }
    case ApproxFamily::Table: {
      std::size_t idx = static_cast<std::size_t>(r);
      if (idx > values_.size()) {
        fail(errkind::range,
             "table approximating function index " + std::to_string(r) +
                 " outside tabulated range 1.." + std::to_string(values_.size()));
      }
      return values_[idx - 1];
    }
    case ApproxFamily::PerCoordinate:
      fail(errkind::invalid_argument,
           "per-coordinate approximating function needs a coordinate index");
  }
  fail(errkind::internal, "unreachable approximating function family");
}

double ApproxFunction::eval_scaled(long long r) const {
  return eval(r) / static_cast<double>(r);
}

double ApproxFunction::eval_coord(std::size_t i, long long r) const {
  if (family_ == ApproxFamily::PerCoordinate) {
    if (i >= parts_.size()) fail(errkind::range, "coordinate index out of range");
    return parts_[i].eval(r);
  }
  return eval(r);
}

bool ApproxFunction::exact_capable() const {
  switch (family_) {
    case ApproxFamily::PowerLog:
      return exact_power_;
    case ApproxFamily::Table:
      return true;
    case ApproxFamily::PerCoordinate:
      for (const ApproxFunction& p : parts_) {
        if (!p.exact_capable()) return false;
      }
      return true;
  }
  return false;
}

Rational ApproxFunction::eval_exact(long long r) const {
  if (r < 1) fail(errkind::range, "approximating function argument must be >= 1");
  switch (family_) {
    case ApproxFamily::PowerLog: {
      if (!exact_power_) {
        fail(errkind::domain,
             "power-log function with non-integer tau or nonzero kappa has no exact values");
      }
      return Rational(c_ * rational_pow(Rational(static_cast<long>(r)), -tau_int_));
    }
    case ApproxFamily::Table: {
      std::size_t idx = static_cast<std::size_t>(r);
      if (idx > values_.size()) {
        fail(errkind::range,
             "table approximating function index " + std::to_string(r) +
                 " outside tabulated range 1.." + std::to_string(values_.size()));
      }
      return Rational(values_[idx - 1]);
    }
    case ApproxFamily::PerCoordinate:
      fail(errkind::invalid_argument,
           "per-coordinate approximating function needs a coordinate index");
  }
  fail(errkind::internal, "unreachable approximating function family");
}

Rational ApproxFunction::eval_scaled_exact(long long r) const {
  return Rational(eval_exact(r) / Rational(static_cast<long>(r)));
}

Rational ApproxFunction::eval_coord_exact(std::size_t i, long long r) const {
  if (family_ == ApproxFamily::PerCoordinate) {
    if (i >= parts_.size()) fail(errkind::range, "coordinate index out of range");
    return parts_[i].eval_exact(r);
  }
  return eval_exact(r);
}

ApproxFunction ApproxFunction::scaled_by(const Rational& factor) const {
  if (factor <= 0) {
    fail(errkind::invalid_argument, "approximating function scale factor must be positive");
  }
  switch (family_) {
    case ApproxFamily::PowerLog:
      return power_log(Rational(c_ * factor), tau_, kappa_);
    case ApproxFamily::Table: {
      std::vector<double> scaled = values_;
      double fd = to_double(factor);
      for (double& v : scaled) v *= fd;
      return table(std::move(scaled), cut_index_);
    }
    case ApproxFamily::PerCoordinate: {
      std::vector<ApproxFunction> parts;
      parts.reserve(parts_.size());
      for (const ApproxFunction& p : parts_) parts.push_back(p.scaled_by(factor));
      return per_coordinate(std::move(parts));
    }
  }
  fail(errkind::internal, "unreachable approximating function family");
}

const Rational& ApproxFunction::coefficient() const {
  if (family_ != ApproxFamily::PowerLog) {
    fail(errkind::invalid_argument, "coefficient only defined for power-log family");
  }
  return c_;
}

double ApproxFunction::coefficient_double() const {
  if (family_ != ApproxFamily::PowerLog) {
    fail(errkind::invalid_argument, "coefficient only defined for power-log family");
  }
  return c_double_;
}

double ApproxFunction::tau() const {
  if (family_ != ApproxFamily::PowerLog) {
    fail(errkind::invalid_argument, "tau only defined for power-log family");
  }
  return tau_;
}

double ApproxFunction::kappa() const {
  if (family_ != ApproxFamily::PowerLog) {
    fail(errkind::invalid_argument, "kappa only defined for power-log family");
  }
  return kappa_;
}

const std::vector<double>& ApproxFunction::table_values() const {
  if (family_ != ApproxFamily::Table) {
    fail(errkind::invalid_argument, "table values only defined for table family");
  }
  return values_;
}

std::size_t ApproxFunction::table_cut_index() const {
  if (family_ != ApproxFamily::Table) {
    fail(errkind::invalid_argument, "cut index only defined for table family");
  }
  return cut_index_;
}

const std::vector<ApproxFunction>& ApproxFunction::coordinates() const {
  if (family_ != ApproxFamily::PerCoordinate) {
    fail(errkind::invalid_argument, "coordinates only defined for per-coordinate family");
  }
  return parts_;
}

bool ApproxFunction::operator==(const ApproxFunction& other) const {
  if (family_ != other.family_) return false;
  switch (family_) {
    case ApproxFamily::PowerLog:
      return c_ == other.c_ && tau_ == other.tau_ && kappa_ == other.kappa_;
    case ApproxFamily::Table:
      return values_ == other.values_ && cut_index_ == other.cut_index_;
    case ApproxFamily::PerCoordinate:
      return parts_ == other.parts_;
  }
  return false;
}

}  // namespace smallforms
