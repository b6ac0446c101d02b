#pragma once

#include <string>

namespace smallforms {

// Limit behaviour of a scaled dimension function r^(-k) f(r) as r -> 0+.
enum class LimitBehavior { Zero, PositiveConstant, Infinity };

const char* limit_behavior_name(LimitBehavior b);

// A dimension function from the power-log family,
//     f(r) = r^s * log(1/r)^(-kappa)   for r near 0,
// with kappa = 0 giving the pure power f(r) = r^s.  Valid dimension
// functions are increasing and continuous near 0 with f(r) -> 0 as r -> 0,
// which for this family means s > 0, or s = 0 with kappa > 0.
class DimensionFunction {
 public:
  DimensionFunction(double s, double kappa = 0.0);

  double s() const { return s_; }
  double kappa() const { return kappa_; }

  // f(r) for r > 0; when kappa != 0, r must lie in (0, 1) so that
  // log(1/r) > 0.  Violations throw Error(domain_error).
  double eval(double r) const;

  // Parameters of the scaled function r^(-k) f(r) (not validated).
  double scaled_s(double k) const { return s_ - k; }

  // Whether r^(-k) f(r) is itself a valid dimension function.
  bool scaled_is_dimension_function(double k) const;

  // Limit of r^(-k) f(r) as r -> 0+.
  LimitBehavior scaled_limit(double k) const;

  // The scaled function r^(-k) f(r) as a DimensionFunction; throws
  // Error(invalid_argument) naming the violated condition when it is not one.
  DimensionFunction scaled(double k, const std::string& context) const;

  bool operator==(const DimensionFunction& other) const {
    return s_ == other.s_ && kappa_ == other.kappa_;
  }

 private:
  double s_;
  double kappa_;
};

}  // namespace smallforms
