#include "smallforms/dimension_function.hpp"

#include <cmath>

#include "smallforms/errors.hpp"

namespace smallforms {

const char* limit_behavior_name(LimitBehavior b) {
  switch (b) {
    case LimitBehavior::Zero:
      return "zero";
    case LimitBehavior::PositiveConstant:
      return "positive-constant";
    case LimitBehavior::Infinity:
      return "infinity";
  }
  return "unknown";
}

DimensionFunction::DimensionFunction(double s, double kappa) : s_(s), kappa_(kappa) {
  if (!(s > 0.0 || (s == 0.0 && kappa > 0.0))) {
    fail(errkind::invalid_argument,
         "dimension function must vanish increasingly at 0: need s > 0, or s = 0 "
         "with kappa > 0 (got s=" + std::to_string(s) + ", kappa=" + std::to_string(kappa) + ")");
  }
}

double DimensionFunction::eval(double r) const {
  if (!(r > 0.0)) {
    fail(errkind::domain, "dimension function argument must be positive");
  }
  if (kappa_ != 0.0 && r >= 1.0) {
    fail(errkind::domain,
         "dimension function with log factor is only defined on (0, 1)");
  }
  double value = std::pow(r, s_);
  if (kappa_ != 0.0) value *= std::pow(std::log(1.0 / r), -kappa_);
  return value;
}

bool DimensionFunction::scaled_is_dimension_function(double k) const {
  double a = s_ - k;
  return a > 0.0 || (a == 0.0 && kappa_ > 0.0);
}

LimitBehavior DimensionFunction::scaled_limit(double k) const {
  double a = s_ - k;
  if (a > 0.0) return LimitBehavior::Zero;
  if (a < 0.0) return LimitBehavior::Infinity;
  if (kappa_ > 0.0) return LimitBehavior::Zero;
  if (kappa_ < 0.0) return LimitBehavior::Infinity;
  return LimitBehavior::PositiveConstant;
}

DimensionFunction DimensionFunction::scaled(double k, const std::string& context) const {
  if (!scaled_is_dimension_function(k)) {
    fail(errkind::invalid_argument,
         context + " is not a dimension function: scaled power s-k=" +
             std::to_string(s_ - k) + " with kappa=" + std::to_string(kappa_) +
             " does not vanish increasingly at 0");
  }
  return DimensionFunction(s_ - k, kappa_);
}

}  // namespace smallforms
