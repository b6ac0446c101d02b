#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace smallforms {

// Single exception type carrying a machine-readable kind tag next to the
// human-readable message.  The kind strings are part of the CLI's JSON error
// contract, so they are centralized below rather than scattered as literals.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

namespace errkind {
inline constexpr const char* range = "range_error";
inline constexpr const char* dimension_mismatch = "dimension_mismatch";
inline constexpr const char* invalid_argument = "invalid_argument";
inline constexpr const char* domain = "domain_error";
inline constexpr const char* singular_top_block = "singular_top_block";
inline constexpr const char* membership_violation = "membership_violation";
inline constexpr const char* lift_precondition = "lift_precondition";
inline constexpr const char* regime = "regime_error";
inline constexpr const char* budget_exceeded = "budget_exceeded";
inline constexpr const char* parse = "parse_error";
inline constexpr const char* io = "io_error";
inline constexpr const char* internal = "internal_error";
}  // namespace errkind

[[noreturn]] inline void fail(const char* kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace smallforms
