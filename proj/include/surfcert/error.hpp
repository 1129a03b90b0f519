#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfcert {

enum class ErrorKind {
  invalid_parameter,
  degenerate_metric,
  zero_field_point,
  not_unit_field,
  chi_indeterminate,
  rank_deficient_fit,
  budget_not_met,
  config_error,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid-parameter";
    case ErrorKind::degenerate_metric: return "degenerate-metric";
    case ErrorKind::zero_field_point: return "zero-field-point";
    case ErrorKind::not_unit_field: return "not-unit-field";
    case ErrorKind::chi_indeterminate: return "chi-indeterminate";
    case ErrorKind::rank_deficient_fit: return "rank-deficient-fit";
    case ErrorKind::budget_not_met: return "budget-not-met";
    case ErrorKind::config_error: return "config-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace surfcert
