#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "surfcert/fields.hpp"

namespace surfcert {

/// Parsed scalar expression in the chart coordinates u and v.
///
/// Grammar (whitespace ignored):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | primary
///   primary := number | 'u' | 'v' | 'pi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
class Expression {
 public:
  struct Node;

  /// Throws config-error on malformed input.
  static Expression parse(std::string_view text);

  double operator()(double u, double v) const;
  Jet<1> operator()(const Jet<1>& u, const Jet<1>& v) const;

  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

/// Field with coefficients given by two expressions; exact partials are
/// propagated through the expression tree.
TangentField field_from_expressions(const Expression& coeff_u, const Expression& coeff_v);

/// Parses "expr_u,expr_v" (one top-level comma). Throws config-error.
TangentField parse_field_expression(std::string_view text);

}  // namespace surfcert
