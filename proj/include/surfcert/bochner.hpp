#pragma once

#include <string>

#include "surfcert/fields.hpp"
#include "surfcert/operators.hpp"
#include "surfcert/surfaces.hpp"

namespace surfcert {

/// Absolute residual |LHS - RHS| of a pointwise identity.
struct IdentityResidual {
  std::string name;
  ChartPoint point;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

IdentityResidual make_residual(std::string name, ChartPoint p, double value, double tolerance);

/// Default pass threshold: 1e-6 for analytic surfaces, 1e-3 for finite differences.
double identity_tolerance(const Surface& s);

inline constexpr double kUnitTolerance = 1e-8;

/// Throws not-unit-field unless |g(T, T) - 1| <= kUnitTolerance at p.
void require_unit(const Surface& s, const TangentField& t, ChartPoint p);

/// T = X / g(X, X)^(1/2). Evaluation throws zero-field-point where the
/// g-norm of X is below `floor`. Exact partials are carried over from X.
TangentField normalize_field(const Surface& s, const TangentField& x, double floor);

/// X(div X) = -Ric(X, X) + div(nabla_X X) - trace(A_X^2).
IdentityResidual bochner_residual_at(const Surface& s, const TangentField& x, ChartPoint p);
IdentityResidual bochner_residual_at(const Surface& s, const TangentField& x, ChartPoint p,
                                     double tolerance);

/// trace(A_T^2) = (div T)^2 for a unit field T.
IdentityResidual trace_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p);
IdentityResidual trace_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p,
                                            double tolerance);

/// The matrix of A_T in the orthonormal basis (T, E). Its first row
/// vanishes for unit T since g(nabla_w T, T) = 0.
Mat2 orthonormal_a_matrix(const Surface& s, const TangentField& t, ChartPoint p);

/// Y = nabla_T T - div(T) T, defined wherever T is unit.
TangentField construct_y_field(const Surface& s, const TangentField& t);

/// K = div(Y) for the field built by construct_y_field.
IdentityResidual curvature_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p);
IdentityResidual curvature_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p,
                                                double tolerance);

/// (div T)^2 = div(div(T) T) - T(div T).
IdentityResidual divergence_square_residual_at(const Surface& s, const TangentField& t, ChartPoint p);
IdentityResidual divergence_square_residual_at(const Surface& s, const TangentField& t, ChartPoint p,
                                               double tolerance);

/// div(f X) = X(f) + f div(X).
IdentityResidual product_rule_residual_at(const Surface& s, const ScalarField& f, const TangentField& x,
                                          ChartPoint p, double tolerance);

}  // namespace surfcert
