#pragma once

#include <array>

#include "surfcert/fields.hpp"
#include "surfcert/surfaces.hpp"

namespace surfcert {

/// Stencil step for differentiating derived fields (fields without exact
/// partials, such as the Levi-Civita derivative of a field).
inline constexpr double kOuterStep = 1e-4;

/// Levi-Civita connection coefficients at a point: gamma[k](i, j) = Gamma^k_ij.
struct ChristoffelSymbols {
  std::array<Mat2, 2> gamma{Mat2::Zero(), Mat2::Zero()};

  double operator()(int k, int i, int j) const { return gamma[static_cast<std::size_t>(k)](i, j); }
  /// Gamma(a, b)^k = Gamma^k_ij a^i b^j.
  Vec2 contract(const Vec2& a, const Vec2& b) const {
    return Vec2(a.dot(gamma[0] * b), a.dot(gamma[1] * b));
  }
};

/// The matrix of A_X(w) = -nabla_w X in the chart basis (column i is A_X(d_i)).
using OperatorMatrix = Mat2;

ChristoffelSymbols christoffel_from(const MetricData& m);
ChristoffelSymbols christoffel_at(const Surface& s, ChartPoint p);

/// Partials of the connection coefficients: result[m] holds d Gamma / d x^m.
/// Requires second metric partials.
std::array<ChristoffelSymbols, 2> christoffel_derivatives(const MetricData& m);

/// Gauss curvature from the metric and its partials (Brioschi formula).
double brioschi_curvature(const MetricData& m);
double gauss_curvature_at(const Surface& s, ChartPoint p);

/// Ricci tensor in the chart basis, contracted from the Riemann tensor of
/// the connection; it does not use the Gauss curvature.
Mat2 ricci_from(const MetricData& m);
Mat2 ricci_at(const Surface& s, ChartPoint p);

/// |Ric(X, Y) - K g(X, Y)| at p.
double ricci_residual_at(const Surface& s, const TangentField& x, const TangentField& y, ChartPoint p);

double inner(const Mat2& g, const Vec2& a, const Vec2& b);
double norm_g(const Mat2& g, const Vec2& a);

/// Value and chart partials of X as the operators use them: registered
/// partials when the field has them (in either backend), otherwise a
/// central stencil at kOuterStep.
FieldJet field_jet(const Surface& s, const TangentField& x, ChartPoint p);

/// The covariant differential: column i is nabla_{d_i} X.
Mat2 covariant_differential(const Surface& s, const TangentField& x, ChartPoint p);

/// (nabla_dir X)^k = dir^i d_i X^k + dir^i X^j Gamma^k_ij.
TangentCoeffs covariant_derivative(const Surface& s, const TangentField& x, const TangentCoeffs& dir,
                                   ChartPoint p);

/// div X = (1 / sqrt(det g)) d_i (sqrt(det g) X^i). Fields without exact
/// partials are differentiated through the density sqrt(det g) X^i, which
/// stays regular at chart poles.
double divergence_at(const Surface& s, const TangentField& x, ChartPoint p);
/// -trace(A_X), the second route to the divergence.
double divergence_trace_route(const Surface& s, const TangentField& x, ChartPoint p);

OperatorMatrix a_operator_at(const Surface& s, const TangentField& x, ChartPoint p);

/// X(f) = X^i d_i f, using the exact gradient when f carries one.
double directional_derivative(const Surface& s, const ScalarField& f, const TangentCoeffs& dir,
                              ChartPoint p);

/// dir(f) for a scalar known only pointwise, by central differences.
double numeric_directional_derivative(const ScalarField::Eval& f, const TangentCoeffs& dir,
                                      ChartPoint p, double h = kOuterStep);

}  // namespace surfcert
