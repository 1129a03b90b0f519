#pragma once

#include <array>
#include <functional>
#include <utility>

#include "surfcert/jet.hpp"
#include "surfcert/surfaces.hpp"

namespace surfcert {

/// Chart components (X^u, X^v) of a tangent vector.
using TangentCoeffs = Vec2;

/// Field value with its chart partials: jacobian(k, i) = d X^k / d x^i.
struct FieldJet {
  Vec2 value = Vec2::Zero();
  Mat2 jacobian = Mat2::Zero();
};

/// A tangent vector field given by its two chart-coefficient functions.
/// Fields built from differentiable closed forms carry exact partials;
/// other fields (derived or merely continuous) are differentiated by
/// stencils when an operator needs their derivatives.
class TangentField {
 public:
  using Eval = std::function<Vec2(ChartPoint)>;
  using JetEval = std::function<FieldJet(ChartPoint)>;

  explicit TangentField(Eval eval, JetEval jet = {}) : eval_(std::move(eval)), jet_(std::move(jet)) {}

  /// Builds a field from a callable templated on the scalar type,
  /// f(T u, T v) -> std::array<T, 2>, registering exact partials via Jet<1>.
  template <class F>
  static TangentField from_generic(F f);

  Vec2 operator()(ChartPoint p) const { return eval_(p); }
  bool has_partials() const { return static_cast<bool>(jet_); }
  /// Exact value and partials; only valid when has_partials().
  FieldJet jet(ChartPoint p) const { return jet_(p); }

  /// Pointwise multiple c * X, keeping exact partials when present.
  TangentField scaled(double c) const;

 private:
  Eval eval_;
  JetEval jet_;
};

/// A scalar function on the chart with an optional exact gradient.
class ScalarField {
 public:
  using Eval = std::function<double(ChartPoint)>;
  using GradEval = std::function<Vec2(ChartPoint)>;

  explicit ScalarField(Eval eval, GradEval grad = {}) : eval_(std::move(eval)), grad_(std::move(grad)) {}

  template <class F>
  static ScalarField from_generic(F f);

  double operator()(ChartPoint p) const { return eval_(p); }
  bool has_gradient() const { return static_cast<bool>(grad_); }
  Vec2 gradient(ChartPoint p) const { return grad_(p); }

 private:
  Eval eval_;
  GradEval grad_;
};

/// Fourth-order central-difference partials of a field with step h.
FieldJet numeric_jet(const TangentField& x, ChartPoint p, double h);
/// Fourth-order central-difference chart gradient of a scalar with step h.
Vec2 numeric_gradient(const ScalarField& f, ChartPoint p, double h);

namespace fields {

TangentField zero();
/// The coordinate field d/du.
TangentField coordinate_u();
/// The coordinate field d/dv.
TangentField coordinate_v();
TangentField constant(double a_u, double a_v);
/// Continuous but not differentiable: (|cos u|, 1 - |cos u|). Nowhere zero;
/// on the tori it rotates between the two orthogonal coordinate directions
/// with kinks at u = pi/2 and u = 3pi/2.
TangentField kinked();

}  // namespace fields

// ---------------------------------------------------------------------------

template <class F>
TangentField TangentField::from_generic(F f) {
  Eval eval = [f](ChartPoint p) {
    const std::array<double, 2> x = f(p.u, p.v);
    return Vec2(x[0], x[1]);
  };
  JetEval jet = [f](ChartPoint p) {
    const auto x = f(Jet<1>::variable_u(p.u), Jet<1>::variable_v(p.v));
    FieldJet out;
    for (int k = 0; k < 2; ++k) {
      out.value[k] = x[static_cast<std::size_t>(k)].value();
      out.jacobian(k, 0) = x[static_cast<std::size_t>(k)].derivative(1, 0);
      out.jacobian(k, 1) = x[static_cast<std::size_t>(k)].derivative(0, 1);
    }
    return out;
  };
  return TangentField(std::move(eval), std::move(jet));
}

template <class F>
ScalarField ScalarField::from_generic(F f) {
  Eval eval = [f](ChartPoint p) { return static_cast<double>(f(p.u, p.v)); };
  GradEval grad = [f](ChartPoint p) {
    const auto x = f(Jet<1>::variable_u(p.u), Jet<1>::variable_v(p.v));
    return Vec2(x.derivative(1, 0), x.derivative(0, 1));
  };
  return ScalarField(std::move(eval), std::move(grad));
}

}  // namespace surfcert
