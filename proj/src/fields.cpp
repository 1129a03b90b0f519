#include "surfcert/fields.hpp"

#include <cmath>

namespace surfcert {

namespace {

template <class Fn>
auto central_difference(const Fn& f, ChartPoint p, int axis, double h) -> decltype(f(p)) {
  const auto shifted = [&](double t) {
    ChartPoint q = p;
    (axis == 0 ? q.u : q.v) += t;
    return f(q);
  };
  using R = decltype(f(p));
  R out = (shifted(-2.0 * h) - 8.0 * shifted(-h) + 8.0 * shifted(h) - shifted(2.0 * h)) / (12.0 * h);
  return out;
}

}  // namespace

TangentField TangentField::scaled(double c) const {
  Eval eval = [x = *this, c](ChartPoint p) -> Vec2 { return c * x(p); };
  JetEval jet;
  if (has_partials()) {
    jet = [x = *this, c](ChartPoint p) {
      FieldJet j = x.jet(p);
      j.value *= c;
      j.jacobian *= c;
      return j;
    };
  }
  return TangentField(std::move(eval), std::move(jet));
}

FieldJet numeric_jet(const TangentField& x, ChartPoint p, double h) {
  FieldJet out;
  out.value = x(p);
  for (int axis = 0; axis < 2; ++axis) {
    out.jacobian.col(axis) = central_difference(x, p, axis, h);
  }
  return out;
}

Vec2 numeric_gradient(const ScalarField& f, ChartPoint p, double h) {
  return Vec2(central_difference(f, p, 0, h), central_difference(f, p, 1, h));
}

namespace fields {

TangentField zero() { return constant(0.0, 0.0); }

TangentField coordinate_u() { return constant(1.0, 0.0); }

TangentField coordinate_v() { return constant(0.0, 1.0); }

TangentField constant(double a_u, double a_v) {
  return TangentField([a = Vec2(a_u, a_v)](ChartPoint) { return a; },
                      [a = Vec2(a_u, a_v)](ChartPoint) { return FieldJet{a, Mat2::Zero()}; });
}

TangentField kinked() {
  return TangentField([](ChartPoint p) {
    const double w = std::abs(std::cos(p.u));
    return Vec2(w, 1.0 - w);
  });
}

}  // namespace fields

}  // namespace surfcert
