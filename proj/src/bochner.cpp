#include "surfcert/bochner.hpp"

#include <cmath>
#include <sstream>

#include "surfcert/error.hpp"

namespace surfcert {

namespace {

TangentField levi_civita_self_derivative(const Surface& s, const TangentField& x) {
  return TangentField([s, x](ChartPoint q) -> Vec2 { return covariant_derivative(s, x, x(q), q); });
}

ScalarField::Eval divergence_function(const Surface& s, const TangentField& x) {
  return [s, x](ChartPoint q) { return divergence_at(s, x, q); };
}

}  // namespace

IdentityResidual make_residual(std::string name, ChartPoint p, double value, double tolerance) {
  return IdentityResidual{std::move(name), p, value, tolerance, value <= tolerance};
}

double identity_tolerance(const Surface& s) { return s.mode().is_analytic() ? 1e-6 : 1e-3; }

void require_unit(const Surface& s, const TangentField& t, ChartPoint p) {
  const Vec2 a = t(p);
  const double defect = std::abs(inner(s.metric_tensor(p), a, a) - 1.0);
  if (!(defect <= kUnitTolerance)) {
    std::ostringstream msg;
    msg << "|g(T,T) - 1| = " << defect << " at (" << p.u << ", " << p.v << ")";
    throw Error(ErrorKind::not_unit_field, msg.str());
  }
}

TangentField normalize_field(const Surface& s, const TangentField& x, double floor) {
  if (!(floor > 0.0)) throw Error(ErrorKind::invalid_parameter, "normalization floor must be positive");
  const auto norm_or_throw = [floor](double n, ChartPoint p) {
    if (!(n >= floor)) {
      std::ostringstream msg;
      msg << "|X|_g = " << n << " below floor " << floor << " at (" << p.u << ", " << p.v << ")";
      throw Error(ErrorKind::zero_field_point, msg.str());
    }
  };
  TangentField::Eval eval = [s, x, norm_or_throw](ChartPoint p) -> Vec2 {
    const Vec2 a = x(p);
    const double n = norm_g(s.metric_tensor(p), a);
    norm_or_throw(n, p);
    return a / n;
  };
  TangentField::JetEval jet;
  if (x.has_partials()) {
    jet = [s, x, norm_or_throw](ChartPoint p) {
      const MetricData m = s.metric_first_order(p);
      const FieldJet xj = x.jet(p);
      const Vec2& a = xj.value;
      const double n = norm_g(m.g, a);
      norm_or_throw(n, p);
      FieldJet out;
      out.value = a / n;
      for (int k = 0; k < 2; ++k) {
        const Vec2 da = xj.jacobian.col(k);
        const double dn = (2.0 * inner(m.g, a, da) + inner(m.dg[k], a, a)) / (2.0 * n);
        out.jacobian.col(k) = da / n - a * (dn / (n * n));
      }
      return out;
    };
  }
  return TangentField(std::move(eval), std::move(jet));
}

IdentityResidual bochner_residual_at(const Surface& s, const TangentField& x, ChartPoint p) {
  return bochner_residual_at(s, x, p, identity_tolerance(s));
}

IdentityResidual bochner_residual_at(const Surface& s, const TangentField& x, ChartPoint p,
                                     double tolerance) {
  const MetricData m = s.metric_at(p);
  const Vec2 a = x(p);
  const double lhs = numeric_directional_derivative(divergence_function(s, x), a, p);
  const double ric = inner(ricci_from(m), a, a);
  const double div_nabla = divergence_at(s, levi_civita_self_derivative(s, x), p);
  const OperatorMatrix op = a_operator_at(s, x, p);
  const double rhs = -ric + div_nabla - (op * op).trace();
  return make_residual("bochner", p, std::abs(lhs - rhs), tolerance);
}

IdentityResidual trace_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p) {
  return trace_identity_residual_at(s, t, p, identity_tolerance(s));
}

IdentityResidual trace_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p,
                                            double tolerance) {
  require_unit(s, t, p);
  const OperatorMatrix op = a_operator_at(s, t, p);
  const double div = divergence_at(s, t, p);
  return make_residual("trace_identity", p, std::abs((op * op).trace() - div * div), tolerance);
}

Mat2 orthonormal_a_matrix(const Surface& s, const TangentField& t, ChartPoint p) {
  require_unit(s, t, p);
  const Mat2 g = s.metric_tensor(p);
  const Vec2 tv = t(p);
  Vec2 seed = Vec2::UnitX();
  const double c = inner(g, tv, seed);
  if (c * c > (1.0 - 1e-6) * g(0, 0)) seed = Vec2::UnitY();
  Vec2 e = seed - inner(g, tv, seed) * tv;
  e /= norm_g(g, e);
  Mat2 basis;
  basis.col(0) = tv;
  basis.col(1) = e;
  // Change of basis: coordinates in (T, E) are g-inner products with T, E.
  Mat2 dual;
  dual.row(0) = (g * tv).transpose();
  dual.row(1) = (g * e).transpose();
  return dual * a_operator_at(s, t, p) * basis;
}

TangentField construct_y_field(const Surface& s, const TangentField& t) {
  return TangentField([s, t](ChartPoint q) -> Vec2 {
    require_unit(s, t, q);
    const Vec2 a = t(q);
    return covariant_derivative(s, t, a, q) - divergence_at(s, t, q) * a;
  });
}

IdentityResidual curvature_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p) {
  return curvature_identity_residual_at(s, t, p, identity_tolerance(s));
}

IdentityResidual curvature_identity_residual_at(const Surface& s, const TangentField& t, ChartPoint p,
                                                double tolerance) {
  require_unit(s, t, p);
  const double k = gauss_curvature_at(s, p);
  const double div_y = divergence_at(s, construct_y_field(s, t), p);
  return make_residual("curvature_identity", p, std::abs(k - div_y), tolerance);
}

IdentityResidual divergence_square_residual_at(const Surface& s, const TangentField& t, ChartPoint p) {
  return divergence_square_residual_at(s, t, p, identity_tolerance(s));
}

IdentityResidual divergence_square_residual_at(const Surface& s, const TangentField& t, ChartPoint p,
                                               double tolerance) {
  require_unit(s, t, p);
  const double div = divergence_at(s, t, p);
  const TangentField scaled([s, t](ChartPoint q) -> Vec2 { return divergence_at(s, t, q) * t(q); });
  const double div_scaled = divergence_at(s, scaled, p);
  const double along = numeric_directional_derivative(divergence_function(s, t), t(p), p);
  return make_residual("divergence_square", p, std::abs(div * div - div_scaled + along), tolerance);
}

IdentityResidual product_rule_residual_at(const Surface& s, const ScalarField& f, const TangentField& x,
                                          ChartPoint p, double tolerance) {
  const TangentField product([f, x](ChartPoint q) -> Vec2 { return f(q) * x(q); });
  const double lhs = divergence_at(s, product, p);
  const double rhs = directional_derivative(s, f, x(p), p) + f(p) * divergence_at(s, x, p);
  return make_residual("product_rule", p, std::abs(lhs - rhs), tolerance);
}

}  // namespace surfcert
