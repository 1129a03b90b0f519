#include "surfcert/operators.hpp"

#include <cmath>

namespace surfcert {

namespace {

// Lowered symbols Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij).
double lowered(const MetricData& m, int l, int i, int j) {
  return 0.5 * (m.dg[i](j, l) + m.dg[j](i, l) - m.dg[l](i, j));
}

// d_q Gamma_{l,ij}.
double lowered_derivative(const MetricData& m, int q, int l, int i, int j) {
  return 0.5 * (m.second(i, q)(j, l) + m.second(j, q)(i, l) - m.second(l, q)(i, j));
}

// Registered partials are exact in either backend; only the metric is
// differentiated with the surface's stencils. Returns 0 for exact partials.
double differentiation_step(bool has_exact) { return has_exact ? 0.0 : kOuterStep; }

}  // namespace

double inner(const Mat2& g, const Vec2& a, const Vec2& b) { return a.dot(g * b); }

double norm_g(const Mat2& g, const Vec2& a) { return std::sqrt(std::max(0.0, inner(g, a, a))); }

ChristoffelSymbols christoffel_from(const MetricData& m) {
  ChristoffelSymbols c;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = i; j < 2; ++j) {
        double sum = 0.0;
        for (int l = 0; l < 2; ++l) sum += m.g_inv(k, l) * lowered(m, l, i, j);
        c.gamma[k](i, j) = sum;
        c.gamma[k](j, i) = sum;
      }
    }
  }
  return c;
}

ChristoffelSymbols christoffel_at(const Surface& s, ChartPoint p) {
  return christoffel_from(s.metric_first_order(p));
}

std::array<ChristoffelSymbols, 2> christoffel_derivatives(const MetricData& m) {
  std::array<ChristoffelSymbols, 2> out;
  for (int q = 0; q < 2; ++q) {
    const Mat2 dginv = -m.g_inv * m.dg[q] * m.g_inv;
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
          double sum = 0.0;
          for (int l = 0; l < 2; ++l) {
            sum += dginv(k, l) * lowered(m, l, i, j) + m.g_inv(k, l) * lowered_derivative(m, q, l, i, j);
          }
          out[q].gamma[k](i, j) = sum;
          out[q].gamma[k](j, i) = sum;
        }
      }
    }
  }
  return out;
}

double brioschi_curvature(const MetricData& m) {
  const double e = m.g(0, 0), f = m.g(0, 1), g = m.g(1, 1);
  const double eu = m.dg[0](0, 0), ev = m.dg[1](0, 0);
  const double fu = m.dg[0](0, 1), fv = m.dg[1](0, 1);
  const double gu = m.dg[0](1, 1), gv = m.dg[1](1, 1);
  const double evv = m.second(1, 1)(0, 0);
  const double fuv = m.second(0, 1)(0, 1);
  const double guu = m.second(0, 0)(1, 1);

  Eigen::Matrix3d a;
  a << -0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev,
       fv - 0.5 * gu, e, f,
       0.5 * gv, f, g;
  Eigen::Matrix3d b;
  b << 0.0, 0.5 * ev, 0.5 * gu,
       0.5 * ev, e, f,
       0.5 * gu, f, g;
  return (a.determinant() - b.determinant()) / (m.det * m.det);
}

double gauss_curvature_at(const Surface& s, ChartPoint p) { return brioschi_curvature(s.metric_at(p)); }

Mat2 ricci_from(const MetricData& m) {
  const ChristoffelSymbols c = christoffel_from(m);
  const auto dc = christoffel_derivatives(m);
  // R^l_{kij} = d_i G^l_jk - d_j G^l_ik + G^l_iq G^q_jk - G^l_jq G^q_ik,
  // with R(d_i, d_j) d_k = R^l_{kij} d_l, and Ric_jk = R^i_{kij}.
  const auto riemann = [&](int l, int k, int i, int j) {
    double r = dc[i](l, j, k) - dc[j](l, i, k);
    for (int q = 0; q < 2; ++q) r += c(l, i, q) * c(q, j, k) - c(l, j, q) * c(q, i, k);
    return r;
  };
  Mat2 ric = Mat2::Zero();
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) ric(j, k) += riemann(i, k, i, j);
    }
  }
  return ric;
}

Mat2 ricci_at(const Surface& s, ChartPoint p) { return ricci_from(s.metric_at(p)); }

double ricci_residual_at(const Surface& s, const TangentField& x, const TangentField& y, ChartPoint p) {
  const MetricData m = s.metric_at(p);
  const Vec2 a = x(p), b = y(p);
  return std::abs(inner(ricci_from(m), a, b) - brioschi_curvature(m) * inner(m.g, a, b));
}

FieldJet field_jet(const Surface& /*s*/, const TangentField& x, ChartPoint p) {
  const double h = differentiation_step(x.has_partials());
  return h == 0.0 ? x.jet(p) : numeric_jet(x, p, h);
}

Mat2 covariant_differential(const Surface& s, const TangentField& x, ChartPoint p) {
  const FieldJet j = field_jet(s, x, p);
  const ChristoffelSymbols c = christoffel_at(s, p);
  Mat2 out = j.jacobian;
  for (int k = 0; k < 2; ++k) out.row(k) += (c.gamma[k] * j.value).transpose();
  return out;
}

TangentCoeffs covariant_derivative(const Surface& s, const TangentField& x, const TangentCoeffs& dir,
                                   ChartPoint p) {
  return covariant_differential(s, x, p) * dir;
}

double divergence_at(const Surface& s, const TangentField& x, ChartPoint p) {
  const double h = differentiation_step(x.has_partials());
  if (h == 0.0) {
    const MetricData m = s.metric_first_order(p);
    const FieldJet j = x.jet(p);
    double div = j.jacobian.trace();
    for (int i = 0; i < 2; ++i) div += 0.5 * (m.g_inv * m.dg[i]).trace() * j.value[i];
    return div;
  }
  const auto density = [&s, &x](ChartPoint q, int axis) {
    return std::sqrt(s.metric_tensor(q).determinant()) * x(q)[axis];
  };
  double sum = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    const auto at = [&](double t) {
      ChartPoint q = p;
      (axis == 0 ? q.u : q.v) += t;
      return density(q, axis);
    };
    sum += (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
  }
  return sum / std::sqrt(s.metric_tensor(p).determinant());
}

double divergence_trace_route(const Surface& s, const TangentField& x, ChartPoint p) {
  return -a_operator_at(s, x, p).trace();
}

OperatorMatrix a_operator_at(const Surface& s, const TangentField& x, ChartPoint p) {
  return -covariant_differential(s, x, p);
}

double directional_derivative(const Surface& /*s*/, const ScalarField& f, const TangentCoeffs& dir,
                              ChartPoint p) {
  const double h = differentiation_step(f.has_gradient());
  const Vec2 grad = h == 0.0 ? f.gradient(p) : numeric_gradient(f, p, h);
  return dir.dot(grad);
}

double numeric_directional_derivative(const ScalarField::Eval& f, const TangentCoeffs& dir,
                                      ChartPoint p, double h) {
  return dir.dot(numeric_gradient(ScalarField(f), p, h));
}

}  // namespace surfcert
