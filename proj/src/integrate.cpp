#include "surfcert/integrate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "surfcert/error.hpp"
#include "surfcert/operators.hpp"
#include "surfcert/parallel.hpp"
#include "surfcert/quadrature.hpp"

namespace surfcert {

namespace {

// chart_grid without its resolution floor, for the halved comparison grid.
GridSampling coarse_grid(const Surface& s, int nu, int nv) {
  const auto rule_for = [](const ChartAxis& a, int n) {
    return a.periodic ? periodic_trapezoid(n, a.lo, a.hi) : gauss_legendre(n, a.lo, a.hi);
  };
  const QuadratureRule1D ru = rule_for(s.chart().u, nu);
  const QuadratureRule1D rv = rule_for(s.chart().v, nv);
  GridSampling g;
  g.nu = nu;
  g.nv = nv;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      g.points.push_back({ru.nodes[i], rv.nodes[j]});
      g.weights.push_back(ru.weights[i] * rv.weights[j]);
    }
  }
  return g;
}

double weighted_sum(const Surface& s, const ScalarField::Eval& f, const GridSampling& grid) {
  std::vector<double> terms(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const ChartPoint p = grid.points[k];
    terms[k] = grid.weights[k] * f(p) * std::sqrt(s.metric_tensor(p).determinant());
  });
  // Neumaier summation in grid order.
  double sum = 0.0, carry = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    carry += std::abs(sum) >= std::abs(t) ? (sum - next) + t : (t - next) + sum;
    sum = next;
  }
  return sum + carry;
}

}  // namespace

IntegralResult surface_integral(const Surface& s, const ScalarField::Eval& f, const GridSampling& grid) {
  IntegralResult r;
  r.value = weighted_sum(s, f, grid);
  r.nu = grid.nu;
  r.nv = grid.nv;
  r.rule = grid.rule;
  const GridSampling coarse = coarse_grid(s, std::max(1, grid.nu / 2), std::max(1, grid.nv / 2));
  r.estimated_error = std::abs(r.value - weighted_sum(s, f, coarse));
  return r;
}

IntegralResult curvature_integral(const Surface& s, const GridSampling& grid) {
  return surface_integral(s, [&s](ChartPoint p) { return gauss_curvature_at(s, p); }, grid);
}

ChiEstimate chi_from_integral(double integral_of_k) {
  ChiEstimate chi;
  chi.raw = integral_of_k / (2.0 * std::numbers::pi);
  chi.rounded = static_cast<int>(std::lround(chi.raw));
  chi.margin = std::abs(chi.raw - chi.rounded);
  return chi;
}

ChiEstimate euler_characteristic(const Surface& s, const GridSampling& grid) {
  const ChiEstimate chi = chi_from_integral(curvature_integral(s, grid).value);
  if (!(chi.margin < kChiMargin)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "raw chi " << chi.raw << " is " << chi.margin << " from the nearest integer on "
        << grid.nu << "x" << grid.nv;
    throw Error(ErrorKind::chi_indeterminate, msg.str());
  }
  return chi;
}

IntegralResult divergence_theorem_residual(const Surface& s, const TangentField& x,
                                           const GridSampling& grid) {
  return surface_integral(s, [&s, &x](ChartPoint p) { return divergence_at(s, x, p); }, grid);
}

}  // namespace surfcert
