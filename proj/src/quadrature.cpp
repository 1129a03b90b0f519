#include "surfcert/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "surfcert/error.hpp"

namespace surfcert {

QuadratureRule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::invalid_parameter, "gauss_legendre needs n >= 1");
  QuadratureRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Ascending order: node i is the negative root.
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule1D periodic_trapezoid(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::invalid_parameter, "periodic_trapezoid needs n >= 1");
  QuadratureRule1D rule;
  const double h = (b - a) / n;
  rule.nodes.resize(n);
  rule.weights.assign(n, h);
  for (int i = 0; i < n; ++i) rule.nodes[i] = a + i * h;
  return rule;
}

}  // namespace surfcert
