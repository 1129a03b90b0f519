#pragma once

#include <vector>

namespace surfcert {

struct QuadratureRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b]. Nodes are strictly interior.
QuadratureRule1D gauss_legendre(int n, double a, double b);

/// n-point trapezoidal rule on the periodic interval [a, b); the endpoint b
/// is identified with a and therefore excluded.
QuadratureRule1D periodic_trapezoid(int n, double a, double b);

}  // namespace surfcert
