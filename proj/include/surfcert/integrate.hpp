#pragma once

#include <string>

#include "surfcert/fields.hpp"
#include "surfcert/surfaces.hpp"

namespace surfcert {

struct IntegralResult {
  double value = 0.0;
  int nu = 0;
  int nv = 0;
  std::string rule;
  /// |value - value on the (nu/2, nv/2) grid|.
  double estimated_error = 0.0;
};

struct ChiEstimate {
  /// Integral of K dA divided by 2 pi.
  double raw = 0.0;
  int rounded = 0;
  /// |raw - rounded|, at most 1/2.
  double margin = 0.0;
};

inline constexpr double kChiMargin = 0.01;

/// Sum of weight * f * sqrt(det g) over the grid, with a grid-halving
/// error estimate. Summation runs in grid order with compensation, so the
/// result does not depend on the thread count.
IntegralResult surface_integral(const Surface& s, const ScalarField::Eval& f, const GridSampling& grid);

/// Integral of the Gauss curvature against the area element.
IntegralResult curvature_integral(const Surface& s, const GridSampling& grid);

/// Rounds an integral of K dA to an Euler characteristic; never throws.
ChiEstimate chi_from_integral(double integral_of_k);

/// Gauss-Bonnet estimate of chi. Throws chi-indeterminate when the
/// rounding margin is not below kChiMargin.
ChiEstimate euler_characteristic(const Surface& s, const GridSampling& grid);

/// The integral of div(X) dA; zero on a closed surface, so |value| is the residual.
IntegralResult divergence_theorem_residual(const Surface& s, const TangentField& x,
                                           const GridSampling& grid);

}  // namespace surfcert
