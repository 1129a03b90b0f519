#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <vector>

#include "surfcert/error.hpp"
#include "surfcert/fields.hpp"
#include "surfcert/surfaces.hpp"

namespace surfcert {

inline constexpr double kAmbientFloor = 1e-9;

struct FieldSample {
  ChartPoint point;
  AmbientVector position;
  AmbientVector value;
};

/// A field pushed into the ambient space and normalized in the Euclidean norm.
struct AmbientFieldSamples {
  std::vector<FieldSample> points;
  bool unit_certified = false;
  /// Resolution of the chart grid the samples were taken on.
  std::array<int, 2> grid{0, 0};
};

/// Z = J X / |J X| at every grid node. X is only evaluated, never
/// differentiated, so merely continuous fields are fine. Throws
/// zero-field-point where |J X| < floor.
AmbientFieldSamples sample_unit_field(const Surface& s, const TangentField& x, const GridSampling& grid,
                                      double floor = kAmbientFloor);

/// Dense monomial basis of total degree <= d in n variables, in graded
/// lexicographic order: ascending total degree, and within one degree
/// descending exponent of x1, then of x2, and so on.
class MonomialBasis {
 public:
  MonomialBasis(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return exponents_.size(); }
  const std::vector<std::vector<int>>& exponents() const { return exponents_; }

  Eigen::VectorXd evaluate(const AmbientVector& x) const;

 private:
  int dim_;
  int degree_;
  std::vector<std::vector<int>> exponents_;
};

/// P = (P_1, ..., P_n), one polynomial per ambient component.
struct PolynomialField {
  MonomialBasis basis{3, 0};
  /// n x basis.size(); row c holds the coefficients of P_c.
  Eigen::MatrixXd coefficients;
  /// max over the verification grid of |P(x) - Z(x)|; NaN until certified.
  double sup_error = std::numeric_limits<double>::quiet_NaN();
  std::array<int, 2> fit_grid{0, 0};
  std::array<int, 2> verify_grid{0, 0};
  /// Number of monomials kept by the rank-revealing solve.
  std::size_t rank = 0;

  int ambient_dim() const { return basis.dim(); }
  int degree() const { return basis.degree(); }
  AmbientVector operator()(const AmbientVector& x) const;
};

inline constexpr double kFitRankThreshold = 1e-10;

/// Least-squares fit of each component on the samples, with monomial
/// columns scaled by their maximum magnitude. Monomials that are dependent
/// on the samples (for example through the polynomial equation of the
/// surface) are dropped at kFitRankThreshold by a complete orthogonal
/// decomposition, which returns the minimum-norm coefficients. Throws
/// rank-deficient-fit when there are fewer samples than monomials.
PolynomialField fit_polynomial_field(const AmbientFieldSamples& samples, int degree);

/// Fits on `fit` and certifies sup_error on `verify`, which must be at least
/// 4x denser per axis (else invalid-parameter).
PolynomialField fit_polynomial_field(const AmbientFieldSamples& fit, const AmbientFieldSamples& verify,
                                     int degree);

/// Measures and stores sup_error of P against the verification samples.
double certify_sup_error(PolynomialField& p, const AmbientFieldSamples& verify);

/// Orthogonal projection of an ambient vector onto the tangent plane at p.
AmbientVector tangential_projection(const Surface& s, const AmbientVector& w, ChartPoint p);
/// T(x) for P(x) = T(x) + U(x), x = embed(p).
AmbientVector tangential_projection(const Surface& s, const PolynomialField& poly, ChartPoint p);

struct SmoothOptions {
  int max_degree = 16;
  std::array<int, 2> fit_grid{64, 64};
  std::array<int, 2> verify_grid{256, 256};
  double floor = kAmbientFloor;
};

struct DegreeAttempt {
  int degree = 0;
  double sup_error = 0.0;
  std::size_t basis_size = 0;
  std::size_t rank = 0;
};

struct SmoothedFieldReport {
  int final_degree = 0;
  double sup_error = 0.0;
  double min_tangential_norm = 0.0;
  double target = 0.5;
  /// max |<T, U>| over the verification grid.
  double max_orthogonality_defect = 0.0;
  bool pass = false;
  std::vector<DegreeAttempt> attempts;
};

struct SmoothedField {
  SmoothedFieldReport report;
  PolynomialField polynomial;
  /// Chart coefficients g^-1 J^T P(embed(p)) of the tangential part T.
  TangentField field;
};

class BudgetNotMet : public Error {
 public:
  explicit BudgetNotMet(SmoothedFieldReport report);
  const SmoothedFieldReport& report() const { return report_; }

 private:
  SmoothedFieldReport report_;
};

/// Degrees tried by smooth_field: 2, 4, ... up to max_degree, ending with
/// max_degree itself when it is odd or below 2.
std::vector<int> degree_schedule(int max_degree);

/// Replaces a continuous nowhere-zero field by the tangential part of a
/// polynomial approximation of its unit field. Escalates the degree until
/// the certified sup error is below 1/2; throws BudgetNotMet (carrying the
/// report of the best attempt) otherwise.
SmoothedField smooth_field(const Surface& s, const TangentField& x, const SmoothOptions& opts = {});

/// Plain-text coefficient file: a header with ambient_dim, degree and the
/// grlex ordering, then one row of 17-significant-digit coefficients per
/// ambient component.
void write_polynomial_field(std::ostream& out, const PolynomialField& p);
PolynomialField read_polynomial_field(std::istream& in);

}  // namespace surfcert
