#include "surfcert/approx.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "surfcert/error.hpp"
#include "surfcert/operators.hpp"

using namespace surfcert;

namespace {

const Surface kTorus = make_surface(SurfaceKind::torus, {2.0, 1.0});
const Surface kClifford = make_surface(SurfaceKind::clifford_torus, {1.0});

AmbientVector torus_normal(ChartPoint p) {
  AmbientVector n(3);
  n << std::cos(p.v) * std::cos(p.u), std::cos(p.v) * std::sin(p.u), std::sin(p.v);
  return n;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::config_error;
}

}  // namespace

TEST_CASE("sample_unit_field pushes and normalizes") {
  const auto grid = chart_grid(kTorus, 8, 8);
  const AmbientFieldSamples du = sample_unit_field(kTorus, fields::coordinate_u(), grid);
  CHECK(du.unit_certified);
  CHECK(du.grid == std::array<int, 2>{8, 8});
  // Node 0 is (u, v) = (0, 0).
  CHECK((du.points[0].value - Eigen::Vector3d(0, 1, 0)).norm() < 1e-15);
  const AmbientFieldSamples dv = sample_unit_field(kTorus, fields::coordinate_v(), grid);
  CHECK((dv.points[0].value - Eigen::Vector3d(0, 0, 1)).norm() < 1e-15);
  for (const FieldSample& f : sample_unit_field(kTorus, fields::kinked(), grid).points) {
    CHECK(std::abs(f.value.norm() - 1.0) < 1e-12);
    CHECK(std::abs(f.value.dot(torus_normal(f.point))) < 1e-10);
  }
  const TangentField vanishing([](ChartPoint p) { return Vec2(std::sin(p.u), 0.0); });
  CHECK(kind_of([&] { sample_unit_field(kTorus, vanishing, grid); }) == ErrorKind::zero_field_point);
}

TEST_CASE("monomial basis uses graded lexicographic order") {
  const MonomialBasis b(3, 2);
  REQUIRE(b.size() == 10);
  const std::vector<std::vector<int>> expected = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0},
                                                  {1, 1, 0}, {1, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  CHECK(b.exponents() == expected);
  Eigen::Vector3d x(2.0, 3.0, 5.0);
  const Eigen::VectorXd m = b.evaluate(x);
  CHECK(m[5] == 6.0);
  CHECK(m[9] == 25.0);
  // Basis sizes are binomial(n + d, d).
  CHECK(MonomialBasis(4, 16).size() == 4845);
  CHECK(MonomialBasis(3, 16).size() == 969);
  CHECK_THROWS_AS(MonomialBasis(3, -1), Error);
}

TEST_CASE("fit recovers fields that are polynomial in the ambient coordinates") {
  // On the Clifford torus, du pushes to (-y, x, 0, 0) up to a constant factor.
  const auto fit = sample_unit_field(kClifford, fields::coordinate_u(), chart_grid(kClifford, 16, 16));
  const auto verify = sample_unit_field(kClifford, fields::coordinate_u(), chart_grid(kClifford, 64, 64));
  const PolynomialField p = fit_polynomial_field(fit, verify, 1);
  CHECK(p.sup_error < 1e-8);
  CHECK(p.verify_grid == std::array<int, 2>{64, 64});
  CHECK(p.fit_grid == std::array<int, 2>{16, 16});
}

TEST_CASE("degree zero fit of a non-constant field has positive error") {
  const auto fit = sample_unit_field(kTorus, fields::coordinate_u(), chart_grid(kTorus, 16, 16));
  const auto verify = sample_unit_field(kTorus, fields::coordinate_u(), chart_grid(kTorus, 64, 64));
  CHECK(fit_polynomial_field(fit, verify, 0).sup_error > 0.5);
}

TEST_CASE("fit preconditions") {
  const auto fit = sample_unit_field(kTorus, fields::coordinate_u(), chart_grid(kTorus, 16, 16));
  const auto too_coarse = sample_unit_field(kTorus, fields::coordinate_u(), chart_grid(kTorus, 32, 64));
  CHECK(kind_of([&] { fit_polynomial_field(fit, too_coarse, 2); }) == ErrorKind::invalid_parameter);
  const auto few = sample_unit_field(kTorus, fields::coordinate_u(), chart_grid(kTorus, 4, 4));
  CHECK(kind_of([&] { fit_polynomial_field(few, 6); }) == ErrorKind::rank_deficient_fit);
  CHECK(kind_of([] { fit_polynomial_field(AmbientFieldSamples{}, 2); }) == ErrorKind::invalid_parameter);
  const PolynomialField uncertified = fit_polynomial_field(fit, 2);
  CHECK(std::isnan(uncertified.sup_error));
}

TEST_CASE("the surface equation shows up as dropped monomials") {
  // The torus quartic (|x|^2 + R^2 - r^2)^2 = 4 R^2 (x^2 + y^2) makes one degree-4
  // monomial combination vanish on the samples.
  const auto fit = sample_unit_field(kTorus, fields::coordinate_u(), chart_grid(kTorus, 32, 32));
  CHECK(fit_polynomial_field(fit, 2).rank == 10);
  CHECK(fit_polynomial_field(fit, 4).rank == 34);
  CHECK(fit_polynomial_field(fit, 6).rank == 74);
}

TEST_CASE("tangential projection examples") {
  for (const ChartPoint p : chart_grid(kTorus, 8, 8).points) {
    const AmbientVector n = torus_normal(p);
    CHECK(tangential_projection(kTorus, n, p).norm() < 1e-14);
    const AmbientVector z = kTorus.jacobian(p) * Vec2(1.0, 0.5);
    const AmbientVector zu = z / z.norm();
    CHECK((tangential_projection(kTorus, zu, p) - zu).norm() < 1e-14);
    const AmbientVector t = tangential_projection(kTorus, AmbientVector(zu + 0.3 * n), p);
    CHECK((t - zu).norm() < 1e-14);
    CHECK(t.norm() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(tangential_projection(make_surface(SurfaceKind::sphere, {1.0}), AmbientVector::Ones(3), {1e-8, 0.0}),
                  Error);
}

TEST_CASE("projection residual is orthogonal to the tangent plane") {
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  for (const Surface& s : {kTorus, kClifford, make_surface(SurfaceKind::ellipsoid, {1.0, 1.3, 0.7})}) {
    const GridSampling grid = chart_grid(s, 8, 8);
    for (const std::size_t i : guarded_indices(s, grid)) {
      const ChartPoint p = grid.points[i];
      AmbientVector w(s.ambient_dim());
      for (int c = 0; c < s.ambient_dim(); ++c) w[c] = n(rng);
      const AmbientVector t = tangential_projection(s, w, p);
      const Eigen::MatrixXd j = s.jacobian(p);
      CHECK(std::abs((t - w).dot(j.col(0))) < 1e-10);
      CHECK(std::abs((t - w).dot(j.col(1))) < 1e-10);
      CHECK(t.norm() <= w.norm() + 1e-12);
    }
  }
}

TEST_CASE("degree schedule") {
  CHECK(degree_schedule(16) == std::vector<int>{2, 4, 6, 8, 10, 12, 14, 16});
  CHECK(degree_schedule(5) == std::vector<int>{2, 4, 5});
  CHECK(degree_schedule(0) == std::vector<int>{0});
  CHECK(degree_schedule(1) == std::vector<int>{1});
}

TEST_CASE("smoothing a smooth field passes at low degree") {
  const SmoothedField sf = smooth_field(kTorus, fields::coordinate_u());
  CHECK(sf.report.pass);
  CHECK(sf.report.final_degree <= 6);
  CHECK(sf.report.min_tangential_norm > 0.5);
  CHECK(sf.polynomial.verify_grid == std::array<int, 2>{256, 256});
}

TEST_CASE("smoothing the kinked field certifies a nowhere-zero smooth field") {
  const SmoothedField sf = smooth_field(kTorus, fields::kinked());
  const SmoothedFieldReport& r = sf.report;
  CHECK(r.pass);
  CHECK(r.final_degree <= 16);
  CHECK(r.sup_error < 0.5);
  CHECK(r.min_tangential_norm > 0.5);
  CHECK(r.min_tangential_norm > 1.0 - r.sup_error - 1e-9);
  CHECK(r.max_orthogonality_defect < 1e-10);
  CHECK(r.attempts.back().degree == r.final_degree);
  for (std::size_t k = 1; k < r.attempts.size(); ++k) CHECK(r.attempts[k].degree == r.attempts[k - 1].degree + 2);

  // The chart field reproduces T, and its g-norm is the ambient norm of T.
  for (const ChartPoint p : chart_grid(kTorus, 16, 16).points) {
    const AmbientVector t = tangential_projection(kTorus, sf.polynomial, p);
    const Vec2 a = sf.field(p);
    CHECK((kTorus.jacobian(p) * a - t).norm() < 1e-12);
    CHECK(norm_g(kTorus.metric_tensor(p), a) > 0.5);
  }
}

TEST_CASE("smoothed field is differentiable") {
  // Stencil derivatives of the output converge like a smooth function:
  // halving the step shrinks the change by at least 4x (order >= 2).
  const SmoothedField sf = smooth_field(kTorus, fields::kinked());
  for (const ChartPoint p : {ChartPoint{0.3, 0.7}, ChartPoint{1.5707963, 2.0}, ChartPoint{4.0, 5.5}}) {
    const Mat2 d1 = numeric_jet(sf.field, p, 1e-2).jacobian;
    const Mat2 d2 = numeric_jet(sf.field, p, 5e-3).jacobian;
    const Mat2 d3 = numeric_jet(sf.field, p, 2.5e-3).jacobian;
    const double change1 = (d1 - d2).norm(), change2 = (d2 - d3).norm();
    INFO(change1, " ", change2);
    CHECK((change2 < 1e-12 || change1 / change2 >= 4.0));
  }
}

TEST_CASE("max degree zero cannot meet the budget") {
  try {
    SmoothOptions opts;
    opts.max_degree = 0;
    smooth_field(kTorus, fields::coordinate_u(), opts);
    FAIL("expected budget-not-met");
  } catch (const BudgetNotMet& e) {
    CHECK(e.kind() == ErrorKind::budget_not_met);
    CHECK_FALSE(e.report().pass);
    CHECK(e.report().sup_error >= 0.5);
    REQUIRE(e.report().attempts.size() == 1);
    CHECK(e.report().attempts[0].degree == 0);
  }
}

TEST_CASE("smoothing is generic in the ambient dimension") {
  const SmoothedField sf = smooth_field(kClifford, fields::kinked());
  CHECK(sf.polynomial.ambient_dim() == 4);
  CHECK(sf.report.pass);
  CHECK(sf.report.min_tangential_norm > 0.5);
  CHECK(sf.report.max_orthogonality_defect < 1e-10);
}

TEST_CASE("coefficient file round trip") {
  const SmoothedField sf = smooth_field(kTorus, fields::kinked());
  std::stringstream buffer;
  write_polynomial_field(buffer, sf.polynomial);
  const std::string text = buffer.str();
  CHECK(text.rfind("polynomial_field 1\nambient_dim 3\n", 0) == 0);
  CHECK(text.find("ordering grlex") != std::string::npos);
  const PolynomialField back = read_polynomial_field(buffer);
  CHECK(back.degree() == sf.polynomial.degree());
  CHECK(back.sup_error == sf.polynomial.sup_error);
  CHECK(back.coefficients == sf.polynomial.coefficients);

  std::stringstream bad("polynomial_field 1\nambient_dim 3\ndegree 2\nordering lex\n");
  CHECK_THROWS_AS(read_polynomial_field(bad), Error);
}
