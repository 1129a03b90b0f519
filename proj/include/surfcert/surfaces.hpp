#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace surfcert {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using AmbientVector = Eigen::VectorXd;

struct ChartPoint {
  double u = 0.0;
  double v = 0.0;
};

struct ChartAxis {
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = false;

  double length() const { return hi - lo; }
};

struct ChartRect {
  ChartAxis u;
  ChartAxis v;

  /// Periodic axes accept any coordinate; closed axes require lo <= x <= hi.
  bool contains(ChartPoint p) const;
};

enum class SurfaceKind { sphere, torus, clifford_torus, ellipsoid };

/// How a surface produces derivatives of its embedding. Fixed per surface
/// so that a run is entirely analytic or entirely finite-difference.
class DerivativeMode {
 public:
  enum class Kind { analytic, finite_difference };

  static DerivativeMode analytic() { return DerivativeMode(Kind::analytic, 0.0); }
  static DerivativeMode finite_difference(double step = 1e-3);

  Kind kind() const { return kind_; }
  bool is_analytic() const { return kind_ == Kind::analytic; }
  /// Stencil step; zero in analytic mode.
  double step() const { return step_; }

 private:
  DerivativeMode(Kind kind, double step) : kind_(kind), step_(step) {}
  Kind kind_;
  double step_;
};

inline constexpr double kDegenerateDet = 1e-12;
inline constexpr double kPoleGuard = 1e-3;

/// First fundamental form and its partial derivatives at a chart point.
/// dg[i] = d g / d x^i; ddg is indexed by (number of v derivatives), so
/// ddg[0] = g_uu, ddg[1] = g_uv, ddg[2] = g_vv.
struct MetricData {
  Mat2 g = Mat2::Zero();
  Mat2 g_inv = Mat2::Zero();
  std::array<Mat2, 2> dg{Mat2::Zero(), Mat2::Zero()};
  std::array<Mat2, 3> ddg{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  double det = 0.0;

  const Mat2& second(int i, int j) const { return ddg[static_cast<std::size_t>(i + j)]; }
};

/// An explicitly embedded compact surface with a single global chart.
class Surface {
 public:
  const std::string& name() const { return name_; }
  SurfaceKind kind() const { return kind_; }
  std::span<const double> params() const { return params_; }
  int ambient_dim() const { return ambient_dim_; }
  const ChartRect& chart() const { return chart_; }
  DerivativeMode mode() const { return mode_; }
  std::optional<int> known_chi() const { return known_chi_; }

  /// Same geometry, different derivative backend.
  Surface with_mode(DerivativeMode mode) const;

  AmbientVector embed(ChartPoint p) const;
  /// n x 2 matrix whose columns are d embed / du and d embed / dv.
  Eigen::MatrixXd jacobian(ChartPoint p) const;
  /// Metric only, without derivatives. Throws degenerate-metric.
  Mat2 metric_tensor(ChartPoint p) const;
  /// Metric with first and second partials. Throws degenerate-metric.
  MetricData metric_at(ChartPoint p) const;
  /// Metric with first partials only; second partials are left zero.
  MetricData metric_first_order(ChartPoint p) const;

  /// The closed-form embedding for any scalar type (double, long double, Jet).
  template <class T>
  std::array<T, 4> embed_generic(const T& u, const T& v) const;

 private:
  friend Surface make_surface(SurfaceKind, std::span<const double>, DerivativeMode);
  Surface() = default;

  // Embedding partials d^(a+b) x / du^a dv^b, stored at Jet<3>::index(a, b).
  using EmbeddingDerivatives = std::array<AmbientVector, 10>;
  EmbeddingDerivatives embedding_derivatives(ChartPoint p, int order) const;
  MetricData assemble(const EmbeddingDerivatives& x, int order, ChartPoint p) const;
  void check_in_chart(ChartPoint p) const;

  std::string name_;
  SurfaceKind kind_ = SurfaceKind::sphere;
  std::vector<double> params_;
  int ambient_dim_ = 3;
  ChartRect chart_;
  DerivativeMode mode_ = DerivativeMode::analytic();
  std::optional<int> known_chi_;
  // Shared by copies; a new geometry or backend gets a new id. Keys the
  // per-thread memo of finite-difference embedding partials.
  std::uint64_t id_ = 0;
};

/// Builds one of the built-in surfaces. Parameters:
///   sphere: r;  torus: R, r (R > r);  clifford_torus: r;  ellipsoid: a, b, c.
/// Throws invalid-parameter for wrong counts, non-positive values or R <= r.
Surface make_surface(SurfaceKind kind, std::span<const double> params,
                     DerivativeMode mode = DerivativeMode::analytic());

inline Surface make_surface(SurfaceKind kind, std::initializer_list<double> params,
                            DerivativeMode mode = DerivativeMode::analytic()) {
  return make_surface(kind, std::span<const double>(params.begin(), params.size()), mode);
}

std::string_view to_string(SurfaceKind kind);

/// Tensor-product quadrature grid over the chart. Points are stored with
/// the u index outermost: points[i * nv + j].
struct GridSampling {
  int nu = 0;
  int nv = 0;
  std::vector<ChartPoint> points;
  std::vector<double> weights;
  /// "periodic-trapezoid" when both axes are periodic, else "gauss-legendre-mixed".
  std::string rule;

  std::size_t size() const { return points.size(); }
};

/// Periodic axes use the trapezoid rule with the endpoint excluded; closed
/// axes use Gauss-Legendre nodes, so chart boundaries are never evaluated.
GridSampling chart_grid(const Surface& s, int nu, int nv);

/// Indices of grid nodes at least `delta` away from every closed chart edge.
std::vector<std::size_t> guarded_indices(const Surface& s, const GridSampling& grid,
                                         double delta = kPoleGuard);

// ---------------------------------------------------------------------------

template <class T>
std::array<T, 4> Surface::embed_generic(const T& u, const T& v) const {
  using std::cos;
  using std::sin;
  const auto p = [this](std::size_t i) { return T(params_[i]); };
  switch (kind_) {
    case SurfaceKind::sphere: {
      const T su = sin(u);
      return {p(0) * su * cos(v), p(0) * su * sin(v), p(0) * cos(u), T(0.0)};
    }
    case SurfaceKind::ellipsoid: {
      const T su = sin(u);
      return {p(0) * su * cos(v), p(1) * su * sin(v), p(2) * cos(u), T(0.0)};
    }
    case SurfaceKind::torus: {
      const T ring = p(0) + p(1) * cos(v);
      return {ring * cos(u), ring * sin(u), p(1) * sin(v), T(0.0)};
    }
    case SurfaceKind::clifford_torus: {
      using std::sqrt;
      const T s = p(0) / sqrt(T(2.0));
      return {s * cos(u), s * sin(u), s * cos(v), s * sin(v)};
    }
  }
  return {};
}

}  // namespace surfcert
