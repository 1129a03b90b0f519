#include "surfcert/surfaces.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

#include "surfcert/error.hpp"
#include "surfcert/jet.hpp"
#include "surfcert/quadrature.hpp"

namespace surfcert {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Index = Jet<3>;

std::uint64_t next_surface_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

// Fourth-order central stencils for derivative orders 0..3, offsets -3..3.
// Entry [order][offset + 3] is the weight before division by h^order.
constexpr std::array<std::array<long double, 7>, 4> kStencil{{
    {0.0L, 0.0L, 0.0L, 1.0L, 0.0L, 0.0L, 0.0L},
    {0.0L, 1.0L / 12, -8.0L / 12, 0.0L, 8.0L / 12, -1.0L / 12, 0.0L},
    {0.0L, -1.0L / 12, 16.0L / 12, -30.0L / 12, 16.0L / 12, -1.0L / 12, 0.0L},
    {1.0L / 8, -1.0L, 13.0L / 8, 0.0L, -13.0L / 8, 1.0L, -1.0L / 8},
}};

// Long double with its own trigonometric argument reduction. glibc reduces
// every long double argument with the multi-precision Payne-Hanek kernel,
// which dominates the stencil cost; chart angles are small, so a two-term
// Cody-Waite reduction by pi/2 is exact to well below long double precision.
struct Extended {
  long double x = 0.0L;

  Extended() = default;
  Extended(double d) : x(d) {}  // NOLINT: mirrors the T(double) use in embed_generic
  static Extended of(long double v) {
    Extended e;
    e.x = v;
    return e;
  }

  friend Extended operator+(Extended a, Extended b) { return of(a.x + b.x); }
  friend Extended operator-(Extended a, Extended b) { return of(a.x - b.x); }
  friend Extended operator*(Extended a, Extended b) { return of(a.x * b.x); }
  friend Extended operator/(Extended a, Extended b) { return of(a.x / b.x); }
  friend Extended operator-(Extended a) { return of(-a.x); }

  friend Extended sqrt(Extended a) { return of(std::sqrt(a.x)); }
  friend Extended sin(Extended a) { return of(reduced_sin_cos(a.x, 0)); }
  friend Extended cos(Extended a) { return of(reduced_sin_cos(a.x, 1)); }

 private:
  // Returns sin(x + shift * pi/2).
  static long double reduced_sin_cos(long double x, int shift) {
    constexpr long double kHalfPiHi = 0x1.921fb54442000p+0L;  // 40 significant bits
    constexpr long double kHalfPiLo = 7.44354748048662312358863973585e-13L;
    constexpr long double kTwoOverPi = 0.636619772367581343075535053490057448L;
    const long double k = std::nearbyint(x * kTwoOverPi);
    const long double r = (x - k * kHalfPiHi) - k * kHalfPiLo;
    const int quadrant = ((static_cast<int>(k) + shift) % 4 + 4) % 4;
    switch (quadrant) {
      case 0: return std::sin(r);
      case 1: return std::cos(r);
      case 2: return -std::sin(r);
      default: return -std::cos(r);
    }
  }
};

// Lazily evaluated 7x7 patch of embedding values around a point, in long
// double so that third-order stencils stay truncation-dominated.
class StencilPatch {
 public:
  StencilPatch(const Surface& s, ChartPoint p, long double h) : s_(s), p_(p), h_(h) {}

  const std::array<long double, 4>& at(int i, int j) {
    auto& slot = cache_[static_cast<std::size_t>(i + 3)][static_cast<std::size_t>(j + 3)];
    if (!slot.has_value()) {
      const auto u = Extended::of(static_cast<long double>(p_.u) + i * h_);
      const auto v = Extended::of(static_cast<long double>(p_.v) + j * h_);
      const auto x = s_.embed_generic<Extended>(u, v);
      slot = std::array<long double, 4>{x[0].x, x[1].x, x[2].x, x[3].x};
    }
    return *slot;
  }

  AmbientVector derivative(int a, int b) {
    std::array<long double, 4> acc{};
    for (int i = -3; i <= 3; ++i) {
      const long double wi = kStencil[static_cast<std::size_t>(a)][static_cast<std::size_t>(i + 3)];
      if (wi == 0.0L) continue;
      for (int j = -3; j <= 3; ++j) {
        const long double wj = kStencil[static_cast<std::size_t>(b)][static_cast<std::size_t>(j + 3)];
        if (wj == 0.0L) continue;
        const auto& x = at(i, j);
        for (std::size_t c = 0; c < 4; ++c) acc[c] += wi * wj * x[c];
      }
    }
    const long double scale = std::pow(h_, a + b);
    AmbientVector out(s_.ambient_dim());
    for (int c = 0; c < s_.ambient_dim(); ++c) {
      out[c] = static_cast<double>(acc[static_cast<std::size_t>(c)] / scale);
    }
    return out;
  }

 private:
  const Surface& s_;
  ChartPoint p_;
  long double h_;
  std::array<std::array<std::optional<std::array<long double, 4>>, 7>, 7> cache_{};
};

template <int N>
std::array<AmbientVector, 10> jet_derivatives(const Surface& s, ChartPoint p) {
  const auto x = s.embed_generic(Jet<N>::variable_u(p.u), Jet<N>::variable_v(p.v));
  std::array<AmbientVector, 10> out;
  for (int a = 0; a <= N; ++a) {
    for (int b = 0; a + b <= N; ++b) {
      AmbientVector d(s.ambient_dim());
      for (int c = 0; c < s.ambient_dim(); ++c) d[c] = x[static_cast<std::size_t>(c)].derivative(a, b);
      out[static_cast<std::size_t>(Index::index(a, b))] = std::move(d);
    }
  }
  return out;
}

void require_positive(std::span<const double> params, std::string_view what) {
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      std::ostringstream msg;
      msg << what << " parameters must be positive and finite";
      throw Error(ErrorKind::invalid_parameter, msg.str());
    }
  }
}

void require_count(std::span<const double> params, std::size_t n, std::string_view what) {
  if (params.size() != n) {
    std::ostringstream msg;
    msg << what << " takes " << n << " parameter(s), got " << params.size();
    throw Error(ErrorKind::invalid_parameter, msg.str());
  }
}

}  // namespace

bool ChartRect::contains(ChartPoint p) const {
  const auto inside = [](const ChartAxis& a, double x) {
    return a.periodic ? std::isfinite(x) : (x >= a.lo && x <= a.hi);
  };
  return inside(u, p.u) && inside(v, p.v);
}

DerivativeMode DerivativeMode::finite_difference(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::invalid_parameter, "finite-difference step must be positive");
  }
  return DerivativeMode(Kind::finite_difference, step);
}

std::string_view to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::sphere: return "sphere";
    case SurfaceKind::torus: return "torus";
    case SurfaceKind::clifford_torus: return "clifford_torus";
    case SurfaceKind::ellipsoid: return "ellipsoid";
  }
  return "unknown";
}

Surface make_surface(SurfaceKind kind, std::span<const double> params, DerivativeMode mode) {
  Surface s;
  s.kind_ = kind;
  s.name_ = std::string(to_string(kind));
  s.params_.assign(params.begin(), params.end());
  s.mode_ = mode;
  s.id_ = next_surface_id();
  const ChartAxis polar{0.0, std::numbers::pi, false};
  const ChartAxis angle{0.0, kTwoPi, true};
  switch (kind) {
    case SurfaceKind::sphere:
      require_count(params, 1, "sphere");
      require_positive(params, "sphere");
      s.chart_ = {polar, angle};
      s.known_chi_ = 2;
      break;
    case SurfaceKind::ellipsoid:
      require_count(params, 3, "ellipsoid");
      require_positive(params, "ellipsoid");
      s.chart_ = {polar, angle};
      s.known_chi_ = 2;
      break;
    case SurfaceKind::torus:
      require_count(params, 2, "torus");
      require_positive(params, "torus");
      if (!(params[0] > params[1])) {
        throw Error(ErrorKind::invalid_parameter, "torus requires R > r");
      }
      s.chart_ = {angle, angle};
      s.known_chi_ = 0;
      break;
    case SurfaceKind::clifford_torus:
      require_count(params, 1, "clifford_torus");
      require_positive(params, "clifford_torus");
      s.ambient_dim_ = 4;
      s.chart_ = {angle, angle};
      s.known_chi_ = 0;
      break;
  }
  return s;
}

Surface Surface::with_mode(DerivativeMode mode) const {
  Surface s = *this;
  s.mode_ = mode;
  s.id_ = next_surface_id();
  return s;
}

void Surface::check_in_chart(ChartPoint p) const {
  if (!chart_.contains(p)) {
    std::ostringstream msg;
    msg << "chart point (" << p.u << ", " << p.v << ") outside the chart of " << name_;
    throw Error(ErrorKind::invalid_parameter, msg.str());
  }
}

AmbientVector Surface::embed(ChartPoint p) const {
  const auto x = embed_generic<double>(p.u, p.v);
  AmbientVector out(ambient_dim_);
  for (int c = 0; c < ambient_dim_; ++c) out[c] = x[static_cast<std::size_t>(c)];
  return out;
}

Surface::EmbeddingDerivatives Surface::embedding_derivatives(ChartPoint p, int order) const {
  if (mode_.is_analytic()) {
    switch (order) {
      case 1: return jet_derivatives<1>(*this, p);
      case 2: return jet_derivatives<2>(*this, p);
      default: return jet_derivatives<3>(*this, p);
    }
  }
  // The operators ask for the metric at the same point several times, so
  // recent stencil results are memoized per thread.
  struct Memo {
    std::uint64_t id = 0;
    ChartPoint p;
    int order = 0;
    EmbeddingDerivatives x;
  };
  constexpr std::size_t kMemoSize = 16;
  thread_local std::array<Memo, kMemoSize> memo;
  thread_local std::size_t next = 0;
  for (const Memo& m : memo) {
    if (m.id == id_ && m.order >= order && m.p.u == p.u && m.p.v == p.v) return m.x;
  }

  StencilPatch patch(*this, p, static_cast<long double>(mode_.step()));
  EmbeddingDerivatives out;
  for (int a = 0; a <= order; ++a) {
    for (int b = 0; a + b <= order; ++b) {
      out[static_cast<std::size_t>(Index::index(a, b))] = patch.derivative(a, b);
    }
  }
  memo[next] = Memo{id_, p, order, out};
  next = (next + 1) % kMemoSize;
  return out;
}

Eigen::MatrixXd Surface::jacobian(ChartPoint p) const {
  const auto x = embedding_derivatives(p, 1);
  Eigen::MatrixXd j(ambient_dim_, 2);
  j.col(0) = x[Index::index(1, 0)];
  j.col(1) = x[Index::index(0, 1)];
  return j;
}

MetricData Surface::assemble(const EmbeddingDerivatives& x, int order, ChartPoint p) const {
  // d(i, j, ...) is the embedding partial over the listed chart axes.
  const auto d = [&x](std::initializer_list<int> axes) -> const AmbientVector& {
    int a = 0, b = 0;
    for (int ax : axes) (ax == 0 ? a : b) += 1;
    return x[static_cast<std::size_t>(Index::index(a, b))];
  };

  MetricData m;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m.g(i, j) = d({i}).dot(d({j}));
  }
  m.det = m.g(0, 0) * m.g(1, 1) - m.g(0, 1) * m.g(1, 0);
  if (!(m.det > kDegenerateDet)) {
    std::ostringstream msg;
    msg << "det g = " << m.det << " at (" << p.u << ", " << p.v << ") on " << name_;
    throw Error(ErrorKind::degenerate_metric, msg.str());
  }
  m.g_inv << m.g(1, 1), -m.g(0, 1), -m.g(1, 0), m.g(0, 0);
  m.g_inv /= m.det;

  if (order >= 2) {
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          m.dg[k](i, j) = d({i, k}).dot(d({j})) + d({i}).dot(d({j, k}));
        }
      }
    }
  }
  if (order >= 3) {
    for (int k = 0; k < 2; ++k) {
      for (int l = k; l < 2; ++l) {
        Mat2& out = m.ddg[static_cast<std::size_t>(k + l)];
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            out(i, j) = d({i, k, l}).dot(d({j})) + d({i, k}).dot(d({j, l})) +
                        d({i, l}).dot(d({j, k})) + d({i}).dot(d({j, k, l}));
          }
        }
      }
    }
  }
  return m;
}

Mat2 Surface::metric_tensor(ChartPoint p) const {
  check_in_chart(p);
  return assemble(embedding_derivatives(p, 1), 1, p).g;
}

MetricData Surface::metric_first_order(ChartPoint p) const {
  check_in_chart(p);
  return assemble(embedding_derivatives(p, 2), 2, p);
}

MetricData Surface::metric_at(ChartPoint p) const {
  check_in_chart(p);
  return assemble(embedding_derivatives(p, 3), 3, p);
}

GridSampling chart_grid(const Surface& s, int nu, int nv) {
  if (nu < 4 || nv < 4) throw Error(ErrorKind::invalid_parameter, "chart grids need nu, nv >= 4");
  const auto rule_for = [](const ChartAxis& a, int n) {
    return a.periodic ? periodic_trapezoid(n, a.lo, a.hi) : gauss_legendre(n, a.lo, a.hi);
  };
  const QuadratureRule1D ru = rule_for(s.chart().u, nu);
  const QuadratureRule1D rv = rule_for(s.chart().v, nv);

  GridSampling grid;
  grid.nu = nu;
  grid.nv = nv;
  grid.rule = (s.chart().u.periodic && s.chart().v.periodic) ? "periodic-trapezoid"
                                                              : "gauss-legendre-mixed";
  grid.points.reserve(static_cast<std::size_t>(nu) * nv);
  grid.weights.reserve(static_cast<std::size_t>(nu) * nv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      grid.points.push_back({ru.nodes[i], rv.nodes[j]});
      grid.weights.push_back(ru.weights[i] * rv.weights[j]);
    }
  }
  return grid;
}

std::vector<std::size_t> guarded_indices(const Surface& s, const GridSampling& grid, double delta) {
  const auto ok = [delta](const ChartAxis& a, double x) {
    return a.periodic || (x >= a.lo + delta && x <= a.hi - delta);
  };
  std::vector<std::size_t> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const ChartPoint p = grid.points[k];
    if (ok(s.chart().u, p.u) && ok(s.chart().v, p.v)) out.push_back(k);
  }
  return out;
}

}  // namespace surfcert
