#pragma once

#include <array>
#include <cmath>

namespace surfcert {

/// Truncated bivariate Taylor expansion in the chart coordinates (u, v).
///
/// A Jet<N> carries every Taylor coefficient c_ij with i + j <= N of a
/// function around a base point, so arithmetic and elementary functions
/// propagate exact partial derivatives up to order N. Closed-form
/// embeddings and field expressions are written once as templates over
/// the scalar type and evaluated with Jet to get their derivatives.
template <int N>
class Jet {
 public:
  static_assert(N >= 0);
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  constexpr Jet() = default;
  constexpr Jet(double constant) { c_[0] = constant; }  // NOLINT(implicit)

  static Jet variable_u(double u0) {
    Jet j(u0);
    if constexpr (N >= 1) j.c_[index(1, 0)] = 1.0;
    return j;
  }
  static Jet variable_v(double v0) {
    Jet j(v0);
    if constexpr (N >= 1) j.c_[index(0, 1)] = 1.0;
    return j;
  }

  static constexpr int index(int i, int j) {
    const int k = i + j;
    return k * (k + 1) / 2 + j;
  }

  double value() const { return c_[0]; }
  double coeff(int i, int j) const { return c_[index(i, j)]; }
  /// Partial derivative d^(i+j) / du^i dv^j at the base point.
  double derivative(int i, int j) const {
    return coeff(i, j) * factorial(i) * factorial(j);
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    for (int i1 = 0; i1 <= N; ++i1) {
      for (int j1 = 0; i1 + j1 <= N; ++j1) {
        const double ca = a.coeff(i1, j1);
        if (ca == 0.0) continue;
        for (int i2 = 0; i1 + j1 + i2 <= N; ++i2) {
          for (int j2 = 0; i1 + j1 + i2 + j2 <= N; ++j2) {
            r.c_[index(i1 + i2, j1 + j2)] += ca * b.coeff(i2, j2);
          }
        }
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  friend Jet sin(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return compose(a, {s, c, -s, -c});
  }
  friend Jet cos(const Jet& a) {
    const double s = std::sin(a.value()), c = std::cos(a.value());
    return compose(a, {c, -s, -c, s});
  }
  friend Jet sqrt(const Jet& a) {
    const double x = a.value();
    const double r = std::sqrt(x);
    return compose(a, {r, 0.5 / r, -0.25 / (r * x), 0.375 / (r * x * x)});
  }
  /// Kinks at zero are not differentiable; the one-sided branch is taken.
  friend Jet abs(const Jet& a) { return a.value() < 0.0 ? -a : a; }

  friend Jet reciprocal(const Jet& a) {
    const double x = a.value();
    const double r = 1.0 / x;
    return compose(a, {r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r});
  }

 private:
  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  }

  // f(a) = sum_m f^(m)(a0) / m! * (a - a0)^m, exact for the truncated series.
  static Jet compose(const Jet& a, const std::array<double, 4>& derivs) {
    static_assert(N <= 3, "compose carries derivatives up to third order");
    Jet delta = a;
    delta.c_[0] = 0.0;
    Jet result(derivs[0]);
    Jet power(1.0);
    double inv_fact = 1.0;
    for (int m = 1; m <= N; ++m) {
      power = power * delta;
      inv_fact /= m;
      for (int k = 0; k < kSize; ++k) result.c_[k] += derivs[m] * inv_fact * power.c_[k];
    }
    return result;
  }

  std::array<double, kSize> c_{};
};

}  // namespace surfcert
