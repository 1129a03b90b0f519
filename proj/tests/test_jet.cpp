#include "surfcert/jet.hpp"

#include <cmath>

#include "doctest.h"

using surfcert::Jet;

TEST_CASE("jet propagates mixed partials of a product") {
  // f = u^2 v sin(u) at (0.7, -1.3): check against hand-derived partials.
  const double u0 = 0.7, v0 = -1.3;
  const auto u = Jet<3>::variable_u(u0);
  const auto v = Jet<3>::variable_v(v0);
  const Jet<3> f = u * u * v * sin(u);
  const double s = std::sin(u0), c = std::cos(u0);
  CHECK(f.value() == doctest::Approx(u0 * u0 * v0 * s).epsilon(1e-14));
  CHECK(f.derivative(1, 0) == doctest::Approx(v0 * (2 * u0 * s + u0 * u0 * c)).epsilon(1e-14));
  CHECK(f.derivative(0, 1) == doctest::Approx(u0 * u0 * s).epsilon(1e-14));
  CHECK(f.derivative(1, 1) == doctest::Approx(2 * u0 * s + u0 * u0 * c).epsilon(1e-14));
  CHECK(f.derivative(2, 1) == doctest::Approx(2 * s + 4 * u0 * c - u0 * u0 * s).epsilon(1e-14));
  CHECK(f.derivative(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("jet quotient and sqrt match closed forms") {
  const double x0 = 1.7;
  const auto x = Jet<3>::variable_u(x0);
  const Jet<3> q = 1.0 / (2.0 + cos(x));
  const double d = 2.0 + std::cos(x0);
  CHECK(q.derivative(1, 0) == doctest::Approx(std::sin(x0) / (d * d)).epsilon(1e-14));
  const Jet<3> r = sqrt(x);
  CHECK(r.derivative(3, 0) == doctest::Approx(0.375 * std::pow(x0, -2.5)).epsilon(1e-14));
}
