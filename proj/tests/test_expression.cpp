#include "surfcert/expression.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "surfcert/error.hpp"

using namespace surfcert;

namespace {

ErrorKind kind_of(std::string_view text, bool field) {
  try {
    if (field) {
      parse_field_expression(text);
    } else {
      Expression::parse(text);
    }
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error for ", text);
  return ErrorKind::invalid_parameter;
}

}  // namespace

TEST_CASE("expression evaluation") {
  CHECK(Expression::parse("1 + 2 * 3")(0.0, 0.0) == 7.0);
  CHECK(Expression::parse("(1 + 2) * 3")(0.0, 0.0) == 9.0);
  CHECK(Expression::parse("8 / 4 / 2")(0.0, 0.0) == 1.0);
  CHECK(Expression::parse("2 - 3 - 4")(0.0, 0.0) == -5.0);
  CHECK(Expression::parse("-u * -v")(2.0, 3.0) == 6.0);
  CHECK(Expression::parse("--u")(2.0, 0.0) == 2.0);
  CHECK(Expression::parse("pi")(0.0, 0.0) == std::numbers::pi);
  CHECK(Expression::parse("1.5e-1")(0.0, 0.0) == 0.15);
  CHECK(Expression::parse(" sin( u )*cos(v) ")(0.5, 0.25) == doctest::Approx(std::sin(0.5) * std::cos(0.25)));
  CHECK(Expression::parse("sin(u)").text() == "sin(u)");
}

TEST_CASE("expression partials agree with the closed form") {
  const Expression e = Expression::parse("sin(u) * cos(2 * v) / (2 + cos(u))");
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(0.0, 2.0 * std::numbers::pi);
  for (int k = 0; k < 50; ++k) {
    const double u = d(rng), v = d(rng);
    const Jet<1> j = e(Jet<1>::variable_u(u), Jet<1>::variable_v(v));
    const double den = 2.0 + std::cos(u);
    const double du = (std::cos(u) * den + std::sin(u) * std::sin(u)) / (den * den) * std::cos(2.0 * v);
    const double dv = -2.0 * std::sin(u) * std::sin(2.0 * v) / den;
    CHECK(j.value() == doctest::Approx(e(u, v)).epsilon(1e-15));
    CHECK(std::abs(j.derivative(1, 0) - du) < 1e-13);
    CHECK(std::abs(j.derivative(0, 1) - dv) < 1e-13);
  }
}

TEST_CASE("field expressions register partials") {
  const TangentField f = parse_field_expression("cos(u), sin(v)*cos(u)");
  REQUIRE(f.has_partials());
  const ChartPoint p{0.4, 1.1};
  const Vec2 value = f(p);
  CHECK(value[0] == doctest::Approx(std::cos(0.4)));
  CHECK(value[1] == doctest::Approx(std::sin(1.1) * std::cos(0.4)));
  const FieldJet j = f.jet(p);
  CHECK(j.jacobian(0, 0) == doctest::Approx(-std::sin(0.4)));
  CHECK(j.jacobian(0, 1) == doctest::Approx(0.0));
  CHECK(j.jacobian(1, 0) == doctest::Approx(-std::sin(1.1) * std::sin(0.4)));
  CHECK(j.jacobian(1, 1) == doctest::Approx(std::cos(1.1) * std::cos(0.4)));
}

TEST_CASE("malformed expressions are config errors") {
  for (const char* text : {"", "w", "sin u", "(u", "u)", "1 +", "e", "tan(u)", "u v", "2..3", "*u"}) {
    CAPTURE(text);
    CHECK(kind_of(text, false) == ErrorKind::config_error);
  }
  for (const char* text : {"u", "u,v,1", ",", "u,", "sin(u,v)"}) {
    CAPTURE(text);
    CHECK(kind_of(text, true) == ErrorKind::config_error);
  }
}
