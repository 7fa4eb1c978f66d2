#include <cmath>
#include <complex>

#include <doctest.h>

#include "riemann/errors.hpp"
#include "riemann/expression.hpp"

using namespace riemann;
using std::complex;

TEST_SUITE("expression") {
  TEST_CASE("arithmetic and precedence") {
    CHECK(parse_expression("2+3*4").eval({}).real() == doctest::Approx(14.0));
    CHECK(parse_expression("(2+3)*4").eval({}).real() == doctest::Approx(20.0));
    // ^ is right-associative and binds tighter than unary minus
    CHECK(parse_expression("2^3^2").eval({}).real() == doctest::Approx(512.0));
    CHECK(parse_expression("-2^2").eval({}).real() == doctest::Approx(-4.0));
    CHECK(parse_expression("7/2").eval({}).real() == doctest::Approx(3.5));
    const complex<double> ii = parse_expression("i*i").eval({});
    CHECK(ii.real() == doctest::Approx(-1.0));
    CHECK(std::abs(ii.imag()) < 1e-15);
    CHECK(parse_expression("pi").eval({}).real() == doctest::Approx(M_PI));
  }

  TEST_CASE("functions") {
    const complex<double> z(0.4, -0.3);
    Expression::Env env{{"z", z}};
    CHECK(std::abs(parse_expression("sin(z)").eval(env) - std::sin(z)) < 1e-15);
    CHECK(std::abs(parse_expression("cos(z)").eval(env) - std::cos(z)) < 1e-15);
    CHECK(std::abs(parse_expression("tan(z)").eval(env) - std::tan(z)) < 1e-15);
    CHECK(std::abs(parse_expression("exp(z)").eval(env) - std::exp(z)) < 1e-15);
    CHECK(std::abs(parse_expression("sqrt(z)").eval(env) - std::sqrt(z)) < 1e-15);
    CHECK(std::abs(parse_expression("ln(exp(z))").eval(env) - z) < 1e-14);
    CHECK(parse_expression("abs(z)").eval(env).real() == doctest::Approx(std::abs(z)));
    CHECK(parse_expression("re(z)").eval(env).real() == doctest::Approx(0.4));
    CHECK(parse_expression("im(z)").eval(env).real() == doctest::Approx(-0.3));
    CHECK(std::abs(parse_expression("conj(z)").eval(env) - std::conj(z)) < 1e-15);
    CHECK(std::abs(parse_expression("arctan(z)").eval(env) - std::atan(z)) < 1e-15);
  }

  TEST_CASE("variables and binding errors") {
    Expression e = parse_expression("x*y + t");
    CHECK(e.eval({{"x", 2.0}, {"y", 3.0}, {"t", 0.5}}).real() == doctest::Approx(6.5));
    auto vars = e.variables();
    CHECK(vars.count("x") == 1);
    CHECK(vars.count("y") == 1);
    CHECK(vars.count("t") == 1);
    CHECK(vars.count("pi") == 0);
    try {
      e.eval({{"x", 2.0}, {"y", 3.0}});
      FAIL("expected eval_error");
    } catch (const eval_error& err) {
      CHECK(std::string(err.what()).find("t") != std::string::npos);
    }
  }

  TEST_CASE("allowed-variable parse") {
    CHECK_NOTHROW(parse_expression("x^2 + pi", {"x"}));
    try {
      parse_expression("x*z", {"x"});
      FAIL("expected syntax_error");
    } catch (const syntax_error& err) {
      CHECK(std::string(err.what()).find("z") != std::string::npos);
    }
  }

  TEST_CASE("syntax errors carry offsets") {
    try {
      parse_expression("2+*3");
      FAIL("expected syntax_error");
    } catch (const syntax_error& err) {
      CHECK(err.offset < 4);
      CHECK(std::string(err.what()).find("offset") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expression("foo(2)"), syntax_error);
    CHECK_THROWS_AS(parse_expression("(1+2"), syntax_error);
    CHECK_THROWS_AS(parse_expression(""), syntax_error);
  }

  TEST_CASE("evaluation guards") {
    CHECK_THROWS_AS(parse_expression("1/(1-1)").eval({}), eval_error);
    CHECK_THROWS_AS(parse_expression("ln(0)").eval({}), eval_error);
  }

  TEST_CASE("print round trip") {
    Expression e = parse_expression("sin(2*x)^2 + exp(-t)*x / (y + 1)");
    Expression back = parse_expression(e.print());
    Expression::Env env{{"x", complex<double>(0.3, 0.1)},
                        {"y", complex<double>(1.2, -0.4)},
                        {"t", 0.7}};
    CHECK(std::abs(e.eval(env) - back.eval(env)) < 1e-15);
  }

  TEST_CASE("structural differentiation") {
    Expression::Env env{{"x", complex<double>(0.7, 0.0)}, {"y", complex<double>(-0.2, 0.0)}};
    Expression d1 = differentiate(parse_expression("x^2*y"), "x");
    CHECK(std::abs(d1.eval(env) - complex<double>(2 * 0.7 * -0.2, 0)) < 1e-14);
    Expression d2 = differentiate(parse_expression("exp(2*x)"), "x");
    CHECK(std::abs(d2.eval(env) - 2.0 * std::exp(complex<double>(1.4, 0))) < 1e-14);
    Expression d3 = differentiate(parse_expression("sin(x)"), "x");
    CHECK(std::abs(d3.eval(env) - std::cos(complex<double>(0.7, 0))) < 1e-14);
    Expression d4 = differentiate(parse_expression("x^x"), "x");  // e^{x ln x}
    const double want = std::pow(0.7, 0.7) * (std::log(0.7) + 1.0);
    CHECK(d4.eval(env).real() == doctest::Approx(want).epsilon(1e-12));
    // abs of something not depending on x differentiates to zero ...
    Expression d5 = differentiate(parse_expression("abs(y) + x"), "x");
    CHECK(std::abs(d5.eval(env) - complex<double>(1, 0)) < 1e-14);
    // ... but abs(x) itself is not holomorphic
    CHECK_THROWS_AS(differentiate(parse_expression("abs(x)"), "x"), eval_error);
    CHECK_THROWS_AS(differentiate(parse_expression("conj(x)*x"), "x"), eval_error);
  }
}
