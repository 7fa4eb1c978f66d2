#include <cmath>
#include <complex>

#include <doctest.h>

#include "riemann/errors.hpp"
#include "riemann/systems.hpp"

using namespace riemann;

TEST_SUITE("systems") {
  TEST_CASE("builtin registry") {
    const SystemSpec full = builtin_system("plasticity-full");
    CHECK(full.p == 3);
    CHECK(full.q == 4);
    CHECK(full.m == 5);
    CHECK(full.vars == std::vector<std::string>{"sigma", "theta", "u", "v"});
    CHECK(full.eq_names.size() == 5);
    CHECK(full.eq_tol_scale == std::vector<double>{10.0, 10.0, 1.0, 1.0, 1.0});
    REQUIRE(static_cast<bool>(full.env_provider));

    const SystemSpec reduced = builtin_system("plasticity-reduced");
    CHECK(reduced.p == 2);
    CHECK(reduced.q == 3);
    CHECK(reduced.m == 3);
    CHECK(reduced.vars == std::vector<std::string>{"theta", "u", "v"});

    const SystemSpec sub = builtin_system("plasticity-subsystem");
    CHECK(sub.p == 2);
    CHECK(sub.q == 4);
    CHECK(sub.m == 3);
    CHECK(sub.vars == std::vector<std::string>{"phi", "psi", "u", "v"});

    const SystemSpec wp = builtin_system("wave-particle");
    CHECK(wp.p == 2);
    CHECK(wp.q == 2);
    CHECK(wp.m == 2);
    CHECK(wp.vars == std::vector<std::string>{"u", "phi"});

    CHECK_THROWS_AS(builtin_system("nope"), input_error);
  }

  TEST_CASE("constant subsystem matrices") {
    const SystemSpec sub = builtin_system("plasticity-subsystem");
    const std::vector<cplx> u(4, cplx(0.3, 0.0));
    const auto [As, b] = eval_system(sub, u);
    REQUIRE(As.size() == 2);
    const double A1[3][4] = {{0, -1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, -1}};
    const double A2[3][4] = {{1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 4; ++c) {
        CHECK(std::abs(As[0](r, c) - cplx(A1[r][c], 0)) < 1e-15);
        CHECK(std::abs(As[1](r, c) - cplx(A2[r][c], 0)) < 1e-15);
      }
    for (const cplx& z : b) CHECK(std::abs(z) < 1e-15);
  }

  TEST_CASE("wave-particle source terms") {
    BuiltinOptions opts;
    opts.a = std::sqrt(2.0);
    const SystemSpec wp = builtin_system("wave-particle", opts);
    const Expression::Env env = wp.env_provider(0.0, 0.0, 0.0);
    CHECK(env.count("a") == 1);
    const auto [As, b] = eval_system(wp, {cplx(0, 0), cplx(M_PI, 0)}, env);
    // b = (sqrt(2) a e^{u/2} sin(phi/2), -sqrt(2) a e^{u/2} cos(phi/2)) at u=0, phi=pi
    CHECK(std::abs(b[0] - cplx(2.0, 0)) < 1e-14);
    CHECK(std::abs(b[1]) < 1e-14);
    CHECK(std::abs(As[0](0, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(As[0](1, 1) - cplx(-1, 0)) < 1e-15);
    CHECK(std::abs(As[1](0, 1) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(As[1](1, 0) - cplx(1, 0)) < 1e-15);
  }

  TEST_CASE("full system environment provider") {
    BuiltinOptions opts;
    opts.V = "x*y*exp(-t)";
    opts.rho = 2.5;
    const SystemSpec full = builtin_system("plasticity-full", opts);
    const Expression::Env env = full.env_provider(0.5, 2.0, 3.0);
    CHECK(env.at("rho").real() == doctest::Approx(2.5));
    CHECK(env.at("Vx").real() == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(env.at("Vy").real() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-12));

    // A^t carries -rho against the velocity time derivatives
    std::vector<cplx> state = {cplx(0.1, 0), cplx(0.2, 0), cplx(0.3, 0), cplx(0.4, 0)};
    const auto [As, b] = eval_system(full, state, env);
    CHECK(std::abs(As[0](0, 2) - cplx(-2.5, 0)) < 1e-14);
    CHECK(std::abs(As[0](1, 3) - cplx(-2.5, 0)) < 1e-14);
    CHECK(std::abs(As[1](0, 1) - cplx(-std::cos(0.4), 0)) < 1e-14);
    CHECK(std::abs(b[0] - cplx(-2.5 * 3.0 * std::exp(-0.5), 0)) < 1e-12);

    BuiltinOptions bad;
    bad.rho = 0.0;
    CHECK_THROWS_AS(builtin_system("plasticity-full", bad), input_error);
    BuiltinOptions nondiff;
    nondiff.V = "abs(x)";
    CHECK_THROWS_AS(builtin_system("plasticity-full", nondiff), input_error);
  }

  TEST_CASE("config parsing") {
    const std::string doc = R"({
      "name": "toy",
      "p": 2, "q": 1, "m": 1,
      "vars": ["f"],
      "A": [[["1"]], [["0"]]],
      "b": ["f"]
    })";
    const SystemSpec sys = parse_system_config_text(doc);
    CHECK(sys.name == "toy");
    CHECK(sys.p == 2);
    CHECK(sys.q == 1);
    CHECK(sys.m == 1);
    const auto [As, b] = eval_system(sys, {cplx(0.7, 0)});
    CHECK(std::abs(As[0](0, 0) - cplx(1, 0)) < 1e-15);
    CHECK(std::abs(As[1](0, 0)) < 1e-15);
    CHECK(std::abs(b[0] - cplx(0.7, 0)) < 1e-15);
    CHECK(sys.eq_names == std::vector<std::string>{"eq1"});
    CHECK(sys.eq_tol_scale == std::vector<double>{1.0});
  }

  TEST_CASE("config shape mismatches are rejected") {
    CHECK_THROWS_AS(parse_system_config_text(R"({
      "name": "bad", "p": 2, "q": 1, "m": 1,
      "vars": ["f"], "A": [[["1"]]], "b": ["f"]
    })"),
                    input_error);  // only one A slice for p = 2
    CHECK_THROWS_AS(parse_system_config_text(R"({
      "name": "bad", "p": 2, "q": 1, "m": 1,
      "vars": ["f"], "A": [[["1"]], [["0"]]], "b": ["f", "f"]
    })"),
                    input_error);  // b length != m
    CHECK_THROWS_AS(parse_system_config_text(R"({
      "name": "bad", "p": 2, "q": 2, "m": 1,
      "vars": ["f"], "A": [[["1","0"]], [["0","0"]]], "b": ["f"]
    })"),
                    input_error);  // vars length != q
  }

  TEST_CASE("unbound variables are named") {
    const SystemSpec wp = builtin_system("wave-particle");
    try {
      eval_system(wp, {cplx(0, 0), cplx(0, 0)});  // no binding for a
      FAIL("expected eval_error");
    } catch (const eval_error& e) {
      CHECK(std::string(e.what()).find("a") != std::string::npos);
    }
  }
}
