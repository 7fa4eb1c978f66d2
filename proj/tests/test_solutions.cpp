#include <cmath>
#include <complex>

#include <doctest.h>

#include "riemann/errors.hpp"
#include "riemann/solutions.hpp"
#include "riemann/systems.hpp"

using namespace riemann;

namespace {

PlasticityParams damped_params() {
  PlasticityParams p;
  p.c1 = Coefficient::damped(0.2, 0.5, 0.1, 1.0);
  p.c2 = Coefficient::damped(0.1, 0.3, 0.05, 0.2);
  p.c3 = Coefficient::constant(cplx(0.05, -0.02));
  p.Omega = Coefficient::constant(cplx(1.2, 0.0));
  return p;
}

void check_c(cplx got, cplx want, double tol) {
  CAPTURE(got.real());
  CAPTURE(got.imag());
  CAPTURE(want.real());
  CAPTURE(want.imag());
  CHECK(std::abs(got - want) <= tol);
}

}  // namespace

TEST_SUITE("solutions") {
  TEST_CASE("coefficient forms") {
    const Coefficient d = Coefficient::damped(0.2, 0.5, 0.1, 1.0);
    const double t = 0.7;
    check_c(d.value(t), cplx(0.2 * std::exp(-0.5 * t), 0.1 * std::exp(-t)), 1e-15);
    check_c(d.derivative(t),
            cplx(-0.1 * std::exp(-0.5 * t), -0.1 * std::exp(-t)), 1e-15);

    const Coefficient k = Coefficient::constant(cplx(0.3, -0.4));
    check_c(k.value(5.0), cplx(0.3, -0.4), 0.0);
    check_c(k.derivative(5.0), cplx(0, 0), 0.0);

    const Coefficient e = Coefficient::expr("t^2 + i*t");
    check_c(e.value(0.5), cplx(0.25, 0.5), 1e-15);
    check_c(e.derivative(0.5), cplx(1.0, 1.0), 1e-8);  // central-difference derivative

    const Coefficient zero;  // default is the constant 0
    check_c(zero.value(1.0), cplx(0, 0), 0.0);
  }

  TEST_CASE("coefficient JSON round trips and strictness") {
    const auto d = Coefficient::from_json(
        nlohmann::json::parse(R"({"damped":{"a":0.2,"s":0.5,"b":0.1,"q":1.0}})"));
    check_c(d.value(0.0), cplx(0.2, 0.1), 1e-15);
    check_c(Coefficient::from_json(d.to_json()).value(0.3), d.value(0.3), 1e-15);

    const auto k = Coefficient::from_json(nlohmann::json::parse(R"({"const":[1.0,-2.0]})"));
    check_c(k.value(9.0), cplx(1, -2), 0.0);

    const auto e =
        Coefficient::from_json(nlohmann::json::parse(R"json({"expr":"exp(-t)"})json"));
    check_c(e.value(1.0), cplx(std::exp(-1.0), 0), 1e-15);

    // missing damped keys default to zero
    const auto partial = Coefficient::from_json(nlohmann::json::parse(R"({"damped":{"a":0.4}})"));
    check_c(partial.value(2.0), cplx(0.4, 0), 1e-15);

    using nlohmann::json;
    CHECK_THROWS_AS(Coefficient::from_json(json::parse(R"({"damped":{"a":1,"bogus":2}})")),
                    input_error);
    CHECK_THROWS_AS(Coefficient::from_json(json::parse(R"({"const":[1]})")), input_error);
    CHECK_THROWS_AS(Coefficient::from_json(json::parse(R"({"huh":1})")), input_error);
    CHECK_THROWS_AS(
        Coefficient::from_json(json::parse(R"({"const":[1,0],"expr":"t"})")), input_error);
  }

  TEST_CASE("parameter JSON") {
    const auto doc = nlohmann::json::parse(R"json({
      "family": "case-i",
      "c1": {"const": [1.0, 0.0]},
      "c2": {"damped": {"a": 0.1, "s": 0.3}},
      "Omega": {"const": [1.4, 0.0]},
      "sigma0": {"expr": "t"},
      "rho": 2.0,
      "V": "x*y*exp(-t)"
    })json");
    const PlasticityParams p = PlasticityParams::from_json(doc);
    CHECK(p.rho == doctest::Approx(2.0));
    CHECK(p.V_text == "x*y*exp(-t)");
    check_c(p.c1.value(3.0), cplx(1, 0), 0.0);
    check_c(p.sigma0.value(0.25), cplx(0.25, 0), 1e-15);
    const PlasticityParams back = PlasticityParams::from_json(p.to_json());
    check_c(back.c2.value(0.6), p.c2.value(0.6), 1e-15);

    using nlohmann::json;
    CHECK_THROWS_AS(PlasticityParams::from_json(json::parse(R"({"nope":1})")), input_error);
    CHECK_THROWS_AS(PlasticityParams::from_json(json::parse(R"({"rho":-1})")), input_error);
    CHECK_THROWS_AS(PlasticityParams::from_json(json::parse(R"({"family":"bogus"})")),
                    input_error);
    CHECK(family_from_string("case-i") == PlasticityFamily::case_i);
    CHECK(family_from_string("case_ii") == PlasticityFamily::case_ii);
    CHECK(family_to_string(PlasticityFamily::general) == "general");
  }

  TEST_CASE("h chain at frozen reference points") {
    PlasticityParams p;
    p.c1 = Coefficient::constant(cplx(1, 0));
    p.Omega = Coefficient::constant(cplx(1, 0));
    const HChain a = h_chain(PlasticityFamily::general, p, 0.0, cplx(0.3, 0.2));
    check_c(a.h, cplx(-1.8390634713946482, -1.4094866772641301), 1e-11);
    check_c(a.h1, cplx(-6.5917264992737143, -1.3209556057634889), 1e-10);
    check_c(a.h2, cplx(-4.8448162704576766, -6.3274089289137426), 1e-10);
    check_c(a.h3, cplx(-19.917162439823490, -22.846550535803127), 1e-9);

    const HChain b = h_chain(PlasticityFamily::general, p, 0.0, cplx(-0.4, 0.1));
    check_c(b.h, cplx(2.6935994335710190, -0.81701071053352959), 1e-11);
    check_c(b.h1, cplx(-7.9706683141085193, 1.1924226519010643), 1e-10);
    check_c(b.h2, cplx(10.859480888193990, -5.8155760461069926), 1e-10);
    check_c(b.h3, cplx(-50.014696332142341, 30.437938621235919), 1e-9);

    // h_eval agrees with the first three chain entries
    const HTriple tri = h_eval(PlasticityFamily::general, p, 0.0, cplx(0.3, 0.2));
    check_c(tri.h, a.h, 1e-14);
    check_c(tri.h1, a.h1, 1e-13);
    check_c(tri.h2, a.h2, 1e-13);
  }

  TEST_CASE("inverse-linear family closed chain") {
    PlasticityParams p;
    p.c1 = Coefficient::constant(cplx(1, 0));
    const HChain c = h_chain(PlasticityFamily::case_ii, p, 0.0, cplx(2, 0));
    check_c(c.h, cplx(0.5, 0), 1e-15);
    check_c(c.h1, cplx(-0.25, 0), 1e-15);
    check_c(c.h2, cplx(0.25, 0), 1e-15);
    check_c(c.h3, cplx(-6.0 / 16.0, 0), 1e-15);
    CHECK_THROWS_AS(h_chain(PlasticityFamily::case_ii, p, 0.0, cplx(0, 0)),
                    singularity_error);
  }

  TEST_CASE("general-family guards") {
    PlasticityParams p;
    p.c1 = Coefficient::constant(cplx(1, 0));
    p.Omega = Coefficient::constant(cplx(1, 0));
    // branch point of the inverse error function at c2 + c1 r = 1
    CHECK_THROWS_AS(h_chain(PlasticityFamily::general, p, 0.0, cplx(1, 0)),
                    singularity_error);
    PlasticityParams q = p;
    q.Omega = Coefficient::constant(cplx(0, 0));
    CHECK_THROWS_AS(h_chain(PlasticityFamily::general, q, 0.0, cplx(0.2, 0)), input_error);
  }

  TEST_CASE("time derivative of the chain matches differencing") {
    const PlasticityParams p = damped_params();
    const double t = 0.4, dt = 1e-5;
    const cplx r(0.25, 0.1);
    for (const PlasticityFamily fam :
         {PlasticityFamily::general, PlasticityFamily::case_i, PlasticityFamily::case_ii}) {
      const HChain mid = h_chain(fam, p, t, r);
      const HChain lo = h_chain(fam, p, t - dt, r);
      const HChain hi = h_chain(fam, p, t + dt, r);
      const cplx fd = (hi.h - lo.h) / (2 * dt);
      CAPTURE(static_cast<int>(fam));
      CHECK(std::abs(mid.ht - fd) < 1e-6);
    }
  }

  TEST_CASE("linear-family velocity fields") {
    PlasticityParams p;
    p.c1 = Coefficient::constant(cplx(1, 0));
    const FieldSample f = plasticity_fields(p, PlasticityFamily::case_i, 0.0, 1.0, 2.0);
    CHECK(f.u == doctest::Approx(4.0));    // u = 4 x
    CHECK(f.v == doctest::Approx(-8.0));   // v = -4 y
    PlasticityParams g;
    g.c1 = Coefficient::constant(cplx(0.3, -0.2));
    g.c2 = Coefficient::constant(cplx(0.1, 0.4));
    const double x = 0.7, y = -0.5;
    const FieldSample s = plasticity_fields(g, PlasticityFamily::case_i, 0.0, x, y);
    CHECK(s.u == doctest::Approx(4 * (0.3 * x - 0.2 * y + 0.1)).epsilon(1e-12));
    CHECK(s.v == doctest::Approx(4 * (-0.2 * x - 0.3 * y + 0.4)).epsilon(1e-12));
  }

  TEST_CASE("linear-family pressure equals its quadrature cross-check") {
    PlasticityParams p = damped_params();
    p.V = parse_expression("x*y*exp(-t)");
    p.V_text = "x*y*exp(-t)";
    p.sigma0 = Coefficient::expr("0.3*t");
    double worst = 0;
    for (const double t : {0.0, 0.4}) {
      for (const double x : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        for (const double y : {-1.0, 0.0, 1.0}) {
          const double closed = sigma_quadrature(p, PlasticityFamily::case_i, t, x, y);
          const double generic =
              sigma_quadrature_generic(p, PlasticityFamily::case_i, t, x, y);
          worst = std::max(worst, std::abs(closed - generic));
        }
      }
    }
    CHECK(worst <= 1e-7);
  }

  TEST_CASE("pressure quadrature anchors at the reference corner") {
    PlasticityParams p = damped_params();
    p.sigma0 = Coefficient::constant(cplx(0.25, 0));
    p.V = parse_expression("x*y*exp(-t)");
    p.V_text = "x*y*exp(-t)";
    const double t = 0.3;
    // at (x_ref, y_ref) both integrals vanish:
    // sigma = -rho V + (1/2) sin 2theta + rho (u^2+v^2)/2 + sigma0
    const FieldSample f = plasticity_fields(p, PlasticityFamily::general, t, 0.0, 0.0);
    const double pt = -p.rho * 0.0 + 0.5 * std::sin(2 * f.theta) +
                      p.rho * (f.u * f.u + f.v * f.v) / 2 + 0.25;
    const double got = sigma_quadrature(p, PlasticityFamily::general, t, 0.0, 0.0);
    CHECK(got == doctest::Approx(pt).epsilon(1e-10));
  }

  TEST_CASE("wave-particle closed form at reference points") {
    const HolomorphicFn ident("r");
    const WaveSample w0 = wave_particle_fields(ident, std::sqrt(2.0), 1, 1.0, 0.0);
    CHECK(std::abs(w0.u) <= 1e-12);
    CHECK(w0.phi == doctest::Approx(3 * M_PI).epsilon(1e-12));

    const HolomorphicFn cubic("r + r^3/10");
    const WaveSample w1 = wave_particle_fields(cubic, 1.0, 1, 1.0, 0.0);
    CHECK(w1.u == doctest::Approx(1.0272553498862777).epsilon(1e-12));
  }

  TEST_CASE("wave-particle validation") {
    const HolomorphicFn ident("r");
    CHECK_THROWS_AS(wave_particle_fields(ident, 1.0, 2, 1.0, 0.0), input_error);   // even n
    CHECK_THROWS_AS(wave_particle_fields(ident, 0.0, 1, 1.0, 0.0), input_error);   // a <= 0
    CHECK_THROWS_AS(wave_particle_fields(ident, 1.0, 1, -1.0, 0.0), domain_error); // Re psi < 0
    const HolomorphicFn flat("r^2/2 + 2");
    CHECK_THROWS_AS(wave_particle_fields(flat, 1.0, 1, 0.0, 0.0), domain_error);   // psi' = 0
  }

  TEST_CASE("argument lift stays continuous around a turning profile") {
    // psi = r^3 + 9: psi' = 3 r^2 doubles the argument; the principal log wraps
    // along the path from (1,0) to points in the upper half plane, the lift
    // must not.
    const HolomorphicFn tricky("r^3 + 9");
    const WaveSample far = wave_particle_fields(tricky, 1.0, 1, -0.8, 0.9);
    const cplx dpsi = 3.0 * std::pow(cplx(-0.8, 0.9), 2);
    // u only checks magnitude bookkeeping
    const cplx psi = std::pow(cplx(-0.8, 0.9), 3) + 9.0;
    const double want_u =
        2 * std::log(std::sqrt(8.0) * std::abs(dpsi) / (1.0 * 2 * psi.real()));
    CHECK(far.u == doctest::Approx(want_u).epsilon(1e-10));
    // the continuous branch of arg(3 r^2) at r = -0.8 + 0.9 i reached from r = 1
    // is 2 Arg(r) (no wrap): phi = pi - 2 arg + 2 pi
    const double want_phi = 3 * M_PI - 4 * std::atan2(0.9, -0.8);
    CHECK(far.phi == doctest::Approx(want_phi).epsilon(1e-9));
  }

  TEST_CASE("holomorphic profile derivatives") {
    const HolomorphicFn e("exp(r)");
    CHECK(e.analytic_derivative());
    check_c(e.dpsi(cplx(0.3, 0.2)), std::exp(cplx(0.3, 0.2)), 1e-14);
    // re/im defeat the structural differentiator; Richardson fallback kicks in
    const HolomorphicFn f("re(r) + i*im(r)");
    CHECK_FALSE(f.analytic_derivative());
    check_c(f.dpsi(cplx(0.4, -0.1)), cplx(1, 0), 1e-9);
  }

  TEST_CASE("field evaluators expose matching components") {
    PlasticityParams p = damped_params();
    const FieldEvaluator full = plasticity_full_evaluator(p, PlasticityFamily::general);
    CHECK(full.q == 4);
    CHECK(full.names == std::vector<std::string>{"sigma", "theta", "u", "v"});
    REQUIRE(full.period.size() == 4);
    CHECK(full.period[1] == doctest::Approx(M_PI));
    const std::vector<double> vals = full.eval(0.2, 0.3, -0.4);
    const FieldSample f = plasticity_fields(p, PlasticityFamily::general, 0.2, 0.3, -0.4);
    CHECK(vals[1] == doctest::Approx(f.theta).epsilon(1e-12));
    CHECK(vals[2] == doctest::Approx(f.u).epsilon(1e-12));
    CHECK(vals[3] == doctest::Approx(f.v).epsilon(1e-12));

    const FieldEvaluator red = plasticity_reduced_evaluator(p, PlasticityFamily::general);
    CHECK(red.q == 3);
    CHECK(red.names == std::vector<std::string>{"theta", "u", "v"});

    const FieldEvaluator sub = plasticity_subsystem_evaluator(p, PlasticityFamily::general);
    CHECK(sub.q == 4);
    CHECK(sub.names == std::vector<std::string>{"phi", "psi", "u", "v"});
    // phi, psi are the angle gradient; cross-check against differencing theta
    const double h = 1e-5;
    const double tx = (red.eval(0.2, 0.3 + h, -0.4)[0] - red.eval(0.2, 0.3 - h, -0.4)[0]) /
                      (2 * h);
    const double ty = (red.eval(0.2, 0.3, -0.4 + h)[0] - red.eval(0.2, 0.3, -0.4 - h)[0]) /
                      (2 * h);
    const std::vector<double> sv = sub.eval(0.2, 0.3, -0.4);
    CHECK(sv[0] == doctest::Approx(tx).epsilon(1e-6));
    CHECK(sv[1] == doctest::Approx(ty).epsilon(1e-6));
  }

  TEST_CASE("pole mask") {
    PlasticityParams p;
    p.c1 = Coefficient::constant(cplx(1, 0));
    p.c2 = Coefficient::constant(cplx(0.5, 0.25));
    const auto mask = case_ii_singularity_mask(p, 0.35);
    CHECK(mask(0.0, -0.5, -0.25));        // dead on the pole
    CHECK(mask(0.0, -0.3, -0.25));        // within 0.35
    CHECK_FALSE(mask(0.0, 0.5, 0.25));    // far away
    CHECK_FALSE(mask(0.0, -0.75, -0.5));  // distance ~0.354, just outside
  }

  TEST_CASE("sampled-path interpolation") {
    SampledPath path;
    path.r = {0.0, 1.0};
    path.f = {{cplx(0, 0)}, {cplx(1, 0)}};
    path.df = {{cplx(1, 0)}, {cplx(1, 0)}};
    CHECK(std::abs(path.eval(0.5)[0] - cplx(0.5, 0)) < 1e-15);
    CHECK(std::abs(path.eval(0.25)[0] - cplx(0.25, 0)) < 1e-15);
    // clamped outside the span
    CHECK(std::abs(path.eval(-3.0)[0] - cplx(0, 0)) < 1e-15);
    CHECK(std::abs(path.eval(7.0)[0] - cplx(1, 0)) < 1e-15);
  }

  TEST_CASE("profile integrator reproduces the exponential") {
    const SystemSpec toy = parse_system_config_text(
        R"({"name":"toy","p":2,"q":1,"m":1,"vars":["f"],"A":[[["1"]],[["0"]]],"b":["f"]})");
    InhomFactorization fac;
    fac.Omega = [](const std::vector<double>&, const std::vector<cplx>&) { return cplx(1, 0); };
    fac.L = [](const std::vector<double>&, const std::vector<cplx>&) {
      return ComplexMatrix::identity(1);
    };
    const SampledPath path =
        simple_wave_integrate(toy, {1.0, 0.0}, fac, {cplx(1, 0)}, 0.0, 1.0, 0.01);
    CHECK(std::abs(path.f.back()[0] - cplx(std::exp(1.0), 0)) <= 1e-9);
    // dense output interpolates the interior accurately
    CHECK(std::abs(path.eval(0.5)[0] - cplx(std::exp(0.5), 0)) < 1e-8);

    // step-halving error scaling is 4th order or better
    const double e1 = std::abs(
        simple_wave_integrate(toy, {1.0, 0.0}, fac, {cplx(1, 0)}, 0.0, 1.0, 0.1).f.back()[0] -
        cplx(std::exp(1.0), 0));
    const double e2 = std::abs(
        simple_wave_integrate(toy, {1.0, 0.0}, fac, {cplx(1, 0)}, 0.0, 1.0, 0.05).f.back()[0] -
        cplx(std::exp(1.0), 0));
    CHECK(e1 / e2 >= 8.0);
  }

  TEST_CASE("profile integrator holds constant states bit-exactly") {
    const SystemSpec sys = parse_system_config_text(
        R"({"name":"c","p":2,"q":2,"m":2,"vars":["f","g"],
            "A":[[["1","0"],["0","1"]],[["1","0"],["0","1"]]],"b":["0","0"]})");
    InhomFactorization fac;
    fac.Omega = [](const std::vector<double>&, const std::vector<cplx>&) { return cplx(1, 0); };
    fac.L = [](const std::vector<double>&, const std::vector<cplx>&) {
      return ComplexMatrix::identity(2);
    };
    const std::vector<cplx> f0 = {cplx(0.3, 0.0), cplx(-0.2, 0.0)};
    const SampledPath path = simple_wave_integrate(sys, {1.0, 0.0}, fac, f0, 0.0, 2.0, 0.1);
    CHECK(path.f.back()[0] == f0[0]);
    CHECK(path.f.back()[1] == f0[1]);
  }

  TEST_CASE("profile integrator validates the characteristic shift") {
    BuiltinOptions opts;
    opts.a = 1.0;
    const SystemSpec wp = builtin_system("wave-particle", opts);
    InhomFactorization fac;
    fac.Omega = [](const std::vector<double>&, const std::vector<cplx>&) { return cplx(1, 0); };
    fac.L = [](const std::vector<double>&, const std::vector<cplx>&) {
      return ComplexMatrix::identity(2);
    };
    fac.tau = [](const std::vector<double>&, const std::vector<cplx>&) {
      return std::vector<cplx>{cplx(1, 0), cplx(0, 0)};  // (A^i lambda_i) tau != 0
    };
    CHECK_THROWS_AS(simple_wave_integrate(wp, {1.0, 0.0}, fac, {cplx(0, 0), cplx(M_PI, 0)},
                                          0.0, 0.5, 0.01),
                    input_error);
  }

  TEST_CASE("ray integration reproduces the published wave-particle profile") {
    // psi = (x + 1)^2 along y = 0: u = 2 ln(sqrt(8)/(x+1)), phi = 3 pi.
    // With wave vector (1, 0) the exact fields obey df/dr = (1/2) R b where R
    // is the rotation sending b to (b1, -b2).
    BuiltinOptions opts;
    opts.a = 1.0;
    const SystemSpec wp = builtin_system("wave-particle", opts);
    InhomFactorization fac;
    fac.Omega = [](const std::vector<double>&, const std::vector<cplx>&) {
      return cplx(0.5, 0);
    };
    fac.L = [](const std::vector<double>&, const std::vector<cplx>& u) {
      const double uu = u[0].real(), ph = u[1].real();
      const double b1 = std::sqrt(2.0) * std::exp(uu / 2) * std::sin(ph / 2);
      const double b2 = -std::sqrt(2.0) * std::exp(uu / 2) * std::cos(ph / 2);
      const double al = -2.0 * std::atan2(b2, b1);
      ComplexMatrix R(2, 2);
      R(0, 0) = cplx(std::cos(al), 0);
      R(0, 1) = cplx(-std::sin(al), 0);
      R(1, 0) = cplx(std::sin(al), 0);
      R(1, 1) = cplx(std::cos(al), 0);
      return R;
    };
    const std::vector<cplx> f0 = {cplx(std::log(8.0), 0), cplx(3 * M_PI, 0)};
    const SampledPath path = simple_wave_integrate(wp, {1.0, 0.0}, fac, f0, 0.0, 1.0, 0.01);
    CHECK(std::abs(path.f.back()[0] - cplx(std::log(2.0), 0)) <= 1e-6);
    CHECK(std::abs(path.f.back()[1] - cplx(3 * M_PI, 0)) <= 1e-6);
  }

  TEST_CASE("trace conditions hold on subsystem solutions and flag corruption") {
    const SystemSpec sub = builtin_system("plasticity-subsystem");
    const PlasticityParams p = damped_params();
    const FieldEvaluator field = plasticity_subsystem_evaluator(p, PlasticityFamily::general);
    ComplexMatrix Lambda(2, 2);
    Lambda(0, 0) = cplx(1, 0);
    Lambda(0, 1) = cplx(0, 1);
    Lambda(1, 0) = cplx(1, 0);
    Lambda(1, 1) = cplx(0, -1);
    double worst = 0;
    for (const auto& pt : {std::array<double, 3>{0.3, 0.4, -0.2},
                           std::array<double, 3>{0.0, -0.5, 0.6},
                           std::array<double, 3>{0.8, 0.1, 0.1}}) {
      for (const cplx& z : trace_condition_residual(sub, field, Lambda, pt[0], pt[1], pt[2]))
        worst = std::max(worst, std::abs(z));
    }
    CHECK(worst <= 1e-6);

    FieldEvaluator bad = field;
    auto inner = field.eval;
    bad.eval = [inner](double t, double x, double y) {
      std::vector<double> v = inner(t, x, y);
      v[2] += x * x;  // u <- u + x^2 is not a solution
      return v;
    };
    double corrupted = 0;
    for (const cplx& z : trace_condition_residual(sub, bad, Lambda, 0.3, 0.4, -0.2))
      corrupted = std::max(corrupted, std::abs(z));
    CHECK(corrupted > 1e-3);
  }
}
