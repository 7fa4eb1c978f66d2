#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riemann/dispersion.hpp"
#include "riemann/expression.hpp"
#include "riemann/fields.hpp"
#include "riemann/systems.hpp"

namespace riemann {

// ---------------------------------------------------------------------------
// Plasticity closed forms
// ---------------------------------------------------------------------------

enum class PlasticityFamily { general, case_i, case_ii };
PlasticityFamily family_from_string(const std::string& s);
std::string family_to_string(PlasticityFamily f);

// Complex coefficient of time: the damped form a e^{-s t} + i b e^{-q t} with
// analytic derivative, a constant, or an arbitrary expression of t
// (differentiated by central differences, step 1e-6).
class Coefficient {
 public:
  Coefficient();  // constant 0
  static Coefficient damped(double a, double s, double b, double q);
  static Coefficient constant(cplx c);
  static Coefficient expr(const std::string& text);

  cplx value(double t) const;
  cplx derivative(double t) const;

  // {"damped":{"a":..,"s":..,"b":..,"q":..}} | {"const":[re,im]} | {"expr": "..."}
  static Coefficient from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  enum class Kind { damped, constant, expression } kind_ = Kind::constant;
  double a_ = 0, s_ = 0, b_ = 0, q_ = 0;
  cplx c_{0.0, 0.0};
  std::shared_ptr<const Expression> e_;
  std::string text_;
};

struct PlasticityParams {
  Coefficient c1, c2, c3;
  Coefficient Omega = Coefficient::constant(1.0);   // separation constant (real part used);
                                                    // must be nonzero for the general family
  Coefficient sigma0;                               // pressure gauge sigma_0(t)
  double rho = 1.0;
  Expression V = parse_expression("0");             // potential V(t, x, y)
  std::string V_text = "0";

  // { "family": ..., "c1": coeff, "c2": coeff, "c3": coeff, "Omega": coeff,
  //   "sigma0": coeff, "rho": number, "V": expr-string } -- every key optional,
  //   family may also live outside. Unknown keys rejected.
  static PlasticityParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// h and its first two r-derivatives for the chosen family:
//   general : h = -(2 pi c1 / Omega) erfi(erf^{-1}(c2 + c1 r)) + c3
//   case-i  : h = c1 r + c2
//   case-ii : h = c1 / (r + c2) + c3
struct HTriple {
  cplx h, h1, h2;
};
HTriple h_eval(PlasticityFamily fam, const PlasticityParams& p, double t, cplx r);

// Extended chain (third r-derivative and time derivative), all analytic;
// the ODE residual and the sigma quadrature need them.
struct HChain {
  cplx h, h1, h2, h3, ht;
};
HChain h_chain(PlasticityFamily fam, const PlasticityParams& p, double t, cplx r);

struct FieldSample {
  double u = 0, v = 0, theta = 0, sigma = 0;
};

// Velocities, angle and pressure at (t, x, y). The linear (case-i) and
// inverse-linear (case-ii) families return their explicit closed forms; the
// general family evaluates u = h + conj h, v = i(h - conj h), theta from the
// two-argument arctangent branch in (-pi/2, pi/2].
FieldSample plasticity_fields(const PlasticityParams& p, PlasticityFamily fam, double t, double x,
                              double y);

// Pressure: closed form for case-i; otherwise the quadrature construction
//   sigma = -rho V + (1/2) sin 2theta + rho (u^2 + v^2)/2
//           + int_{x_ref}^x [rho u_t + theta_y sin 2theta] dxi
//           + int_{y_ref}^y [theta_x sin 2theta - 2 theta_y cos 2theta + rho v_t](x_ref) deta
//           + sigma_0(t)
// with adaptive-Simpson integrals (tol 1e-10) and analytic integrands.
double sigma_quadrature(const PlasticityParams& p, PlasticityFamily fam, double t, double x,
                        double y, double x_ref = 0.0, double y_ref = 0.0);

// The quadrature construction for any family (cross-check path). For case-i it
// runs over the explicit linear velocity fields and is anchored to the
// closed-form value at (t, x_ref, y_ref), so it reproduces the polynomial.
double sigma_quadrature_generic(const PlasticityParams& p, PlasticityFamily fam, double t,
                                double x, double y, double x_ref = 0.0, double y_ref = 0.0);

// ---------------------------------------------------------------------------
// Wave-particle closed form
// ---------------------------------------------------------------------------

// Holomorphic profile function psi(r). The derivative is computed by structural
// differentiation of the expression tree when every node is holomorphic
// (polynomials, exp, ratios, powers, ...); expressions containing abs/re/im/conj
// fall back to Richardson-extrapolated central differences (step 1e-5).
class HolomorphicFn {
 public:
  explicit HolomorphicFn(const std::string& psi_text);

  cplx psi(cplx r) const;
  cplx dpsi(cplx r) const;
  bool analytic_derivative() const { return analytic_; }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Expression> psi_;
  std::shared_ptr<const Expression> dpsi_;  // null when numeric fallback is in use
  bool analytic_ = false;
};

struct WaveSample {
  double u = 0, phi = 0;
};

// u = 2 ln(sqrt(8) |psi'| / (a (psi + conj psi))),
// phi = pi - 2 arg(psi') + 2 n pi   (n odd)
// where arg(psi') is lifted continuously along a segment from r_ref (default
// 1 + 0i) so that sin(phi/2), cos(phi/2) stay on the branch that solves the
// system; the principal log breaks across arg-wrap lines.
WaveSample wave_particle_fields(const HolomorphicFn& psi, double a, int n, double x, double y,
                                cplx r_ref = cplx(1.0, 0.0));

// ---------------------------------------------------------------------------
// Field evaluators (grid verification plumbing)
// ---------------------------------------------------------------------------

// Components ordered to match the builtin systems:
//   full      -> (sigma, theta, u, v); sigma is the self-consistent quadrature
//                over the evaluator's own velocity fields
//   reduced   -> (theta, u, v)
//   subsystem -> (theta_x, theta_y, u, v), derivatives analytic
FieldEvaluator plasticity_full_evaluator(const PlasticityParams& p, PlasticityFamily fam);
FieldEvaluator plasticity_reduced_evaluator(const PlasticityParams& p, PlasticityFamily fam);
FieldEvaluator plasticity_subsystem_evaluator(const PlasticityParams& p, PlasticityFamily fam);
// (u, phi)
FieldEvaluator wave_particle_evaluator(const HolomorphicFn& psi, double a, int n,
                                       cplx r_ref = cplx(1.0, 0.0));

// Mask predicate for the case-ii pole |r + c2| < radius (true = excluded).
std::function<bool(double, double, double)> case_ii_singularity_mask(const PlasticityParams& p,
                                                                     double radius);

// ---------------------------------------------------------------------------
// Simple-wave profile integrator
// ---------------------------------------------------------------------------

struct SampledPath {
  std::vector<double> r;
  std::vector<std::vector<cplx>> f;   // node states
  std::vector<std::vector<cplx>> df;  // node derivatives (dense output)
  // Cubic-Hermite interpolation between nodes; clamps to the span.
  std::vector<cplx> eval(double at) const;
};

// Classical RK4 (advance = two half steps; full step used for the step-doubling
// error estimate, rejection above 1e-8) on df/dr = Omega(u) L(u) b(u) [+ tau],
// constant real wave vector. tau, when supplied, is checked against
// (A^i lambda_i) tau = 0 at every stage. b == 0 reproduces f0 bit-exactly.
SampledPath simple_wave_integrate(const SystemSpec& sys, const std::vector<double>& lambda,
                                  const InhomFactorization& fac, const std::vector<cplx>& f0,
                                  double r0, double r1, double dr,
                                  const Expression::Env& extra = {});

// ---------------------------------------------------------------------------
// Trace conditions (constant wave vectors)
// ---------------------------------------------------------------------------

// tr(A^mu (df/dR) Lambda) for each equation mu of a p = 2 system, where
// df/dR = [df/dr, df/drbar] comes from 4th-order central differences of the
// evaluator rotated through Lambda^{-1} (Lambda square, rows = wave vectors).
std::vector<cplx> trace_condition_residual(const SystemSpec& sys, const FieldEvaluator& f,
                                           const ComplexMatrix& Lambda, double t, double x,
                                           double y, const Expression::Env& extra = {});

}  // namespace riemann
