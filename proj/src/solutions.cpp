#include "riemann/solutions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <utility>

#include "riemann/errors.hpp"
#include "riemann/specfun.hpp"

namespace riemann {

namespace {

std::string fmt_cplx(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

std::string fmt_point(double x, double y) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << x << ", " << y << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Families / coefficients / parameters
// ---------------------------------------------------------------------------

PlasticityFamily family_from_string(const std::string& s) {
  if (s == "general") return PlasticityFamily::general;
  if (s == "case-i" || s == "case_i") return PlasticityFamily::case_i;
  if (s == "case-ii" || s == "case_ii") return PlasticityFamily::case_ii;
  throw input_error("unknown plasticity family '" + s +
                    "'; expected general, case-i or case-ii");
}

std::string family_to_string(PlasticityFamily f) {
  switch (f) {
    case PlasticityFamily::general: return "general";
    case PlasticityFamily::case_i: return "case-i";
    case PlasticityFamily::case_ii: return "case-ii";
  }
  return "general";
}

Coefficient::Coefficient() : kind_(Kind::constant), c_(0.0, 0.0) {}

Coefficient Coefficient::damped(double a, double s, double b, double q) {
  Coefficient c;
  c.kind_ = Kind::damped;
  c.a_ = a;
  c.s_ = s;
  c.b_ = b;
  c.q_ = q;
  return c;
}

Coefficient Coefficient::constant(cplx v) {
  Coefficient c;
  c.kind_ = Kind::constant;
  c.c_ = v;
  return c;
}

Coefficient Coefficient::expr(const std::string& text) {
  Coefficient c;
  c.kind_ = Kind::expression;
  c.e_ = std::make_shared<const Expression>(parse_expression(text, {"t"}));
  c.text_ = text;
  return c;
}

cplx Coefficient::value(double t) const {
  switch (kind_) {
    case Kind::damped: return cplx(a_ * std::exp(-s_ * t), b_ * std::exp(-q_ * t));
    case Kind::constant: return c_;
    case Kind::expression: return e_->eval({{"t", cplx(t, 0.0)}});
  }
  return cplx(0.0, 0.0);
}

cplx Coefficient::derivative(double t) const {
  switch (kind_) {
    case Kind::damped:
      return cplx(-s_ * a_ * std::exp(-s_ * t), -q_ * b_ * std::exp(-q_ * t));
    case Kind::constant: return cplx(0.0, 0.0);
    case Kind::expression: {
      const double h = 1e-6;
      return (e_->eval({{"t", cplx(t + h, 0.0)}}) - e_->eval({{"t", cplx(t - h, 0.0)}})) /
             (2.0 * h);
    }
  }
  return cplx(0.0, 0.0);
}

Coefficient Coefficient::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.size() != 1)
    throw input_error(
        "coefficient must be an object with exactly one of 'damped', 'const', 'expr'");
  if (j.contains("damped")) {
    const auto& d = j.at("damped");
    if (!d.is_object()) throw input_error("'damped' coefficient body must be an object");
    double a = 0, s = 0, b = 0, q = 0;
    for (const auto& [k, v] : d.items()) {
      if (!v.is_number())
        throw input_error("'damped' entry '" + k + "' must be a number");
      if (k == "a") a = v.get<double>();
      else if (k == "s") s = v.get<double>();
      else if (k == "b") b = v.get<double>();
      else if (k == "q") q = v.get<double>();
      else throw input_error("unknown 'damped' coefficient key '" + k + "'");
    }
    return damped(a, s, b, q);
  }
  if (j.contains("const")) {
    const auto& c = j.at("const");
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
      throw input_error("'const' coefficient must be a [re, im] number pair");
    return constant(cplx(c[0].get<double>(), c[1].get<double>()));
  }
  if (j.contains("expr")) {
    const auto& e = j.at("expr");
    if (!e.is_string()) throw input_error("'expr' coefficient must be a string");
    return expr(e.get<std::string>());
  }
  throw input_error("coefficient must contain one of 'damped', 'const', 'expr'");
}

nlohmann::json Coefficient::to_json() const {
  switch (kind_) {
    case Kind::damped:
      return {{"damped", {{"a", a_}, {"s", s_}, {"b", b_}, {"q", q_}}}};
    case Kind::constant:
      return {{"const", {c_.real(), c_.imag()}}};
    case Kind::expression:
      return {{"expr", text_}};
  }
  return {};
}

PlasticityParams PlasticityParams::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw input_error("parameter document must be a JSON object");
  PlasticityParams p;
  for (const auto& [k, v] : j.items()) {
    if (k == "family") {
      if (!v.is_string()) throw input_error("'family' must be a string");
      family_from_string(v.get<std::string>());  // validated; carried by the caller
    } else if (k == "c1") {
      p.c1 = Coefficient::from_json(v);
    } else if (k == "c2") {
      p.c2 = Coefficient::from_json(v);
    } else if (k == "c3") {
      p.c3 = Coefficient::from_json(v);
    } else if (k == "Omega") {
      p.Omega = Coefficient::from_json(v);
    } else if (k == "sigma0") {
      p.sigma0 = Coefficient::from_json(v);
    } else if (k == "rho") {
      if (!v.is_number() || !(v.get<double>() > 0.0))
        throw input_error("'rho' must be a positive number");
      p.rho = v.get<double>();
    } else if (k == "V") {
      if (!v.is_string()) throw input_error("'V' must be an expression string");
      p.V_text = v.get<std::string>();
      p.V = parse_expression(p.V_text, {"t", "x", "y"});
    } else {
      throw input_error("unknown parameter key '" + k + "'");
    }
  }
  return p;
}

nlohmann::json PlasticityParams::to_json() const {
  return {{"c1", c1.to_json()},     {"c2", c2.to_json()},         {"c3", c3.to_json()},
          {"Omega", Omega.to_json()}, {"sigma0", sigma0.to_json()}, {"rho", rho},
          {"V", V_text}};
}

// ---------------------------------------------------------------------------
// The h chain
// ---------------------------------------------------------------------------

HChain h_chain(PlasticityFamily fam, const PlasticityParams& p, double t, cplx r) {
  const cplx c1 = p.c1.value(t), c2 = p.c2.value(t), c3 = p.c3.value(t);
  const cplx dc1 = p.c1.derivative(t), dc2 = p.c2.derivative(t), dc3 = p.c3.derivative(t);
  HChain out;
  switch (fam) {
    case PlasticityFamily::case_i: {
      out.h = c1 * r + c2;
      out.h1 = c1;
      out.h2 = cplx(0.0, 0.0);
      out.h3 = cplx(0.0, 0.0);
      out.ht = dc1 * r + dc2;
      break;
    }
    case PlasticityFamily::case_ii: {
      const cplx w = r + c2;
      if (std::abs(w) < 1e-9)
        throw singularity_error("pole of the inverse-linear profile: r + c2 vanishes at r = " +
                                fmt_cplx(r));
      const cplx iw = 1.0 / w;
      out.h = c1 * iw + c3;
      out.h1 = -c1 * iw * iw;
      out.h2 = 2.0 * c1 * iw * iw * iw;
      out.h3 = -6.0 * c1 * iw * iw * iw * iw;
      out.ht = dc1 * iw - c1 * dc2 * iw * iw + dc3;
      break;
    }
    case PlasticityFamily::general: {
      const double Om = p.Omega.value(t).real();
      const double dOm = p.Omega.derivative(t).real();
      if (Om == 0.0)
        throw input_error("the general profile family needs a nonzero separation constant Omega");
      const cplx w = c2 + c1 * r;
      if (std::abs(w - 1.0) < 1e-6 || std::abs(w + 1.0) < 1e-6)
        throw singularity_error(
            "branch point of the inverse error function (c2 + c1 r = +-1) near r = " +
            fmt_cplx(r));
      cplx z;
      try {
        z = inverse_erf_c(w);
      } catch (const domain_error&) {
        throw domain_error("the general profile family needs |c2 + c1 r| < 1; got " +
                           fmt_cplx(w) + " at r = " + fmt_cplx(r));
      }
      const cplx z2 = z * z;
      const cplx E2 = std::exp(2.0 * z2);
      const cplx erfi_z = erfi_c(z);
      const double two_pi = 2.0 * M_PI;
      const cplx c1_2 = c1 * c1;
      out.h = -(two_pi * c1 / Om) * erfi_z + c3;
      out.h1 = -(two_pi * c1_2 / Om) * E2;
      out.h2 = -(4.0 * std::sqrt(M_PI) * M_PI * c1_2 * c1 / Om) * z * std::exp(3.0 * z2);
      out.h3 = -(2.0 * M_PI * M_PI * c1_2 * c1_2 / Om) * std::exp(4.0 * z2) * (1.0 + 6.0 * z2);
      out.ht = -two_pi * (dc1 * Om - c1 * dOm) / (Om * Om) * erfi_z -
               (two_pi * c1 / Om) * E2 * (dc2 + dc1 * r) + dc3;
      break;
    }
  }
  return out;
}

HTriple h_eval(PlasticityFamily fam, const PlasticityParams& p, double t, cplx r) {
  const HChain c = h_chain(fam, p, t, r);
  return {c.h, c.h1, c.h2};
}

// ---------------------------------------------------------------------------
// Field chain: the self-consistent per-family field convention
// ---------------------------------------------------------------------------

namespace {

// Chain in the convention whose velocities match the explicit closed forms:
//   case-i  : h = 2 conj(c1) r + 2 conj(c2)
//   case-ii : h = c1 / (r + c2) + conj(c3) / 2
//   general : h as published
HChain field_chain(PlasticityFamily fam, const PlasticityParams& p, double t, cplx r) {
  switch (fam) {
    case PlasticityFamily::case_i: {
      const cplx c1e = 2.0 * std::conj(p.c1.value(t));
      const cplx c2e = 2.0 * std::conj(p.c2.value(t));
      HChain out;
      out.h = c1e * r + c2e;
      out.h1 = c1e;
      out.h2 = cplx(0.0, 0.0);
      out.h3 = cplx(0.0, 0.0);
      out.ht = 2.0 * std::conj(p.c1.derivative(t)) * r + 2.0 * std::conj(p.c2.derivative(t));
      return out;
    }
    case PlasticityFamily::case_ii: {
      HChain out = h_chain(fam, p, t, r);
      const cplx c3 = p.c3.value(t);
      const cplx dc3 = p.c3.derivative(t);
      out.h += std::conj(c3) / 2.0 - c3;
      out.ht += std::conj(dc3) / 2.0 - dc3;
      return out;
    }
    case PlasticityFamily::general:
      return h_chain(fam, p, t, r);
  }
  return {};
}

struct ChainFields {
  double u = 0, v = 0, ut = 0, vt = 0;
  double theta = 0, sin2t = 0, cos2t = 0;
  double theta_x = 0, theta_y = 0;
};

ChainFields chain_fields(const HChain& c, cplx r) {
  ChainFields f;
  f.u = 2.0 * c.h.real();
  f.v = -2.0 * c.h.imag();
  f.ut = 2.0 * c.ht.real();
  f.vt = -2.0 * c.ht.imag();
  const cplx g = c.h1;
  const double ag = std::abs(g);
  if (ag == 0.0 || g.imag() == 0.0) {
    // Degenerate branch of theta = (1/2) arctan(Re h' / Im h'): constant-angle
    // convention pi/4.
    f.theta = M_PI / 4.0;
    f.sin2t = 1.0;
    f.cos2t = 0.0;
  } else {
    const double two_theta = std::atan2(g.real(), g.imag());
    f.theta = 0.5 * two_theta;
    f.sin2t = g.real() / ag;
    f.cos2t = g.imag() / ag;
  }
  cplx G(0.0, 0.0);
  if (ag == 0.0) {
    if (std::abs(c.h2) != 0.0)
      throw singularity_error("angle gradient undefined: h' vanishes at r = " + fmt_cplx(r));
  } else {
    G = c.h2 / c.h1;
  }
  f.theta_x = -0.5 * G.imag();
  f.theta_y = -0.5 * G.real();
  return f;
}

double eval_potential(const PlasticityParams& p, double t, double x, double y) {
  return p.V
      .eval({{"t", cplx(t, 0.0)}, {"x", cplx(x, 0.0)}, {"y", cplx(y, 0.0)}})
      .real();
}

// The explicit pressure polynomial of the linear family (with time-dependent
// coefficients c1, c2 and gauge sigma0):
//   sigma = -rho V + rho (2|c1|^2 + Re c1') x^2 - 2 rho Im(c1') x y
//         + rho (2|c1|^2 - Re c1') y^2 + 2 rho (2 Re(c1 conj c2) + Re c2') x
//         - 2 rho (2 Im(c1 conj c2) + Im c2') y + sigma0(t)
double linear_sigma(cplx c1, cplx c2, cplx dc1, cplx dc2, double rho, double V, double s0,
                    double x, double y) {
  const double a2 = std::norm(c1);
  const cplx c1c2 = c1 * std::conj(c2);
  return -rho * V + rho * (2.0 * a2 + dc1.real()) * x * x - 2.0 * rho * dc1.imag() * x * y +
         rho * (2.0 * a2 - dc1.real()) * y * y +
         2.0 * rho * (2.0 * c1c2.real() + dc2.real()) * x -
         2.0 * rho * (2.0 * c1c2.imag() + dc2.imag()) * y + s0;
}

// The polynomial above is stated in a coefficient normalization that is twice
// the conjugate of the velocity-field coefficients: substituting 2 conj(c1),
// 2 conj(c2) makes its gradient match the fields
//   u = 4(Re c1 x + Im c1 y + Re c2), v = 4(Im c1 x - Re c1 y + Im c2),
// which is what the momentum equations require.
double linear_sigma_at(const PlasticityParams& p, double t, double x, double y) {
  const cplx c1 = 2.0 * std::conj(p.c1.value(t));
  const cplx c2 = 2.0 * std::conj(p.c2.value(t));
  const cplx dc1 = 2.0 * std::conj(p.c1.derivative(t));
  const cplx dc2 = 2.0 * std::conj(p.c2.derivative(t));
  return linear_sigma(c1, c2, dc1, dc2, p.rho, eval_potential(p, t, x, y),
                      p.sigma0.value(t).real(), x, y);
}

// Incremental-leg memo for the quadrature. Both legs are line integrals, so
// along a fixed line they extend additively: once a leg has been evaluated at
// an anchor, nearby requests (finite-difference stencils, grid sweeps) only
// integrate the short span from the anchor. Valid only while (x_ref, y_ref)
// stay fixed, which the owning evaluator guarantees.
struct WLegMemo {
  std::mutex m;
  // (t, y) -> (x anchor, x-leg value at the anchor)
  std::map<std::pair<double, double>, std::pair<double, double>> x_leg;
  // t -> (y anchor, y-leg value at the anchor); the y leg runs along x = x_ref
  std::map<double, std::pair<double, double>> y_leg;
};

// Pressure head + the two quadrature legs. `memo` may be null.
double sigma_generic_impl(const PlasticityParams& p, PlasticityFamily fam, double t, double x,
                          double y, double x_ref, double y_ref, WLegMemo* memo) {
  const double rho = p.rho;
  auto fields_at = [&](double X, double Y) {
    return chain_fields(field_chain(fam, p, t, cplx(X, Y)), cplx(X, Y));
  };
  auto head = [&](double X, double Y) {
    const ChainFields f = fields_at(X, Y);
    return -rho * eval_potential(p, t, X, Y) + 0.5 * f.sin2t +
           rho * (f.u * f.u + f.v * f.v) / 2.0;
  };

  const double quad_tol = 1e-10;
  auto x_integrand = [&](double xi) {
    const ChainFields f = fields_at(xi, y);
    return rho * f.ut + f.theta_y * f.sin2t;
  };
  auto y_integrand = [&](double eta) {
    const ChainFields f = fields_at(x_ref, eta);
    return f.theta_x * f.sin2t - 2.0 * f.theta_y * f.cos2t + rho * f.vt;
  };

  double x_leg, y_leg;
  if (memo != nullptr) {
    const std::pair<double, double> xkey(t, y);
    std::pair<double, double> anchor(x_ref, 0.0);
    {
      std::lock_guard<std::mutex> lock(memo->m);
      auto it = memo->x_leg.find(xkey);
      if (it != memo->x_leg.end()) anchor = it->second;
    }
    x_leg = anchor.second + ((x == anchor.first)
                                 ? 0.0
                                 : integrate_real(x_integrand, anchor.first, x, quad_tol));
    {
      std::lock_guard<std::mutex> lock(memo->m);
      memo->x_leg[xkey] = std::make_pair(x, x_leg);  // advance the anchor
    }

    std::pair<double, double> yanchor(y_ref, 0.0);
    {
      std::lock_guard<std::mutex> lock(memo->m);
      auto it = memo->y_leg.find(t);
      if (it != memo->y_leg.end()) yanchor = it->second;
    }
    y_leg = yanchor.second + ((y == yanchor.first)
                                  ? 0.0
                                  : integrate_real(y_integrand, yanchor.first, y, quad_tol));
    {
      std::lock_guard<std::mutex> lock(memo->m);
      memo->y_leg[t] = std::make_pair(y, y_leg);  // advance the anchor
    }
  } else {
    x_leg = integrate_real(x_integrand, x_ref, x, quad_tol);
    y_leg = integrate_real(y_integrand, y_ref, y, quad_tol);
  }

  const double base = head(x, y) + x_leg + y_leg;
  if (fam == PlasticityFamily::case_i) {
    // Anchor the additive gauge so the quadrature reproduces the polynomial
    // (in the effective-coefficient convention matching these fields).
    return base + (linear_sigma_at(p, t, x_ref, y_ref) - head(x_ref, y_ref));
  }
  return base + p.sigma0.value(t).real();
}

}  // namespace

double sigma_quadrature_generic(const PlasticityParams& p, PlasticityFamily fam, double t,
                                double x, double y, double x_ref, double y_ref) {
  return sigma_generic_impl(p, fam, t, x, y, x_ref, y_ref, nullptr);
}

double sigma_quadrature(const PlasticityParams& p, PlasticityFamily fam, double t, double x,
                        double y, double x_ref, double y_ref) {
  if (fam == PlasticityFamily::case_i) return linear_sigma_at(p, t, x, y);
  return sigma_quadrature_generic(p, fam, t, x, y, x_ref, y_ref);
}

FieldSample plasticity_fields(const PlasticityParams& p, PlasticityFamily fam, double t, double x,
                              double y) {
  FieldSample out;
  if (fam == PlasticityFamily::case_i) {
    const cplx c1 = p.c1.value(t), c2 = p.c2.value(t);
    out.u = 4.0 * (c1.real() * x + c1.imag() * y + c2.real());
    out.v = 4.0 * (c1.imag() * x - c1.real() * y + c2.imag());
    out.theta =
        (c1.imag() == 0.0) ? M_PI / 4.0 : -0.5 * std::atan(c1.real() / c1.imag());
    out.sigma = linear_sigma_at(p, t, x, y);
    return out;
  }
  const ChainFields f = chain_fields(field_chain(fam, p, t, cplx(x, y)), cplx(x, y));
  out.u = f.u;
  out.v = f.v;
  out.theta = f.theta;
  out.sigma = sigma_quadrature(p, fam, t, x, y);
  return out;
}

// ---------------------------------------------------------------------------
// Wave-particle closed form
// ---------------------------------------------------------------------------

HolomorphicFn::HolomorphicFn(const std::string& psi_text) : text_(psi_text) {
  auto e = std::make_shared<const Expression>(parse_expression(psi_text, {"r"}));
  psi_ = e;
  try {
    dpsi_ = std::make_shared<const Expression>(differentiate(*e, "r"));
    analytic_ = true;
  } catch (const eval_error&) {
    dpsi_.reset();
    analytic_ = false;
  }
}

cplx HolomorphicFn::psi(cplx r) const { return psi_->eval({{"r", r}}); }

cplx HolomorphicFn::dpsi(cplx r) const {
  if (analytic_) return dpsi_->eval({{"r", r}});
  // Richardson-extrapolated central difference along the real direction
  // (sufficient for a holomorphic function).
  const double h = 1e-5;
  auto central = [&](double step) {
    return (psi_->eval({{"r", r + cplx(step, 0.0)}}) - psi_->eval({{"r", r - cplx(step, 0.0)}})) /
           (2.0 * step);
  };
  const cplx d1 = central(h);
  const cplx d2 = central(h / 2.0);
  return (4.0 * d2 - d1) / 3.0;
}

WaveSample wave_particle_fields(const HolomorphicFn& psi, double a, int n, double x, double y,
                                cplx r_ref) {
  if (!(a > 0.0)) throw input_error("the coupling constant a must be positive");
  if (n % 2 == 0) throw input_error("the branch index n must be odd");
  const cplx r(x, y);
  const cplx pv = psi.psi(r);
  const double denom = 2.0 * pv.real();
  const cplx d = psi.dpsi(r);
  if (!(denom > 0.0))
    throw domain_error("psi + conj(psi) must be positive; got " + std::to_string(denom) +
                       " at " + fmt_point(x, y));
  if (std::abs(d) == 0.0) throw domain_error("psi' vanishes at " + fmt_point(x, y));

  WaveSample out;
  out.u = 2.0 * std::log(std::sqrt(8.0) * std::abs(d) / (a * denom));

  const cplx d0 = psi.dpsi(r_ref);
  if (std::abs(d0) == 0.0)
    throw domain_error("psi' vanishes at the branch reference point " +
                       fmt_point(r_ref.real(), r_ref.imag()));
  double alpha = std::arg(d0);
  // Continuous lift of arg(psi') along the segment r_ref -> r: accumulate
  // principal args of successive ratios, subdividing until each turn is well
  // below pi/2 so no wrap can hide inside a step.
  std::function<double(cplx, cplx, cplx, int)> lift = [&](cplx z0, cplx z1, cplx f0,
                                                          int depth) -> double {
    const cplx f1 = psi.dpsi(z1);
    if (std::abs(f1) == 0.0 || !std::isfinite(f1.real()) || !std::isfinite(f1.imag()))
      throw domain_error("psi' vanishes on the branch path from " +
                         fmt_point(r_ref.real(), r_ref.imag()) + " to " + fmt_point(x, y));
    const double da = std::arg(f1 / f0);
    if (std::abs(da) < 1.5) return da;
    if (depth >= 60)
      throw domain_error("cannot lift arg(psi') continuously from " +
                         fmt_point(r_ref.real(), r_ref.imag()) + " to " + fmt_point(x, y));
    const cplx zm = 0.5 * (z0 + z1);
    const double left = lift(z0, zm, f0, depth + 1);
    const cplx fm = psi.dpsi(zm);
    return left + lift(zm, z1, fm, depth + 1);
  };
  if (r != r_ref) alpha += lift(r_ref, r, d0, 0);
  out.phi = M_PI - 2.0 * alpha + 2.0 * M_PI * static_cast<double>(n);
  return out;
}

// ---------------------------------------------------------------------------
// Field evaluators
// ---------------------------------------------------------------------------

FieldEvaluator plasticity_full_evaluator(const PlasticityParams& p, PlasticityFamily fam) {
  FieldEvaluator F;
  F.q = 4;
  F.names = {"sigma", "theta", "u", "v"};
  F.period = {0.0, M_PI, 0.0, 0.0};
  auto memo = std::make_shared<WLegMemo>();
  F.eval = [p, fam, memo](double t, double x, double y) {
    const ChainFields f = chain_fields(field_chain(fam, p, t, cplx(x, y)), cplx(x, y));
    double sigma;
    if (fam == PlasticityFamily::case_i)
      sigma = linear_sigma_at(p, t, x, y);
    else
      sigma = sigma_generic_impl(p, fam, t, x, y, 0.0, 0.0, memo.get());
    return std::vector<double>{sigma, f.theta, f.u, f.v};
  };
  return F;
}

FieldEvaluator plasticity_reduced_evaluator(const PlasticityParams& p, PlasticityFamily fam) {
  FieldEvaluator F;
  F.q = 3;
  F.names = {"theta", "u", "v"};
  F.period = {M_PI, 0.0, 0.0};
  F.eval = [p, fam](double t, double x, double y) {
    const ChainFields f = chain_fields(field_chain(fam, p, t, cplx(x, y)), cplx(x, y));
    return std::vector<double>{f.theta, f.u, f.v};
  };
  return F;
}

FieldEvaluator plasticity_subsystem_evaluator(const PlasticityParams& p, PlasticityFamily fam) {
  FieldEvaluator F;
  F.q = 4;
  F.names = {"phi", "psi", "u", "v"};
  F.period = {0.0, 0.0, 0.0, 0.0};
  F.eval = [p, fam](double t, double x, double y) {
    const ChainFields f = chain_fields(field_chain(fam, p, t, cplx(x, y)), cplx(x, y));
    return std::vector<double>{f.theta_x, f.theta_y, f.u, f.v};
  };
  return F;
}

FieldEvaluator wave_particle_evaluator(const HolomorphicFn& psi, double a, int n, cplx r_ref) {
  FieldEvaluator F;
  F.q = 2;
  F.names = {"u", "phi"};
  F.period = {0.0, 0.0};
  F.eval = [psi, a, n, r_ref](double /*t*/, double x, double y) {
    const WaveSample s = wave_particle_fields(psi, a, n, x, y, r_ref);
    return std::vector<double>{s.u, s.phi};
  };
  return F;
}

std::function<bool(double, double, double)> case_ii_singularity_mask(const PlasticityParams& p,
                                                                     double radius) {
  return [p, radius](double t, double x, double y) {
    return std::abs(cplx(x, y) + p.c2.value(t)) < radius;
  };
}

// ---------------------------------------------------------------------------
// Simple-wave profile integrator
// ---------------------------------------------------------------------------

std::vector<cplx> SampledPath::eval(double at) const {
  if (r.empty()) throw input_error("empty sampled path");
  if (r.size() == 1) return f.front();
  const double lo = std::min(r.front(), r.back());
  const double hi = std::max(r.front(), r.back());
  double s = std::clamp(at, lo, hi);
  // Nodes are monotone in the trace direction; normalize to ascending index.
  const bool ascending = r.back() >= r.front();
  std::size_t i = 0;
  if (ascending) {
    while (i + 2 < r.size() && r[i + 1] <= s) ++i;
  } else {
    while (i + 2 < r.size() && r[i + 1] >= s) ++i;
  }
  const double h = r[i + 1] - r[i];
  const double w = (s - r[i]) / h;
  const double w2 = w * w, w3 = w2 * w;
  const double b00 = 2 * w3 - 3 * w2 + 1;
  const double b10 = w3 - 2 * w2 + w;
  const double b01 = -2 * w3 + 3 * w2;
  const double b11 = w3 - w2;
  std::vector<cplx> out(f[i].size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = b00 * f[i][k] + b10 * h * df[i][k] + b01 * f[i + 1][k] + b11 * h * df[i + 1][k];
  return out;
}

SampledPath simple_wave_integrate(const SystemSpec& sys, const std::vector<double>& lambda,
                                  const InhomFactorization& fac, const std::vector<cplx>& f0,
                                  double r0, double r1, double dr, const Expression::Env& extra) {
  if (lambda.size() != sys.p)
    throw input_error("lambda must have " + std::to_string(sys.p) + " components");
  if (f0.size() != sys.q)
    throw input_error("initial state must have " + std::to_string(sys.q) + " components");
  if (!(dr > 0.0)) throw input_error("dr must be positive");
  if (!fac.Omega || !fac.L) throw input_error("the factorization must supply Omega and L");
  double lam2 = 0.0;
  for (double l : lambda) lam2 += l * l;
  if (lam2 == 0.0) throw input_error("lambda must be nonzero");

  auto x_of_r = [&](double r) {
    std::vector<double> x(sys.p);
    for (std::size_t i = 0; i < sys.p; ++i) x[i] = r * lambda[i] / lam2;
    return x;
  };

  auto rhs = [&](double r, const std::vector<cplx>& u) {
    const std::vector<double> x = x_of_r(r);
    Expression::Env env;
    if (sys.env_provider) {
      double tt = 0, xx = 0, yy = 0;
      if (sys.p >= 3) {
        tt = x[0];
        xx = x[1];
        yy = x[2];
      } else if (sys.p == 2) {
        xx = x[0];
        yy = x[1];
      } else if (sys.p == 1) {
        xx = x[0];
      }
      env = sys.env_provider(tt, xx, yy);
    }
    for (const auto& kv : extra) env[kv.first] = kv.second;
    auto [As, b] = eval_system(sys, u, env);

    const ComplexMatrix L = fac.L(x, u);
    if (L.rows() != sys.q || L.cols() != sys.q)
      throw input_error("L must be q x q");
    const cplx Om = fac.Omega(x, u);

    std::vector<cplx> drift(sys.q, cplx(0.0, 0.0));
    if (sys.m != sys.q)
      throw input_error("the profile equation needs a square system (m = q)");
    for (std::size_t i = 0; i < sys.q; ++i) {
      cplx acc(0.0, 0.0);
      for (std::size_t j = 0; j < sys.q; ++j) acc += L(i, j) * b[j];
      drift[i] = Om * acc;
    }
    if (fac.tau) {
      const std::vector<cplx> tau = fac.tau(x, u);
      if (tau.size() != sys.q) throw input_error("tau must have q components");
      // tau must lie in the kernel of S = lambda_i A^i.
      ComplexMatrix S(sys.m, sys.q);
      for (std::size_t i = 0; i < sys.p; ++i)
        for (std::size_t rr = 0; rr < sys.m; ++rr)
          for (std::size_t cc = 0; cc < sys.q; ++cc) S(rr, cc) += lambda[i] * As[i](rr, cc);
      double tau_scale = 0.0;
      for (const cplx& tv : tau) tau_scale = std::max(tau_scale, std::abs(tv));
      const double bound = 1e-8 * std::max(1.0, S.max_abs() * tau_scale);
      for (std::size_t rr = 0; rr < sys.m; ++rr) {
        cplx acc(0.0, 0.0);
        for (std::size_t cc = 0; cc < sys.q; ++cc) acc += S(rr, cc) * tau[cc];
        if (std::abs(acc) > bound)
          throw input_error("tau violates the characteristic condition (lambda_i A^i) tau = 0");
      }
      for (std::size_t k = 0; k < sys.q; ++k) drift[k] += tau[k];
    }
    return drift;
  };

  auto rk4_step = [&](double r, const std::vector<cplx>& u, double h) {
    const std::vector<cplx> k1 = rhs(r, u);
    std::vector<cplx> tmp(sys.q);
    for (std::size_t k = 0; k < sys.q; ++k) tmp[k] = u[k] + 0.5 * h * k1[k];
    const std::vector<cplx> k2 = rhs(r + 0.5 * h, tmp);
    for (std::size_t k = 0; k < sys.q; ++k) tmp[k] = u[k] + 0.5 * h * k2[k];
    const std::vector<cplx> k3 = rhs(r + 0.5 * h, tmp);
    for (std::size_t k = 0; k < sys.q; ++k) tmp[k] = u[k] + h * k3[k];
    const std::vector<cplx> k4 = rhs(r + h, tmp);
    std::vector<cplx> out(sys.q);
    for (std::size_t k = 0; k < sys.q; ++k)
      out[k] = u[k] + (h / 6.0) * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    return out;
  };

  SampledPath path;
  const double span = r1 - r0;
  const std::size_t steps =
      (span == 0.0) ? 0 : static_cast<std::size_t>(std::ceil(std::abs(span) / dr - 1e-12));
  const double h = (steps == 0) ? 0.0 : span / static_cast<double>(steps);

  std::vector<cplx> u = f0;
  path.r.push_back(r0);
  path.f.push_back(u);
  path.df.push_back(rhs(r0, u));
  for (std::size_t k = 0; k < steps; ++k) {
    const double r = r0 + static_cast<double>(k) * h;
    const std::vector<cplx> full = rk4_step(r, u, h);
    std::vector<cplx> half = rk4_step(r, u, 0.5 * h);
    half = rk4_step(r + 0.5 * h, half, 0.5 * h);
    double err = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < sys.q; ++j) {
      err = std::max(err, std::abs(half[j] - full[j]));
      scale = std::max(scale, std::abs(half[j]));
    }
    err /= 15.0;
    if (err > 1e-8 * scale)
      throw convergence_error("step-doubling error estimate " + std::to_string(err) +
                                  " exceeds tolerance at r = " + std::to_string(r + h) +
                                  "; reduce dr",
                              cplx(r + h, 0.0));
    u = std::move(half);
    const double rn = r0 + static_cast<double>(k + 1) * h;
    path.r.push_back(rn);
    path.f.push_back(u);
    path.df.push_back(rhs(rn, u));
  }
  return path;
}

// ---------------------------------------------------------------------------
// Trace conditions
// ---------------------------------------------------------------------------

std::vector<cplx> trace_condition_residual(const SystemSpec& sys, const FieldEvaluator& f,
                                           const ComplexMatrix& Lambda, double t, double x,
                                           double y, const Expression::Env& extra) {
  if (sys.p != 2) throw input_error("trace conditions are formulated for p = 2 systems");
  if (Lambda.rows() != 2 || Lambda.cols() != 2)
    throw input_error("Lambda must be the 2 x 2 wave-vector matrix");
  if (f.q != sys.q) throw input_error("evaluator and system disagree on q");

  const cplx det = Lambda(0, 0) * Lambda(1, 1) - Lambda(0, 1) * Lambda(1, 0);
  if (std::abs(det) < 1e-14) throw input_error("Lambda is singular");

  // 4th-order central differences of the evaluator; step 1e-4 relative scale.
  auto jac = [&]() {
    const double step = 1e-4;
    std::vector<std::array<double, 2>> J(f.q, {0.0, 0.0});
    for (int axis = 0; axis < 2; ++axis) {
      const double coord = (axis == 0) ? x : y;
      const double hh = step * std::max(1.0, std::abs(coord));
      auto at = [&](double delta) {
        const double xx = (axis == 0) ? x + delta : x;
        const double yy = (axis == 1) ? y + delta : y;
        return f.eval(t, xx, yy);
      };
      const auto fp1 = at(hh), fm1 = at(-hh), fp2 = at(2 * hh), fm2 = at(-2 * hh);
      for (std::size_t k = 0; k < f.q; ++k)
        J[k][axis] = (-fp2[k] + 8.0 * fp1[k] - 8.0 * fm1[k] + fm2[k]) / (12.0 * hh);
    }
    return J;
  }();

  // D = J_xy Lambda^{-1}  (columns: d/dr, d/drbar).
  ComplexMatrix D(sys.q, 2);
  const cplx inv00 = Lambda(1, 1) / det, inv01 = -Lambda(0, 1) / det;
  const cplx inv10 = -Lambda(1, 0) / det, inv11 = Lambda(0, 0) / det;
  for (std::size_t k = 0; k < sys.q; ++k) {
    D(k, 0) = jac[k][0] * inv00 + jac[k][1] * inv10;
    D(k, 1) = jac[k][0] * inv01 + jac[k][1] * inv11;
  }

  const std::vector<double> state = f.eval(t, x, y);
  std::vector<cplx> u(state.size());
  for (std::size_t k = 0; k < state.size(); ++k) u[k] = cplx(state[k], 0.0);
  Expression::Env env;
  if (sys.env_provider) env = sys.env_provider(t, x, y);
  for (const auto& kv : extra) env[kv.first] = kv.second;
  auto [As, b] = eval_system(sys, u, env);

  std::vector<cplx> out(sys.m, cplx(0.0, 0.0));
  for (std::size_t mu = 0; mu < sys.m; ++mu) {
    // A^mu is the 2 x q slice (row mu of A^x; row mu of A^y); the residual is
    // tr(A^mu D Lambda).
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t al = 0; al < sys.q; ++al)
        for (std::size_t R = 0; R < 2; ++R) acc += As[i](mu, al) * D(al, R) * Lambda(R, i);
    out[mu] = acc;
  }
  return out;
}

}  // namespace riemann
