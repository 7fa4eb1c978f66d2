#include "riemann/specfun.hpp"

#include <cmath>
#include <complex>

#include "riemann/errors.hpp"

namespace riemann {

namespace {

using cplx = std::complex<double>;

constexpr double kTwoOverSqrtPi = 1.1283791670955126;  // 2/sqrt(pi)
constexpr double kSqrtPiOver2 = 0.88622692545275801;   // sqrt(pi)/2

bool finite_c(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Maclaurin series; accurate to ~1e-13 relative for |z| <= 2.5.
cplx erf_series(const cplx& z) {
  const cplx z2 = z * z;
  cplx term = z;       // z^{2n+1} (-1)^n / n!
  cplx sum = z;        // partial sum of term/(2n+1)
  for (int n = 1; n < 200; ++n) {
    term *= -z2 / static_cast<double>(n);
    const cplx contrib = term / static_cast<double>(2 * n + 1);
    sum += contrib;
    if (std::abs(contrib) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return kTwoOverSqrtPi * sum;
}

// Recursive adaptive Simpson; error target is relative to the magnitude of the
// whole-interval estimate so that huge integrands (e.g. e^{+s^2} growth along
// the imaginary axis) terminate.
template <typename Value>
Value simpson_rec(const std::function<Value(double)>& f, double a, double b, Value fa, Value fm,
                  Value fb, Value whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const Value flm = f(lm), frm = f(rm);
  const Value left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const Value right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const Value sum2 = left + right;
  if (std::abs(sum2 - whole) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(sum2 - whole) > 15.0 * tol)
      throw convergence_error("adaptive quadrature failed to converge", sum2);
    return sum2 + (sum2 - whole) / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename Value>
Value simpson_adaptive(const std::function<Value(double)>& f, double a, double b, double tol) {
  if (a == b) return Value{};
  const Value fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  const Value whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double eff = tol * std::max(1.0, std::abs(whole));
  return simpson_rec<Value>(f, a, b, fa, fm, fb, whole, eff, 48);
}

}  // namespace

cplx integrate_segment(const std::function<cplx(cplx)>& f, cplx z0, cplx z1, double tol) {
  if (!finite_c(z0) || !finite_c(z1)) throw input_error("integrate_segment: non-finite endpoint");
  if (!(tol > 0.0)) throw input_error("integrate_segment: tolerance must be positive");
  const cplx dz = z1 - z0;
  if (dz == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
  std::function<cplx(double)> g = [&f, z0, dz](double t) {
    const cplx v = f(z0 + t * dz);
    if (!finite_c(v)) throw eval_error("integrate_segment: integrand not finite");
    return v;
  };
  return dz * simpson_adaptive<cplx>(g, 0.0, 1.0, tol);
}

double integrate_real(const std::function<double(double)>& f, double a, double b, double tol) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw input_error("integrate_real: non-finite endpoint");
  if (!(tol > 0.0)) throw input_error("integrate_real: tolerance must be positive");
  std::function<double(double)> g = [&f](double t) {
    const double v = f(t);
    if (!std::isfinite(v)) throw eval_error("integrate_real: integrand not finite");
    return v;
  };
  return simpson_adaptive<double>(g, a, b, tol);
}

cplx erf_c(cplx z, bool accept_degraded) {
  if (!finite_c(z)) throw input_error("erf_c: non-finite argument");
  const double az = std::abs(z);
  if (az <= 2.5) return erf_series(z);
  if (az > 12.0 && !accept_degraded)
    throw domain_error("erf_c: |z| > 12 is outside the documented accuracy envelope");
  // Series anchor on the same ray, then path quadrature of the Gaussian in
  // chunks of length <= 1 (keeps the per-chunk dynamic range tractable).
  const cplx anchor = (2.5 / az) * z;
  cplx total = erf_series(anchor);
  const int chunks = static_cast<int>(std::ceil(az - 2.5));
  const cplx gap = z - anchor;
  cplx prev = anchor;
  for (int k = 1; k <= chunks; ++k) {
    const cplx next = (k == chunks) ? z : anchor + (static_cast<double>(k) / chunks) * gap;
    total += integrate_segment(
        [](cplx s) { return kTwoOverSqrtPi * std::exp(-s * s); }, prev, next, 1e-13);
    prev = next;
  }
  return total;
}

cplx erfi_c(cplx z, bool accept_degraded) {
  const cplx r = erf_c(cplx(-z.imag(), z.real()), accept_degraded);  // erf(i z)
  return cplx(r.imag(), -r.real());                                  // -i erf(i z)
}

cplx inverse_erf_c(cplx w, std::optional<cplx> guess) {
  if (!finite_c(w)) throw input_error("inverse_erf_c: non-finite argument");
  if (w == cplx(1.0, 0.0) || w == cplx(-1.0, 0.0))
    throw domain_error("inverse_erf_c: w = +-1 is a branch point");
  cplx z;
  if (guess) {
    if (!finite_c(*guess)) throw input_error("inverse_erf_c: non-finite guess");
    z = *guess;
  } else {
    if (std::abs(w) >= 1.0)
      throw domain_error("inverse_erf_c: |w| >= 1 requires an explicit initial guess");
    // Odd Maclaurin initializer of the principal inverse branch.
    const cplx m = kSqrtPiOver2 * w;
    const cplx m2 = m * m;
    constexpr double pi = 3.14159265358979323846;
    z = m * (1.0 + m2 * (pi / 12.0 + m2 * (7.0 * pi * pi / 480.0 +
                                           m2 * (127.0 * pi * pi * pi / 40320.0))));
  }
  cplx last = z;
  for (int it = 0; it < 64; ++it) {
    const cplx f = erf_c(z, true) - w;
    if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(w))) return z;
    const cplx deriv = kTwoOverSqrtPi * std::exp(-z * z);
    if (!finite_c(deriv) || deriv == cplx(0.0, 0.0))
      throw convergence_error("inverse_erf_c: derivative vanished", z);
    cplx step = f / deriv;
    const double cap = 0.5 * (1.0 + std::abs(z));  // damping against overshoot
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    last = z;
    z -= step;
    if (!finite_c(z)) throw convergence_error("inverse_erf_c: iterate diverged", last);
  }
  if (std::abs(erf_c(z, true) - w) <= 1e-11 * std::max(1.0, std::abs(w))) return z;
  throw convergence_error("inverse_erf_c: no convergence in 64 iterations", z);
}

}  // namespace riemann
