#pragma once

#include <complex>
#include <functional>
#include <optional>

namespace riemann {

// Complex error function. Maclaurin series for |z| <= 2.5, adaptive path
// quadrature of (2/sqrt(pi)) e^{-s^2} from a series anchor beyond that.
// Documented accuracy envelope |z| <= 12; outside it throws domain_error unless
// the caller explicitly accepts degraded accuracy.
std::complex<double> erf_c(std::complex<double> z, bool accept_degraded = false);

// erfi(z) = -i erf(iz), exactly in terms of erf_c.
std::complex<double> erfi_c(std::complex<double> z, bool accept_degraded = false);

// Newton inverse of erf_c with analytic derivative (2/sqrt(pi)) e^{-z^2};
// principal branch (continuously connected to z = 0 at w = 0). Default initial
// guess is the real Maclaurin initializer, valid for |w| < 1; for |w| >= 1 a
// caller guess is required. w = +-1 are branch points -> domain_error.
// Non-convergence within 64 iterations -> convergence_error carrying the last
// iterate. Result satisfies |erf(z) - w| <= 1e-11.
std::complex<double> inverse_erf_c(std::complex<double> w,
                                   std::optional<std::complex<double>> guess = std::nullopt);

// Adaptive-Simpson line integral of f along the straight segment [z0, z1].
// Exposed because the sigma quadrature and erf share it.
std::complex<double> integrate_segment(
    const std::function<std::complex<double>(std::complex<double>)>& f,
    std::complex<double> z0, std::complex<double> z1, double tol);

// Adaptive-Simpson integral of a real integrand on [a, b].
double integrate_real(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace riemann
