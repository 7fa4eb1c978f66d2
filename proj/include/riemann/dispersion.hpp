#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "riemann/algebra.hpp"
#include "riemann/systems.hpp"

namespace riemann {

// (lambda_i A^i(u)) gamma -- zero iff (lambda, gamma) is a characteristic pair.
std::vector<cplx> wave_relation_residual(const SystemSpec& sys, const std::vector<cplx>& u,
                                         const std::vector<cplx>& lambda,
                                         const std::vector<cplx>& gamma,
                                         const Expression::Env& extra = {});

// All roots zeta with rank(A^1 + zeta A^2) < min(m, q), gauge lambda = (1, zeta).
// Every min(m,q)-minor is expanded as a polynomial in zeta by sampling at
// min(m,q)+1 Chebyshev nodes and interpolating; roots come from companion
// matrices, root sets are intersected with clustering radius 1e-8 and the
// survivors are re-verified with rank_with_tolerance. Systems whose minors all
// vanish identically raise degenerate_error; p != 2 raises input_error.
std::vector<cplx> dispersion_roots_2d(const SystemSpec& sys, const std::vector<cplx>& u,
                                      const Expression::Env& extra = {});

// Basis of the right nullspace of a full-row-rank k' x p matrix of wave
// vectors; returns p - k' vectors xi with max|Lambda xi| <= 1e-10 scale.
std::vector<std::vector<cplx>> orthogonal_complement(const ComplexMatrix& Lambda);

enum class FactorMode { simple_wave, simple_mode };

// Candidate scalar/rotation/shift factorization of an inhomogeneous system.
// Handles must be pure; conjugate quantities are the complex conjugates of the
// primal evaluations.
struct InhomFactorization {
  std::function<cplx(const std::vector<double>& x, const std::vector<cplx>& u)> Omega;
  std::function<ComplexMatrix(const std::vector<double>& x, const std::vector<cplx>& u)> L;
  // Optional characteristic shift; validated against (A^i lambda_i) tau = 0
  // where supplied.
  std::function<std::vector<cplx>(const std::vector<double>& x, const std::vector<cplx>& u)> tau;
};

struct InhomResidual {
  std::vector<cplx> residual;
  bool vacuous = false;  // b == 0: the condition constrains nothing
};

// simple-wave: (Omega A^i lambda_i L - I) b;
// simple-mode: (A^i (lambda_i Omega L + conj(lambda_i Omega L)) - I) b.
InhomResidual inhom_condition_residual(const SystemSpec& sys, const std::vector<double>& x,
                                       const std::vector<cplx>& u, const InhomFactorization& fac,
                                       const std::vector<cplx>& lambda, FactorMode mode,
                                       const Expression::Env& extra = {});

// simple-wave: det(Omega A^i lambda_i L - I); simple-mode: det(A^i (lambda_i L
// + conj(lambda_i) Lbar) - I).
cplx inhom_dispersion_det(const SystemSpec& sys, const std::vector<cplx>& u,
                          const std::vector<cplx>& lambda, const ComplexMatrix& L,
                          const ComplexMatrix& Lbar, FactorMode mode, cplx Omega = cplx(1.0, 0.0),
                          const Expression::Env& extra = {});

// Diagnostic evaluation of the wave-particle factorization as printed: the
// rotation-matrix entries, their special-orthogonality, the simple-mode
// condition residual under both readings of the printed scalar factor
// (12^{1/4}(1 - eps*i) and 12^{1/4}(1 - eps^i)), and the mode-dispersion
// determinant. Nothing here is an invariant -- the CLI reports it verbatim.
struct WaveParticleFactorDiag {
  ComplexMatrix L;
  bool L_special_orthogonal = false;
  cplx omega_reading_a, omega_reading_b;
  double residual_reading_a = 0.0, residual_reading_b = 0.0;
  cplx mode_dispersion_det;  // with L alone (no scalar factor)
};
WaveParticleFactorDiag wave_particle_factorization_diag(double u, double phi, double a, int eps);

}  // namespace riemann
