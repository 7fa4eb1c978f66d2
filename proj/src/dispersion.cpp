#include "riemann/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "riemann/errors.hpp"

namespace riemann {

namespace {

// Solve a small dense complex linear system in place (partial pivoting).
std::vector<cplx> solve_dense(ComplexMatrix M, std::vector<cplx> rhs) {
  const std::size_t n = M.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(M(r, k)) > std::abs(M(piv, k))) piv = r;
    if (std::abs(M(piv, k)) == 0.0) throw degenerate_error("solve_dense: singular matrix");
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(M(piv, c), M(k, c));
      std::swap(rhs[piv], rhs[k]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx f = M(r, k) / M(k, k);
      for (std::size_t c = k; c < n; ++c) M(r, c) -= f * M(k, c);
      rhs[r] -= f * rhs[k];
    }
  }
  std::vector<cplx> x(n);
  for (std::size_t k = n; k-- > 0;) {
    cplx acc = rhs[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= M(k, c) * x[c];
    x[k] = acc / M(k, k);
  }
  return x;
}

// k x k minor (selected rows/cols) of A1 + zeta A2.
cplx minor_at(const ComplexMatrix& A1, const ComplexMatrix& A2, const std::vector<std::size_t>& rows,
              const std::vector<std::size_t>& cols, cplx zeta) {
  const std::size_t k = rows.size();
  ComplexMatrix M(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      M(i, j) = A1(rows[i], cols[j]) + zeta * A2(rows[i], cols[j]);
  return determinant(M);
}

void combinations(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    out.push_back(idx);
    std::size_t i = k;
    while (i-- > 0) {
      if (idx[i] != i + n - k) {
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

ComplexMatrix sum_lambda_A(const std::vector<ComplexMatrix>& As, const std::vector<cplx>& lambda) {
  ComplexMatrix S(As[0].rows(), As[0].cols());
  for (std::size_t i = 0; i < As.size(); ++i)
    for (std::size_t r = 0; r < S.rows(); ++r)
      for (std::size_t c = 0; c < S.cols(); ++c) S(r, c) += lambda[i] * As[i](r, c);
  return S;
}

ComplexMatrix conj_matrix(const ComplexMatrix& M) {
  ComplexMatrix C(M.rows(), M.cols());
  for (std::size_t r = 0; r < M.rows(); ++r)
    for (std::size_t c = 0; c < M.cols(); ++c) C(r, c) = std::conj(M(r, c));
  return C;
}

}  // namespace

std::vector<cplx> wave_relation_residual(const SystemSpec& sys, const std::vector<cplx>& u,
                                         const std::vector<cplx>& lambda,
                                         const std::vector<cplx>& gamma,
                                         const Expression::Env& extra) {
  if (lambda.size() != sys.p) throw input_error("wave_relation_residual: lambda must have p entries");
  if (gamma.size() != sys.q) throw input_error("wave_relation_residual: gamma must have q entries");
  auto [As, b] = eval_system(sys, u, extra);
  (void)b;
  return sum_lambda_A(As, lambda) * gamma;
}

std::vector<cplx> dispersion_roots_2d(const SystemSpec& sys, const std::vector<cplx>& u,
                                      const Expression::Env& extra) {
  if (sys.p != 2) throw input_error("dispersion_roots_2d: only p = 2 systems are supported");
  auto [As, b] = eval_system(sys, u, extra);
  (void)b;
  const ComplexMatrix &A1 = As[0], &A2 = As[1];
  const std::size_t k = std::min(sys.m, sys.q);

  std::vector<std::vector<std::size_t>> row_sets, col_sets;
  combinations(sys.m, k, row_sets);
  combinations(sys.q, k, col_sets);

  // Chebyshev sample nodes of radius 2; k+1 of them pin a degree-k polynomial.
  const std::size_t nodes = k + 1;
  std::vector<cplx> zs(nodes);
  ComplexMatrix vand(nodes, nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    zs[j] = 2.0 * std::cos(M_PI * (2.0 * j + 1.0) / (2.0 * nodes));
    cplx pw(1.0, 0.0);
    for (std::size_t c = 0; c < nodes; ++c) {
      vand(j, c) = pw;
      pw *= zs[j];
    }
  }

  const double scale = std::max(1.0, A1.max_abs() + 2.0 * A2.max_abs());
  const double zero_tol = 1e-10 * std::pow(scale, static_cast<double>(k));
  const double cluster = 1e-8;

  bool any_nonzero_minor = false;
  bool have_set = false;
  std::vector<cplx> roots;

  for (const auto& rows : row_sets) {
    for (const auto& cols : col_sets) {
      std::vector<cplx> vals(nodes);
      double vmax = 0.0;
      for (std::size_t j = 0; j < nodes; ++j) {
        vals[j] = minor_at(A1, A2, rows, cols, zs[j]);
        vmax = std::max(vmax, std::abs(vals[j]));
      }
      if (vmax <= zero_tol) continue;  // identically zero minor constrains nothing
      any_nonzero_minor = true;
      std::vector<cplx> coeffs = solve_dense(vand, vals);
      // A nonzero-constant minor has no roots: the intersection is empty.
      bool nonconstant = false;
      for (std::size_t c = 1; c < coeffs.size(); ++c)
        if (std::abs(coeffs[c]) > 1e-10 * vmax) nonconstant = true;
      if (!nonconstant) return {};
      std::vector<cplx> mroots = polynomial_roots(coeffs);
      if (!have_set) {
        roots = std::move(mroots);
        have_set = true;
      } else {
        std::vector<cplx> kept;
        for (const cplx& r : roots)
          for (const cplx& s : mroots)
            if (std::abs(r - s) <= cluster) {
              kept.push_back((r + s) / 2.0);
              break;
            }
        roots = std::move(kept);
      }
      if (have_set && roots.empty()) return {};
    }
  }

  if (!any_nonzero_minor)
    throw degenerate_error("dispersion_roots_2d: every minor vanishes identically");

  // cluster-merge duplicates
  std::vector<cplx> merged;
  for (const cplx& r : roots) {
    bool dup = false;
    for (cplx& m : merged)
      if (std::abs(m - r) <= cluster) {
        m = (m + r) / 2.0;
        dup = true;
        break;
      }
    if (!dup) merged.push_back(r);
  }

  // Real coefficient matrices force conjugate-symmetric root sets; snap pairs.
  bool real_entries = true;
  for (const ComplexMatrix* M : {&A1, &A2})
    for (const cplx& e : M->data())
      if (std::abs(e.imag()) > 1e-14) real_entries = false;
  if (real_entries) {
    for (std::size_t i = 0; i < merged.size(); ++i) {
      if (std::abs(merged[i].imag()) <= 1e-14) {
        merged[i] = cplx(merged[i].real(), 0.0);
        continue;
      }
      for (std::size_t j = i + 1; j < merged.size(); ++j) {
        if (std::abs(std::conj(merged[i]) - merged[j]) <= cluster) {
          const cplx avg = (merged[i] + std::conj(merged[j])) / 2.0;
          merged[i] = avg;
          merged[j] = std::conj(avg);
          break;
        }
      }
    }
  }

  // Re-verify every survivor against the rank test it claims to satisfy.
  std::vector<cplx> verified;
  for (const cplx& z : merged) {
    ComplexMatrix M(sys.m, sys.q);
    for (std::size_t r = 0; r < sys.m; ++r)
      for (std::size_t c = 0; c < sys.q; ++c) M(r, c) = A1(r, c) + z * A2(r, c);
    if (rank_with_tolerance(M, 1e-8) < k) verified.push_back(z);
  }

  std::sort(verified.begin(), verified.end(), [](const cplx& a, const cplx& b) {
    if (a.imag() != b.imag()) return a.imag() > b.imag();
    return a.real() < b.real();
  });
  return verified;
}

std::vector<std::vector<cplx>> orthogonal_complement(const ComplexMatrix& Lambda) {
  if (Lambda.rows() == 0 || Lambda.cols() == 0)
    throw input_error("orthogonal_complement: empty matrix");
  if (Lambda.rows() > Lambda.cols())
    throw input_error("orthogonal_complement: more wave vectors than independent variables");
  if (rank_with_tolerance(Lambda, 1e-10) != Lambda.rows())
    throw input_error("orthogonal_complement: wave vectors are linearly dependent");
  return kernel_basis(Lambda, 1e-10);
}

InhomResidual inhom_condition_residual(const SystemSpec& sys, const std::vector<double>& x,
                                       const std::vector<cplx>& u, const InhomFactorization& fac,
                                       const std::vector<cplx>& lambda, FactorMode mode,
                                       const Expression::Env& extra) {
  if (lambda.size() != sys.p)
    throw input_error("inhom_condition_residual: lambda must have p entries");
  if (sys.m != sys.q)
    throw input_error("inhom_condition_residual: requires a square system (m = q)");
  auto [As, b] = eval_system(sys, u, extra);

  double bscale = 0.0;
  for (const cplx& e : b) bscale = std::max(bscale, std::abs(e));
  if (bscale <= 1e-14) {
    InhomResidual out;
    out.residual.assign(sys.m, cplx(0.0, 0.0));
    out.vacuous = true;
    return out;
  }

  if (!fac.Omega || !fac.L) throw input_error("inhom_condition_residual: factorization lacks Omega/L");
  const cplx Om = fac.Omega(x, u);
  const ComplexMatrix L = fac.L(x, u);
  if (L.rows() != sys.q || L.cols() != sys.q)
    throw input_error("inhom_condition_residual: L must be q x q");

  ComplexMatrix M(sys.q, sys.q);
  if (mode == FactorMode::simple_wave) {
    M = Om * (sum_lambda_A(As, lambda) * L);
  } else {
    const ComplexMatrix P = Om * L;
    const ComplexMatrix Pbar = conj_matrix(P);
    for (std::size_t i = 0; i < sys.p; ++i) {
      const ComplexMatrix term = lambda[i] * P + std::conj(lambda[i]) * Pbar;
      M = M + As[i] * term;
    }
  }
  for (std::size_t d = 0; d < sys.q; ++d) M(d, d) -= 1.0;

  InhomResidual out;
  out.residual = M * b;
  return out;
}

cplx inhom_dispersion_det(const SystemSpec& sys, const std::vector<cplx>& u,
                          const std::vector<cplx>& lambda, const ComplexMatrix& L,
                          const ComplexMatrix& Lbar, FactorMode mode, cplx Omega,
                          const Expression::Env& extra) {
  if (lambda.size() != sys.p) throw input_error("inhom_dispersion_det: lambda must have p entries");
  if (sys.m != sys.q) throw input_error("inhom_dispersion_det: requires a square system (m = q)");
  auto [As, b] = eval_system(sys, u, extra);
  (void)b;
  ComplexMatrix M(sys.q, sys.q);
  if (mode == FactorMode::simple_wave) {
    M = Omega * (sum_lambda_A(As, lambda) * L);
  } else {
    for (std::size_t i = 0; i < sys.p; ++i) {
      ComplexMatrix term = lambda[i] * L + std::conj(lambda[i]) * Lbar;
      M = M + As[i] * term;
    }
  }
  for (std::size_t d = 0; d < sys.q; ++d) M(d, d) -= 1.0;
  return determinant(M);
}

WaveParticleFactorDiag wave_particle_factorization_diag(double u, double phi, double a, int eps) {
  if (eps != 1 && eps != -1) throw input_error("wave_particle_factorization_diag: eps must be +-1");
  const cplx I(0.0, 1.0);
  const double b1 = std::sqrt(2.0) * a * std::exp(u / 2.0) * std::sin(phi / 2.0);
  const double b2 = -std::sqrt(2.0) * a * std::exp(u / 2.0) * std::cos(phi / 2.0);
  const double n2 = b1 * b1 + b2 * b2;
  if (n2 <= 0.0) throw input_error("wave_particle_factorization_diag: b vanishes");

  const double c108 = std::pow(108.0, 0.25);
  const cplx den = 6.0 * (1.0 - static_cast<double>(eps) * I) * n2;
  const cplx zp = cplx(b1, b2) * cplx(b1, b2);    // (b1 + i b2)^2
  const cplx zm = cplx(b1, -b2) * cplx(b1, -b2);  // (b1 - i b2)^2
  const double e = static_cast<double>(eps);
  const cplx l11 = -c108 * I * (std::sqrt(3.0) * e * zp + I * zm) / den;
  const cplx l12 = c108 * I * (std::sqrt(3.0) * e * I * zp + zm) / den;

  WaveParticleFactorDiag diag;
  diag.L = ComplexMatrix(2, 2, {l11, l12, -l12, l11});
  diag.L_special_orthogonal = is_special_orthogonal(diag.L, 1e-8);

  const double c12 = std::pow(12.0, 0.25);
  diag.omega_reading_a = c12 * (1.0 - e * I);
  diag.omega_reading_b = c12 * (1.0 - std::pow(cplx(e, 0.0), I));

  BuiltinOptions opts;
  opts.a = a;
  const SystemSpec sys = builtin_system("wave-particle", opts);
  const Expression::Env env = sys.env_provider(0.0, 0.0, 0.0);
  const std::vector<cplx> state{cplx(u, 0.0), cplx(phi, 0.0)};
  const std::vector<cplx> lambda{cplx(1.0, 0.0), cplx(0.0, 1.0)};
  const std::vector<double> xpos{0.0, 0.0};

  auto norm2 = [](const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& e2 : v) s += std::norm(e2);
    return std::sqrt(s);
  };
  for (int reading = 0; reading < 2; ++reading) {
    const cplx Om = reading == 0 ? diag.omega_reading_a : diag.omega_reading_b;
    InhomFactorization fac;
    fac.Omega = [Om](const std::vector<double>&, const std::vector<cplx>&) { return Om; };
    ComplexMatrix L = diag.L;
    fac.L = [L](const std::vector<double>&, const std::vector<cplx>&) { return L; };
    const InhomResidual res =
        inhom_condition_residual(sys, xpos, state, fac, lambda, FactorMode::simple_mode, env);
    (reading == 0 ? diag.residual_reading_a : diag.residual_reading_b) = norm2(res.residual);
  }

  diag.mode_dispersion_det =
      inhom_dispersion_det(sys, state, lambda, diag.L, conj_matrix(diag.L),
                           FactorMode::simple_mode, cplx(1.0, 0.0), env);
  return diag;
}

}  // namespace riemann
