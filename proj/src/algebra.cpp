#include "riemann/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riemann {

double& default_tolerance() {
  static double tol = 1e-10;
  return tol;
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  if (a_.size() != rows_ * cols_)
    throw input_error("ComplexMatrix: entry count does not match shape");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix I(n, n);
  for (std::size_t k = 0; k < n; ++k) I(k, k) = 1.0;
  return I;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : a_) m = std::max(m, std::abs(z));
  return m;
}

void ComplexMatrix::require_finite(const char* who) const {
  for (const cplx& z : a_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw input_error(std::string(who) + ": non-finite matrix entry");
}

ComplexMatrix operator+(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw input_error("matrix +: shape mismatch");
  ComplexMatrix C(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) + B(i, j);
  return C;
}

ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw input_error("matrix -: shape mismatch");
  ComplexMatrix C(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = A(i, j) - B(i, j);
  return C;
}

ComplexMatrix operator*(const ComplexMatrix& A, const ComplexMatrix& B) {
  if (A.cols() != B.rows()) throw input_error("matrix *: shape mismatch");
  ComplexMatrix C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const cplx aik = A(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

ComplexMatrix operator*(cplx s, const ComplexMatrix& A) {
  ComplexMatrix C(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) C(i, j) = s * A(i, j);
  return C;
}

std::vector<cplx> operator*(const ComplexMatrix& A, const std::vector<cplx>& v) {
  if (A.cols() != v.size()) throw input_error("matrix * vector: shape mismatch");
  std::vector<cplx> w(A.rows(), cplx(0.0, 0.0));
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) w[i] += A(i, j) * v[j];
  return w;
}

ComplexMatrix transpose(const ComplexMatrix& A) {
  ComplexMatrix T(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  return T;
}

namespace {

// Full-pivot elimination; returns the rank and leaves U upper triangular in the
// permuted leading block. col_perm maps working column -> original column.
struct Elimination {
  ComplexMatrix U;
  std::vector<std::size_t> col_perm;
  std::size_t rank = 0;
  double scale = 0;
};

Elimination full_pivot_eliminate(const ComplexMatrix& M, double tol) {
  Elimination e{M, {}, 0, M.max_abs()};
  e.col_perm.resize(M.cols());
  std::iota(e.col_perm.begin(), e.col_perm.end(), std::size_t{0});
  if (e.scale == 0.0) return e;  // zero matrix
  const double threshold = tol * e.scale;
  const std::size_t kmax = std::min(M.rows(), M.cols());
  ComplexMatrix& U = e.U;
  for (std::size_t k = 0; k < kmax; ++k) {
    // locate the largest remaining entry
    std::size_t pi = k, pj = k;
    double best = 0.0;
    for (std::size_t i = k; i < U.rows(); ++i)
      for (std::size_t j = k; j < U.cols(); ++j)
        if (std::abs(U(i, j)) > best) {
          best = std::abs(U(i, j));
          pi = i;
          pj = j;
        }
    if (best <= threshold) break;
    if (pi != k)
      for (std::size_t j = 0; j < U.cols(); ++j) std::swap(U(k, j), U(pi, j));
    if (pj != k) {
      for (std::size_t i = 0; i < U.rows(); ++i) std::swap(U(i, k), U(i, pj));
      std::swap(e.col_perm[k], e.col_perm[pj]);
    }
    for (std::size_t i = k + 1; i < U.rows(); ++i) {
      const cplx m = U(i, k) / U(k, k);
      U(i, k) = 0.0;
      for (std::size_t j = k + 1; j < U.cols(); ++j) U(i, j) -= m * U(k, j);
    }
    e.rank = k + 1;
  }
  return e;
}

}  // namespace

std::size_t rank_with_tolerance(const ComplexMatrix& M, double tol) {
  if (tol <= 0.0) throw input_error("rank_with_tolerance: tol must be positive");
  M.require_finite("rank_with_tolerance");
  return full_pivot_eliminate(M, tol).rank;
}

std::vector<std::vector<cplx>> kernel_basis(const ComplexMatrix& M, double tol) {
  if (tol <= 0.0) throw input_error("kernel_basis: tol must be positive");
  M.require_finite("kernel_basis");
  const Elimination e = full_pivot_eliminate(M, tol);
  const std::size_t n = M.cols(), r = e.rank;
  std::vector<std::vector<cplx>> basis;
  basis.reserve(n - r);
  for (std::size_t free_col = r; free_col < n; ++free_col) {
    // back-substitute U[0..r-1,0..r-1] xB = -U[0..r-1, free_col]
    std::vector<cplx> xb(r, cplx(0.0, 0.0));
    for (std::size_t ii = r; ii-- > 0;) {
      cplx s = -e.U(ii, free_col);
      for (std::size_t j = ii + 1; j < r; ++j) s -= e.U(ii, j) * xb[j];
      xb[ii] = s / e.U(ii, ii);
    }
    std::vector<cplx> v(n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < r; ++j) v[e.col_perm[j]] = xb[j];
    v[e.col_perm[free_col]] = 1.0;
    basis.push_back(std::move(v));
  }
  // modified Gram-Schmidt for deterministic orthonormal output
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      cplx proj(0.0, 0.0);
      for (std::size_t idx = 0; idx < n; ++idx) proj += std::conj(basis[j][idx]) * basis[k][idx];
      for (std::size_t idx = 0; idx < n; ++idx) basis[k][idx] -= proj * basis[j][idx];
    }
    double nrm = 0.0;
    for (const cplx& z : basis[k]) nrm += std::norm(z);
    nrm = std::sqrt(nrm);
    for (cplx& z : basis[k]) z /= nrm;
  }
  return basis;
}

cplx determinant(const ComplexMatrix& M) {
  if (M.rows() != M.cols()) throw input_error("determinant: square matrix required");
  M.require_finite("determinant");
  ComplexMatrix U = M;
  const std::size_t n = U.rows();
  cplx det(1.0, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(U(i, k)) > std::abs(U(piv, k))) piv = i;
    if (U(piv, k) == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(U(k, j), U(piv, j));
      det = -det;
    }
    det *= U(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx m = U(i, k) / U(k, k);
      for (std::size_t j = k; j < n; ++j) U(i, j) -= m * U(k, j);
    }
  }
  return det;
}

bool is_special_orthogonal(const ComplexMatrix& L, double tol) {
  if (L.rows() != L.cols()) throw input_error("is_special_orthogonal: square matrix required");
  L.require_finite("is_special_orthogonal");
  const ComplexMatrix G = transpose(L) * L - ComplexMatrix::identity(L.rows());
  if (G.max_abs() > tol) return false;
  return std::abs(determinant(L) - cplx(1.0, 0.0)) <= tol;
}

namespace {

// Roots of the trailing 2x2 block of H by the quadratic formula.
std::array<cplx, 2> block2_eigs(const cplx& a, const cplx& b, const cplx& c, const cplx& d) {
  const cplx tr = a + d, det2 = a * d - b * c;
  const cplx disc = std::sqrt(tr * tr - 4.0 * det2);
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

}  // namespace

std::vector<cplx> eigenvalues_hessenberg(ComplexMatrix H) {
  if (H.rows() != H.cols()) throw input_error("eigenvalues_hessenberg: square matrix required");
  H.require_finite("eigenvalues_hessenberg");
  std::vector<cplx> eig;
  eig.reserve(H.rows());
  std::size_t n = H.rows();  // active leading block is H[0..n-1, 0..n-1]
  const double eps = 1e-15;
  std::size_t iters = 0, budget = 500 * (H.rows() + 1);
  while (n > 0) {
    if (n == 1) {
      eig.push_back(H(0, 0));
      break;
    }
    // bottom deflation
    if (std::abs(H(n - 1, n - 2)) <=
        eps * (std::abs(H(n - 1, n - 1)) + std::abs(H(n - 2, n - 2)))) {
      eig.push_back(H(n - 1, n - 1));
      --n;
      continue;
    }
    if (n == 2) {
      const auto mu = block2_eigs(H(0, 0), H(0, 1), H(1, 0), H(1, 1));
      eig.push_back(mu[0]);
      eig.push_back(mu[1]);
      break;
    }
    if (++iters > budget)
      throw convergence_error("eigenvalues_hessenberg: QR iteration stalled", H(n - 1, n - 1));
    // Wilkinson shift: trailing-2x2 eigenvalue closest to the corner entry
    const auto mu = block2_eigs(H(n - 2, n - 2), H(n - 2, n - 1), H(n - 1, n - 2), H(n - 1, n - 1));
    const cplx corner = H(n - 1, n - 1);
    cplx shift = (std::abs(mu[0] - corner) < std::abs(mu[1] - corner)) ? mu[0] : mu[1];
    if (iters % 37 == 0) shift += std::abs(H(n - 1, n - 2));  // exceptional nudge
    // one shifted QR sweep by Givens rotations on the active block
    for (std::size_t k = 0; k < n; ++k) H(k, k) -= shift;
    std::vector<std::array<cplx, 2>> rot(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const cplx f = H(k, k), g = H(k + 1, k);
      const double nrm = std::sqrt(std::norm(f) + std::norm(g));
      cplx cs(1.0, 0.0), sn(0.0, 0.0);
      if (nrm > 0.0) {
        cs = std::conj(f) / nrm;
        sn = std::conj(g) / nrm;
      }
      rot[k] = {cs, sn};
      for (std::size_t j = k; j < n; ++j) {
        const cplx h1 = H(k, j), h2 = H(k + 1, j);
        H(k, j) = cs * h1 + sn * h2;
        H(k + 1, j) = -std::conj(sn) * h1 + std::conj(cs) * h2;
      }
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const cplx cs = rot[k][0], sn = rot[k][1];
      const std::size_t top = std::min(k + 2, n - 1);
      for (std::size_t i = 0; i <= top; ++i) {
        const cplx h1 = H(i, k), h2 = H(i, k + 1);
        H(i, k) = h1 * std::conj(cs) + h2 * std::conj(sn);
        H(i, k + 1) = -h1 * sn + h2 * cs;
      }
    }
    for (std::size_t k = 0; k < n; ++k) H(k, k) += shift;
  }
  return eig;
}

std::vector<cplx> polynomial_roots(std::vector<cplx> coeffs, double drop_tol) {
  double scale = 0.0;
  for (const cplx& c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) throw degenerate_error("polynomial_roots: zero polynomial");
  while (coeffs.size() > 1 && std::abs(coeffs.back()) <= drop_tol * scale) coeffs.pop_back();
  const std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return {};
  ComplexMatrix C(deg, deg);
  for (std::size_t i = 0; i < deg; ++i) C(i, deg - 1) = -coeffs[i] / coeffs[deg];
  for (std::size_t i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
  return eigenvalues_hessenberg(C);
}

}  // namespace riemann
