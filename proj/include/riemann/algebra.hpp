#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "riemann/errors.hpp"

namespace riemann {

using cplx = std::complex<double>;

// Shared default tolerance knob (1e-10). The CLI may override it process-wide via
// the RIEMANN_TOL environment variable; everything tolerance-based defaults to it.
double& default_tolerance();

// Dense row-major complex matrix. Everything in this project is tiny (<= 6x6 for
// the algebraic checks, a handful of rows for systems), so no attempt at sparsity
// or expression templates: clarity wins.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const std::vector<cplx>& data() const { return a_; }

  // Largest entry magnitude; 0 for an empty/zero matrix.
  double max_abs() const;
  // Throws input_error if any entry is NaN/Inf.
  void require_finite(const char* who) const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

ComplexMatrix operator+(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix operator-(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix operator*(const ComplexMatrix& A, const ComplexMatrix& B);
ComplexMatrix operator*(cplx s, const ComplexMatrix& A);
std::vector<cplx> operator*(const ComplexMatrix& A, const std::vector<cplx>& v);
// Plain transpose (no conjugation) -- the rotation matrices here live in SO(q, C),
// whose defining relation is L^T L = I.
ComplexMatrix transpose(const ComplexMatrix& A);

// Number of pivots exceeding tol * (largest entry magnitude) under full-pivot
// Gaussian elimination. Zero matrix -> 0.
std::size_t rank_with_tolerance(const ComplexMatrix& M, double tol);
inline std::size_t rank_with_tolerance(const ComplexMatrix& M) {
  return rank_with_tolerance(M, default_tolerance());
}

// Orthonormal (modified Gram-Schmidt) basis of the numerical nullspace:
// cols - rank vectors v with max|Mv| <= 10 * tol * scale.
std::vector<std::vector<cplx>> kernel_basis(const ComplexMatrix& M, double tol);
inline std::vector<std::vector<cplx>> kernel_basis(const ComplexMatrix& M) {
  return kernel_basis(M, default_tolerance());
}

// Determinant by partially pivoted LU; square input required.
cplx determinant(const ComplexMatrix& M);

// max|L^T L - I| <= tol and |det L - 1| <= tol (complex entries permitted).
bool is_special_orthogonal(const ComplexMatrix& L, double tol);
inline bool is_special_orthogonal(const ComplexMatrix& L) {
  return is_special_orthogonal(L, default_tolerance());
}

// Eigenvalues of an upper-Hessenberg matrix by shifted complex QR (Givens
// rotations, Wilkinson shift). Used for companion-matrix root finding.
std::vector<cplx> eigenvalues_hessenberg(ComplexMatrix H);

// All roots of c0 + c1 z + ... + cn z^n via the companion matrix of the monic
// normalization; leading coefficients below drop_tol * max|c| are stripped first.
std::vector<cplx> polynomial_roots(std::vector<cplx> coeffs, double drop_tol = 1e-10);

}  // namespace riemann
