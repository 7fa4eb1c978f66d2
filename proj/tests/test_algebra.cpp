#include <algorithm>
#include <complex>

#include <doctest.h>

#include "riemann/algebra.hpp"

using namespace riemann;

namespace {
std::vector<cplx> sorted_roots(std::vector<cplx> r) {
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return r;
}
}  // namespace

TEST_SUITE("algebra") {
  TEST_CASE("default tolerance knob") {
    CHECK(default_tolerance() == doctest::Approx(1e-10));
  }

  TEST_CASE("matrix arithmetic") {
    ComplexMatrix A(2, 2, {cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0)});
    ComplexMatrix I = ComplexMatrix::identity(2);
    ComplexMatrix AI = A * I;
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(AI(r, c) - A(r, c)) < 1e-15);

    ComplexMatrix T = transpose(A);
    CHECK(T(0, 1) == cplx(3, 0));
    CHECK(T(1, 0) == cplx(2, 0));
    // transpose does not conjugate
    ComplexMatrix B(1, 1, {cplx(0, 1)});
    CHECK(transpose(B)(0, 0) == cplx(0, 1));

    std::vector<cplx> v = A * std::vector<cplx>{cplx(1, 0), cplx(1, 0)};
    CHECK(std::abs(v[0] - cplx(3, 0)) < 1e-15);
    CHECK(std::abs(v[1] - cplx(7, 0)) < 1e-15);

    CHECK(A.max_abs() == doctest::Approx(4.0));
  }

  TEST_CASE("rank with tolerance") {
    ComplexMatrix A(2, 2, {cplx(1, 0), cplx(2, 0), cplx(2, 0), cplx(4, 0)});
    CHECK(rank_with_tolerance(A, 1e-10) == 1);
    CHECK(rank_with_tolerance(ComplexMatrix::identity(3), 1e-10) == 3);
    CHECK(rank_with_tolerance(ComplexMatrix(3, 3), 1e-10) == 0);
    // near-singular snaps to rank 1 at loose tolerance, rank 2 at tight
    ComplexMatrix B(2, 2, {cplx(1, 0), cplx(1, 0), cplx(1, 0), cplx(1 + 1e-6, 0)});
    CHECK(rank_with_tolerance(B, 1e-3) == 1);
    CHECK(rank_with_tolerance(B, 1e-9) == 2);
  }

  TEST_CASE("kernel basis") {
    ComplexMatrix A(2, 2, {cplx(1, 0), cplx(1, 0), cplx(1, 0), cplx(1, 0)});
    auto K = kernel_basis(A, 1e-10);
    REQUIRE(K.size() == 1);
    double norm2 = 0;
    for (const cplx& z : K[0]) norm2 += std::norm(z);
    CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<cplx> Av = A * K[0];
    for (const cplx& z : Av) CHECK(std::abs(z) < 1e-9);
    CHECK(kernel_basis(ComplexMatrix::identity(2), 1e-10).empty());
  }

  TEST_CASE("determinant") {
    ComplexMatrix A(2, 2, {cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0)});
    CHECK(std::abs(determinant(A) - cplx(-2, 0)) < 1e-14);
    CHECK(std::abs(determinant(ComplexMatrix::identity(4)) - cplx(1, 0)) < 1e-14);
    ComplexMatrix S(2, 2, {cplx(1, 0), cplx(2, 0), cplx(2, 0), cplx(4, 0)});
    CHECK(std::abs(determinant(S)) < 1e-14);
    CHECK_THROWS_AS(determinant(ComplexMatrix(2, 3)), input_error);
  }

  TEST_CASE("special orthogonality") {
    const double th = 0.3;
    ComplexMatrix R(2, 2,
                    {cplx(std::cos(th), 0), cplx(-std::sin(th), 0), cplx(std::sin(th), 0),
                     cplx(std::cos(th), 0)});
    CHECK(is_special_orthogonal(R, 1e-12));
    // complex angle: cos^2 + sin^2 = 1 still holds
    const cplx z(0.2, 0.1);
    ComplexMatrix C(2, 2, {std::cos(z), -std::sin(z), std::sin(z), std::cos(z)});
    CHECK(is_special_orthogonal(C, 1e-12));
    ComplexMatrix S = cplx(2.0, 0.0) * R;
    CHECK_FALSE(is_special_orthogonal(S, 1e-12));
    // orthogonal but det = -1
    ComplexMatrix M(2, 2, {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(-1, 0)});
    CHECK_FALSE(is_special_orthogonal(M, 1e-12));
  }

  TEST_CASE("polynomial roots") {
    // z^2 + 1
    auto r = sorted_roots(polynomial_roots({cplx(1, 0), cplx(0, 0), cplx(1, 0)}));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - cplx(0, -1)) < 1e-12);
    CHECK(std::abs(r[1] - cplx(0, 1)) < 1e-12);

    // (z-1)(z-2)(z-3) = -6 + 11 z - 6 z^2 + z^3
    r = sorted_roots(polynomial_roots({cplx(-6, 0), cplx(11, 0), cplx(-6, 0), cplx(1, 0)}));
    REQUIRE(r.size() == 3);
    CHECK(std::abs(r[0] - cplx(1, 0)) < 1e-10);
    CHECK(std::abs(r[1] - cplx(2, 0)) < 1e-10);
    CHECK(std::abs(r[2] - cplx(3, 0)) < 1e-10);

    // leading zeros are stripped: 2 - 3z + z^2 (+ 0 z^3 + 0 z^4)
    r = sorted_roots(polynomial_roots(
        {cplx(2, 0), cplx(-3, 0), cplx(1, 0), cplx(0, 0), cplx(0, 0)}));
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(r[1] - cplx(2, 0)) < 1e-12);

    // z^6 - 1: all sixth roots of unity
    std::vector<cplx> c(7, cplx(0, 0));
    c[0] = cplx(-1, 0);
    c[6] = cplx(1, 0);
    r = polynomial_roots(c);
    REQUIRE(r.size() == 6);
    for (const cplx& z : r) CHECK(std::abs(std::pow(z, 6) - cplx(1, 0)) < 1e-9);
  }

  TEST_CASE("hessenberg eigenvalues") {
    // companion of z^2 - 1 (eigenvalues +-1)
    ComplexMatrix H(2, 2, {cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)});
    auto ev = sorted_roots(eigenvalues_hessenberg(H));
    REQUIRE(ev.size() == 2);
    CHECK(std::abs(ev[0] - cplx(-1, 0)) < 1e-12);
    CHECK(std::abs(ev[1] - cplx(1, 0)) < 1e-12);
  }
}
