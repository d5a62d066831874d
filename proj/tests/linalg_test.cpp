#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evostab/linalg.hpp"

using namespace evostab;

namespace {

std::mt19937 rng(20240611);

CMatrix random_matrix(int n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CMatrix s(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = Complex(dist(rng), dist(rng));
  }
  return s;
}

CVector random_unit(int n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  CVector x(n);
  for (int i = 0; i < n; ++i) x(i) = Complex(dist(rng), dist(rng));
  return x / x.norm();
}

CMatrix inverse_via_solve(const CMatrix& s) {
  CMatrix inv(s.rows(), s.cols());
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    inv.col(j) = solve(s, CVector(CVector::Unit(s.rows(), j)));
  }
  return inv;
}

}  // namespace

TEST_CASE("herm_min_eig on pinned inputs") {
  CHECK(herm_min_eig(cidentity(2)) == doctest::Approx(1.0).epsilon(1e-14));

  CMatrix skew(2, 2);
  skew << 0.0, 1.0, -1.0, 0.0;
  CHECK(std::abs(herm_min_eig(skew)) < 1e-14);

  CMatrix diag = CMatrix::Zero(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = -3.0;
  CHECK(herm_min_eig(diag) == doctest::Approx(-3.0).epsilon(1e-14));

  CHECK_THROWS_AS(herm_min_eig(CMatrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("op_norm and smallest_sv on pinned inputs") {
  CHECK(op_norm(cidentity(3)) == doctest::Approx(1.0));
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(op_norm(d) == doctest::Approx(3.0));
  CHECK(op_norm(CMatrix::Zero(4, 4)) == doctest::Approx(0.0));
  CHECK(smallest_sv(d) == doctest::Approx(1.0));
  CHECK(smallest_sv(CMatrix::Zero(3, 3)) == doctest::Approx(0.0));
}

TEST_CASE("smallest_sv of the 1D Dirichlet difference operator, n=3") {
  // Closed-form eigenvalues of tridiag(-1,2,-1)/h^2 with h = 1/4:
  // (4/h^2) sin^2(k pi / 8), smallest singular value sqrt(lambda_min).
  const int n = 3;
  const double h = 0.25;
  RMatrix d = RMatrix::Zero(n + 1, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) = 1.0 / h;
    d(i + 1, i) = -1.0 / h;
  }
  double expected = (2.0 / h) * std::sin(std::numbers::pi / 8.0);
  CHECK(expected == doctest::Approx(3.0614674589).epsilon(1e-9));
  CHECK(smallest_sv(d.cast<Complex>()) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("solve on pinned inputs and the singular error path") {
  CVector b(2);
  b << Complex(1.0, 2.0), Complex(-3.0, 0.5);
  CHECK((solve(cidentity(2), b) - b).norm() < 1e-14);

  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 4.0;
  CVector rhs(2);
  rhs << 2.0, 4.0;
  CVector x = solve(d, rhs);
  CHECK(std::abs(x(0) - 1.0) < 1e-14);
  CHECK(std::abs(x(1) - 1.0) < 1e-14);

  CMatrix sing(2, 2);
  sing << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(solve(sing, rhs), SingularMatrixError);
}

TEST_CASE("herm_min_eig lower-bounds the quadratic form, eigenvector attains it") {
  for (int rep = 0; rep < 5; ++rep) {
    CMatrix s = random_matrix(12);
    auto [lam, vec] = herm_min_eigpair(s);
    for (int k = 0; k < 100; ++k) {
      CVector x = random_unit(12);
      double quad = (x.adjoint() * (s * x))(0).real();
      CHECK(quad >= lam - 1e-10);
    }
    double at_vec = (vec.adjoint() * (s * vec))(0).real();
    CHECK(at_vec == doctest::Approx(lam).epsilon(1e-9));
  }
}

TEST_CASE("adjoint symmetry and inverse identities") {
  for (int rep = 0; rep < 5; ++rep) {
    CMatrix s = random_matrix(10);
    CHECK(op_norm(s) == doctest::Approx(op_norm(CMatrix(s.adjoint()))).epsilon(1e-12));

    CMatrix well = s + 6.0 * cidentity(10);  // comfortably invertible
    CMatrix inv = inverse_via_solve(well);
    CHECK(smallest_sv(well) * op_norm(inv) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("accretive shift bounds the inverse norm by 1/c") {
  for (int rep = 0; rep < 5; ++rep) {
    CMatrix s = random_matrix(10);
    double c = 0.7;
    s += (c - herm_min_eig(s)) * cidentity(10);  // now herm_min_eig(s) = c
    CHECK(herm_min_eig(s) == doctest::Approx(c).epsilon(1e-12));
    CMatrix inv = inverse_via_solve(s);
    CHECK(op_norm(inv) <= 1.0 / c + 1e-8);
  }
}

TEST_CASE("accuracy contract on a well-conditioned 200x200 factorized matrix") {
  const int n = 200;
  CMatrix a = random_matrix(n), b = random_matrix(n);
  Eigen::HouseholderQR<CMatrix> qra(a), qrb(b);
  CMatrix u = qra.householderQ();
  CMatrix v = qrb.householderQ();
  RVector sv(n);
  for (int i = 0; i < n; ++i) sv(i) = 1.0 + 9.0 * i / (n - 1);  // [1, 10]
  CMatrix s = u * sv.cast<Complex>().asDiagonal() * v.adjoint();
  CHECK(op_norm(s) == doctest::Approx(10.0).epsilon(1e-10));
  CHECK(smallest_sv(s) == doctest::Approx(1.0).epsilon(1e-10));
}
