#include <doctest.h>

#include <cmath>
#include <vector>

#include "tarmos/errors.hpp"
#include "tarmos/linalg.hpp"
#include "tarmos/rng.hpp"

using namespace tarmos;

namespace {

// Independent oracle: solve the normal equations X'X b = X'y by Gaussian
// elimination with partial pivoting.  Kept free of the QR path on purpose.
std::vector<double> normal_equation_solve(const Matrix& x, const std::vector<double>& y) {
  const std::size_t p = x.cols();
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, i) * x(r, j);
      a[i][j] = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) s += x(r, i) * y[r];
    a[i][p] = s;
  }
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < p; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    }
    std::swap(a[k], a[piv]);
    for (std::size_t i = k + 1; i < p; ++i) {
      double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j <= p; ++j) a[i][j] -= f * a[k][j];
    }
  }
  std::vector<double> b(p, 0.0);
  for (std::size_t k = p; k-- > 0;) {
    double s = a[k][p];
    for (std::size_t j = k + 1; j < p; ++j) s -= a[k][j] * b[j];
    b[k] = s / a[k][k];
  }
  return b;
}

Matrix random_matrix(RngStream& rng, std::size_t n, std::size_t p) {
  Matrix x(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (std::size_t j = 1; j < p; ++j) x(i, j) = rng.normal();
  }
  return x;
}

}  // namespace

TEST_CASE("qr least squares matches the normal-equation oracle") {
  RngStream rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t p = 2 + rng.uniform_index(4);  // up to 5 columns
    std::size_t n = p + 2 + rng.uniform_index(8);
    Matrix x = random_matrix(rng, n, p);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal();

    QrDecomposition qr(x);
    REQUIRE(qr.full_rank());
    auto beta = qr.solve(y);
    auto oracle = normal_equation_solve(x, y);
    for (std::size_t j = 0; j < p; ++j) {
      CHECK(beta[j] == doctest::Approx(oracle[j]).epsilon(1e-8));
    }
  }
}

TEST_CASE("qr residual is orthogonal to the design columns") {
  RngStream rng(102);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t p = 3, n = 12;
    Matrix x = random_matrix(rng, n, p);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.normal();
    QrDecomposition qr(x);
    auto beta = qr.solve(y);
    for (std::size_t j = 0; j < p; ++j) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double resid = y[i];
        for (std::size_t k = 0; k < p; ++k) resid -= x(i, k) * beta[k];
        dot += resid * x(i, j);
      }
      CHECK(std::abs(dot) < 1e-8 * static_cast<double>(n));
    }
  }
}

TEST_CASE("duplicated column is flagged rank deficient") {
  Matrix x(5, 3);
  RngStream rng(103);
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    x(i, 2) = x(i, 1);
  }
  QrDecomposition qr(x);
  CHECK_FALSE(qr.full_rank());
  CHECK(qr.rank() == 2);
  CHECK((qr.deficient_column() == 1 || qr.deficient_column() == 2));
  CHECK_THROWS_AS(qr.solve(std::vector<double>(5, 1.0)), NumericError);
}

TEST_CASE("xtx_inverse matches a direct inverse") {
  RngStream rng(104);
  Matrix x = random_matrix(rng, 10, 3);
  QrDecomposition qr(x);
  Matrix inv = qr.xtx_inverse();

  // (X'X) * inv should be the identity.
  Matrix xtx(3, 3, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < 10; ++r) s += x(r, i) * x(r, j);
      xtx(i, j) = s;
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += xtx(i, k) * inv(k, j);
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("residual_ss equals the explicit residual norm") {
  RngStream rng(105);
  Matrix x = random_matrix(rng, 9, 3);
  std::vector<double> y(9);
  for (auto& v : y) v = rng.normal();
  QrDecomposition qr(x);
  auto beta = qr.solve(y);
  double rss = 0.0;
  for (std::size_t i = 0; i < 9; ++i) {
    double r = y[i];
    for (std::size_t j = 0; j < 3; ++j) r -= x(i, j) * beta[j];
    rss += r * r;
  }
  CHECK(qr.residual_ss(y) == doctest::Approx(rss).epsilon(1e-10));
}

TEST_CASE("cholesky factorization round trip") {
  Matrix a(3, 3);
  // A = L0 L0' for a fixed lower-triangular L0.
  double l0[3][3] = {{2, 0, 0}, {0.5, 1.5, 0}, {-1, 0.3, 1.1}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += l0[i][k] * l0[j][k];
      a(i, j) = s;
    }
  }
  Matrix l = cholesky(a);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      CHECK(l(i, j) == doctest::Approx(l0[i][j]).epsilon(1e-12));
    }
  }

  std::vector<double> b{1.0, -2.0, 0.5};
  auto xsol = solve_spd(a, b);
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += a(i, j) * xsol[j];
    CHECK(s == doctest::Approx(b[i]).epsilon(1e-12));
  }

  Matrix inv = invert_spd(a);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a(i, k) * inv(k, j);
      CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("cholesky rejects an indefinite matrix") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  CHECK_THROWS_AS(cholesky(a), NumericError);
}
