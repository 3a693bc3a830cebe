#include <doctest.h>

#include <cmath>

#include "daclab/datagen.hpp"
#include "daclab/matkit.hpp"
#include "daclab/rng.hpp"

using daclab::Rng;
using daclab::matkit::Matrix;
using daclab::matkit::Subspace;
using daclab::matkit::Vector;
namespace matkit = daclab::matkit;
namespace datagen = daclab::datagen;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rank_tol on canonical matrices") {
  CHECK(matkit::rank_tol(Matrix::Zero(3, 3), 1e-10) == 0);
  CHECK(matkit::rank_tol(Matrix::Identity(5, 5), 1e-10) == 5);

  // Proportional rows collapse to rank 1.
  Matrix a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  CHECK(matkit::rank_tol(a, 1e-10) == 1);
}

TEST_CASE("rank_tol rejects bad input") {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(matkit::rank_tol(a), std::invalid_argument);
  CHECK_THROWS_AS(matkit::rank_tol(Matrix::Identity(2, 2), 0.0),
                  std::invalid_argument);
}

TEST_CASE("pinv identities") {
  CHECK(max_abs(matkit::pinv(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)) <
        1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const Matrix dp = matkit::pinv(d);
  CHECK(dp(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dp(1, 1) == doctest::Approx(0.0));

  // Column of ones: all four Moore-Penrose conditions pin [[0.5, 0.5]].
  Matrix ones(2, 1);
  ones << 1, 1;
  const Matrix p = matkit::pinv(ones);
  CHECK(max_abs(ones * p * ones - ones) < 1e-12);
  CHECK(max_abs(p * ones * p - p) < 1e-12);
  CHECK(max_abs((ones * p) - (ones * p).transpose()) < 1e-12);
  CHECK(max_abs((p * ones) - (p * ones).transpose()) < 1e-12);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("projectors of canonical matrices") {
  Matrix row(1, 2);
  row << 1, 0;
  const auto null = matkit::proj(row, Subspace::kNullSpace);
  Matrix expect = Matrix::Zero(2, 2);
  expect(1, 1) = 1.0;
  CHECK(max_abs(null.p - expect) < 1e-12);
  CHECK(null.rank == 1);
  matkit::validate_projector(null);

  Matrix ones(2, 1);
  ones << 1, 1;
  const auto col = matkit::proj(ones, Subspace::kColumnSpace);
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK(max_abs(col.p - half) < 1e-12);

  const auto zero = matkit::proj(Matrix::Zero(3, 4), Subspace::kRowSpace);
  CHECK(zero.rank == 0);
  CHECK(max_abs(zero.p) == 0.0);
}

TEST_CASE("seminorm_sq basics and oracle") {
  Vector e1 = Vector::Zero(3);
  e1(0) = 1.0;
  CHECK(matkit::seminorm_sq(e1, Matrix::Identity(3, 3)) == doctest::Approx(1.0));

  Vector u(2);
  u << 1, 1;
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 3.0;
  CHECK(matkit::seminorm_sq(u, d) == doctest::Approx(5.0));

  // Against the explicit product ||A u||^2.
  Rng rng(21);
  for (int i = 0; i < 20; ++i) {
    const Matrix a = datagen::gaussian_matrix(6, 4, rng);
    const Vector v = datagen::gaussian_vector(4, rng);
    CHECK(matkit::seminorm_sq(v, a.transpose() * a) ==
          doctest::Approx((a * v).squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("seminorm_sq rejects bad sigma") {
  Vector u(2);
  u << 1, 0;
  CHECK_THROWS_AS(matkit::seminorm_sq(u, Matrix::Identity(3, 3)),
                  std::invalid_argument);

  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS(matkit::seminorm_sq(u, neg), std::invalid_argument);

  Matrix asym(2, 2);
  asym << 1, 0.5, -0.5, 1;
  CHECK_THROWS_AS(matkit::seminorm_sq(u, asym), std::invalid_argument);
}

TEST_CASE("min_dominating_scalar closed forms") {
  const Matrix i2 = Matrix::Identity(2, 2);
  CHECK(matkit::min_dominating_scalar(i2, i2) == doctest::Approx(1.0));
  CHECK(matkit::min_dominating_scalar(2.0 * i2, i2) == doctest::Approx(2.0));

  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 4;
  b(0, 0) = 1;
  b(1, 1) = 2;
  CHECK(matkit::min_dominating_scalar(a, b) == doctest::Approx(2.0));
}

TEST_CASE("min_dominating_scalar range containment") {
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 1.0;  // rank one
  CHECK_THROWS_AS(matkit::min_dominating_scalar(Matrix::Identity(2, 2), b),
                  std::runtime_error);

  // a supported on Range(b) is fine even when b is singular.
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 3.0;
  CHECK(matkit::min_dominating_scalar(a, b) == doctest::Approx(3.0));
}

TEST_CASE("Moore-Penrose and projector properties on random matrices") {
  Rng rng(99);
  for (int i = 0; i < 120; ++i) {
    const int m = rng.uniform_int(2, 12);
    const int n = rng.uniform_int(2, 12);
    Matrix a;
    if (rng.bernoulli(0.5)) {
      a = datagen::gaussian_matrix(m, n, rng);
    } else {
      const int r = rng.uniform_int(1, std::min(m, n));
      a = datagen::gaussian_matrix(m, r, rng) * datagen::gaussian_matrix(r, n, rng);
    }
    const Matrix ap = matkit::pinv(a);
    const double scale = std::max(1.0, max_abs(a));
    CHECK(max_abs(a * ap * a - a) < 1e-8 * scale);
    CHECK(max_abs(ap * a * ap - ap) < 1e-8 * scale);
    CHECK(max_abs((a * ap) - (a * ap).transpose()) < 1e-8);
    CHECK(max_abs((ap * a) - (ap * a).transpose()) < 1e-8);

    const auto row = matkit::proj(a, Subspace::kRowSpace);
    const auto null = matkit::proj(a, Subspace::kNullSpace);
    CHECK(max_abs(row.p + null.p - Matrix::Identity(n, n)) < 1e-8);
    CHECK(max_abs(row.p * null.p) < 1e-8);
    CHECK(matkit::rank_tol(a) + null.rank == n);
    CHECK(max_abs(row.p - ap * a) < 1e-8);
  }
}

TEST_CASE("min_dominating_scalar certificates on random PSD pairs") {
  Rng rng(123);
  for (int i = 0; i < 60; ++i) {
    const int d = rng.uniform_int(2, 8);
    const Matrix g = datagen::gaussian_matrix(d, d, rng);
    const Matrix b = g * g.transpose() + 0.1 * Matrix::Identity(d, d);
    const Matrix h = datagen::gaussian_matrix(d, d, rng);
    const Matrix a = h * h.transpose();
    const double c = matkit::min_dominating_scalar(a, b);

    Eigen::SelfAdjointEigenSolver<Matrix> above(c * b - a,
                                                Eigen::EigenvaluesOnly);
    CHECK(above.eigenvalues().minCoeff() >= -1e-8 * c * max_abs(b));

    Eigen::SelfAdjointEigenSolver<Matrix> below((c - 1e-3 * c) * b - a,
                                                Eigen::EigenvaluesOnly);
    CHECK(below.eigenvalues().minCoeff() < 0.0);
  }
}
