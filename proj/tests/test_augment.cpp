#include <doctest.h>

#include <cmath>

#include "daclab/augment.hpp"
#include "daclab/datagen.hpp"
#include "daclab/matkit.hpp"

using daclab::Rng;
using daclab::matkit::Matrix;
using daclab::matkit::Vector;
namespace augment = daclab::augment;
namespace datagen = daclab::datagen;
namespace matkit = daclab::matkit;

namespace {

augment::AugmentedDataset make(const Matrix& x, const augment::AugmentationSpec& s,
                               std::uint64_t seed = 5) {
  Rng rng(seed);
  return augment::build_augmented(x, Vector::Zero(x.rows()), s, rng);
}

}  // namespace

TEST_CASE("identity copies stack and zero delta") {
  Rng rng(1);
  const Matrix x = datagen::gaussian_matrix(4, 3, rng);
  augment::AugmentationSpec spec;
  spec.kind = augment::IdentityCopies{};
  spec.alpha = 2;
  const auto aug = make(x, spec);
  REQUIRE(aug.x_aug_stacked.rows() == 12);
  for (int j = 0; j < 3; ++j) {
    CHECK((aug.x_aug_stacked.middleRows(j * 4, 4) - x).cwiseAbs().maxCoeff() ==
          0.0);
  }
  CHECK(aug.delta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(augment::d_aug_of(aug) == 0);
}

TEST_CASE("replicate_labels repeats y in block order") {
  Rng rng(2);
  augment::AugmentedDataset aug;
  aug.x = Matrix::Zero(2, 1);
  aug.y = Vector(2);
  aug.y << 1, 2;
  aug.alpha = 1;
  const Vector r = augment::replicate_labels(aug);
  REQUIRE(r.size() == 4);
  CHECK(r(0) == 1);
  CHECK(r(1) == 2);
  CHECK(r(2) == 1);
  CHECK(r(3) == 2);

  aug.x = Matrix::Zero(1, 1);
  aug.y = Vector(1);
  aug.y << 5;
  aug.alpha = 3;
  const Vector r2 = augment::replicate_labels(aug);
  REQUIRE(r2.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(r2(i) == 5);
}

TEST_CASE("block scale matches the (x_c1, 2 x_e1, -x_e2) recipe") {
  Matrix x(1, 6);
  x << 1, 2, 3, 4, 5, 6;
  augment::AugmentationSpec spec;
  spec.kind = augment::BlockScale{2, 2, 2.0, -1.0};
  spec.alpha = 1;
  const auto aug = make(x, spec);
  Vector expect(6);
  expect << 1, 2, 6, 8, -5, -6;
  CHECK((aug.x_aug_stacked.row(1).transpose() - expect).cwiseAbs().maxCoeff() ==
        0.0);
  // Deterministic: both copies identical for alpha > 1.
  spec.alpha = 3;
  const auto aug3 = make(x, spec);
  CHECK((aug3.x_aug_stacked.row(1) - aug3.x_aug_stacked.row(3))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("gaussian jitter perturbs only the tail block") {
  Rng rng(7);
  const Matrix x = datagen::gaussian_matrix(30, 8, rng);
  augment::AugmentationSpec spec;
  spec.kind = augment::GaussianJitter{3, 0.1};
  spec.alpha = 2;
  const auto aug = make(x, spec);
  // Row-ordering invariant: row k*N+i augments row i.
  for (int k = 1; k <= 2; ++k) {
    const Matrix diff = aug.x_aug_stacked.middleRows(30 * k, 30) - x;
    CHECK(diff.leftCols(5).cwiseAbs().maxCoeff() == 0.0);
    CHECK(diff.rightCols(3).cwiseAbs().minCoeff() != 0.0);
  }
  // Jitter scale sanity: sample std of the perturbations near 0.1.
  const Matrix tail = aug.delta.bottomRows(60).rightCols(3);
  const double sd = std::sqrt(tail.squaredNorm() / tail.size());
  CHECK(sd == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("env sign flip negates the trailing block") {
  Matrix x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  augment::AugmentationSpec spec;
  spec.kind = augment::EnvSignFlip{2};
  spec.alpha = 1;
  const auto aug = make(x, spec);
  CHECK(aug.x_aug_stacked(2, 0) == 1);
  CHECK(aug.x_aug_stacked(2, 1) == -2);
  CHECK(aug.x_aug_stacked(2, 2) == -3);
}

TEST_CASE("d_aug matches the example values") {
  Rng rng(11);
  const Matrix x = datagen::gaussian_matrix(50, 30, rng);

  augment::AugmentationSpec block;
  block.kind = augment::BlockScale{5, 10, 2.0, -1.0};
  block.alpha = 1;
  CHECK(augment::d_aug_of(make(x, block)) == 25);  // 30 - d_c1

  augment::AugmentationSpec resample;
  resample.kind = augment::CoordinateResample{25};
  resample.alpha = 1;
  CHECK(augment::d_aug_of(make(x, resample)) == 25);

  // Invariant to alpha for the deterministic spec.
  block.alpha = 3;
  CHECK(augment::d_aug_of(make(x, block)) == 25);
}

TEST_CASE("label-invariant spec satisfies A(X) theta* = M X theta*") {
  Rng rng(13);
  const Matrix x = datagen::gaussian_matrix(40, 12, rng);
  augment::AugmentationSpec spec;
  spec.kind = augment::BlockScale{4, 5, 2.0, -1.0};
  spec.alpha = 2;
  const auto aug = make(x, spec);
  Vector theta = Vector::Zero(12);
  theta.head(4) = datagen::gaussian_vector(4, rng);
  CHECK((aug.delta * theta).cwiseAbs().maxCoeff() < 1e-12);
  const Vector lhs = aug.x_aug_stacked * theta;
  for (int j = 0; j <= 2; ++j) {
    CHECK((lhs.segment(40 * j, 40) - x * theta).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("d_aug_quantile point masses") {
  const auto sampler = [](int n, Rng& r) {
    return datagen::gaussian_matrix(n, 30, r);
  };
  Rng rng(17);

  augment::AugmentationSpec id;
  id.kind = augment::IdentityCopies{};
  id.alpha = 1;
  const auto q_id = augment::d_aug_quantile(id, sampler, 20, 0.1, 100, rng);
  CHECK(q_id.value == 0);
  CHECK_FALSE(q_id.degenerate_sampler);

  augment::AugmentationSpec rs;
  rs.kind = augment::CoordinateResample{25};
  rs.alpha = 1;
  const auto q_rs = augment::d_aug_quantile(rs, sampler, 50, 0.02, 500, rng);
  CHECK(q_rs.value == 25);

  // Full-dimension jitter with alpha*n >= d perturbs everything.
  const auto sampler_small = [](int n, Rng& r) {
    return datagen::gaussian_matrix(n, 6, r);
  };
  augment::AugmentationSpec gj;
  gj.kind = augment::GaussianJitter{6, 0.3};
  gj.alpha = 1;
  const auto q_gj = augment::d_aug_quantile(gj, sampler_small, 10, 0.05, 200, rng);
  CHECK(q_gj.value == 6);
}

TEST_CASE("d_aug_quantile flags a constant sampler") {
  const auto constant = [](int n, Rng&) {
    return Matrix(Matrix::Ones(n, 4));
  };
  augment::AugmentationSpec rs;
  rs.kind = augment::CoordinateResample{2};
  rs.alpha = 1;
  Rng rng(19);
  const auto q = augment::d_aug_quantile(rs, constant, 8, 0.1, 100, rng);
  CHECK(q.value == 0);
  CHECK(q.degenerate_sampler);

  CHECK_THROWS_AS(augment::d_aug_quantile(rs, constant, 8, 0.1, 50, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(augment::d_aug_quantile(rs, constant, 8, 1.5, 100, rng),
                  std::invalid_argument);
}

TEST_CASE("d_prime vanishes for identity copies") {
  Rng rng(23);
  const Matrix x = datagen::gaussian_matrix(20, 6, rng);
  augment::AugmentationSpec id;
  id.kind = augment::IdentityCopies{};
  id.alpha = 2;
  const auto dp = augment::d_prime(make(x, id));
  CHECK(std::abs(dp.raw) < 1e-10);
  CHECK(dp.value == 0.0);
}

TEST_CASE("d_prime stays within [0, d_aug] and needs full column rank") {
  Rng rng(29);
  for (int i = 0; i < 15; ++i) {
    const int d = rng.uniform_int(5, 12);
    const Matrix x = datagen::gaussian_matrix(d + rng.uniform_int(4, 15), d, rng);
    augment::AugmentationSpec spec;
    spec.kind = augment::GaussianJitter{rng.uniform_int(1, d - 1), 0.5};
    spec.alpha = rng.uniform_int(1, 2);
    Rng local(100 + i);
    const auto aug =
        augment::build_augmented(x, Vector::Zero(x.rows()), spec, local);
    const auto dp = augment::d_prime(aug);
    CHECK(dp.raw >= 0.0);
    CHECK(dp.raw <= static_cast<double>(dp.d_aug) + 1e-6);
  }

  // Rank-deficient stacked matrix is rejected.
  const Matrix x_thin = datagen::gaussian_matrix(4, 10, rng);
  augment::AugmentationSpec id;
  id.kind = augment::IdentityCopies{};
  id.alpha = 1;
  CHECK_THROWS_AS(augment::d_prime(make(x_thin, id)), std::invalid_argument);
}

TEST_CASE("d_prime inverts the DA-ERM risk formula (fixed design, MC)") {
  // 800 fixed-design noise draws; the MC mean of the DA-ERM excess risk
  // equals (d - d_aug + d') sigma^2 / N within MC error.
  Rng rng(31);
  const int n = 50, d = 30;
  const double sigma = 1.0;
  const Matrix x = datagen::gaussian_matrix(n, d, rng);
  Vector theta = Vector::Zero(d);
  theta.head(5) = datagen::gaussian_vector(5, rng);

  augment::AugmentationSpec spec;
  spec.kind = augment::BlockScale{5, 10, 2.0, -1.0};
  spec.alpha = 1;
  const auto aug = augment::build_augmented(x, x * theta, spec, rng);
  const auto dp = augment::d_prime(aug);

  const Matrix t_da = matkit::pinv(aug.x_aug_stacked);
  const Matrix gram = aug.x_aug_stacked.transpose() * aug.x_aug_stacked / 100.0;
  const int trials = 800;
  std::vector<double> risks;
  for (int t = 0; t < trials; ++t) {
    Vector y = x * theta;
    for (int i = 0; i < n; ++i) y(i) += rng.normal(0.0, sigma);
    Vector my(2 * n);
    my << y, y;
    const Vector diff = t_da * my - theta;
    risks.push_back(diff.dot(gram * diff));
  }
  double mean = 0.0;
  for (double r : risks) mean += r;
  mean /= trials;
  double sd = 0.0;
  for (double r : risks) sd += (r - mean) * (r - mean);
  sd = std::sqrt(sd / (trials - 1));
  const double se = sd / std::sqrt(trials);

  const double d_prime_implied = n * mean / (sigma * sigma) - (d - dp.d_aug);
  CHECK(std::abs(d_prime_implied - dp.value) <= 4.0 * n * se);
}

TEST_CASE("augmentation spec JSON round trip") {
  augment::AugmentationSpec spec;
  spec.kind = augment::GaussianJitter{7, 0.25};
  spec.alpha = 3;
  const auto back = augment::AugmentationSpec::from_json(spec.to_json());
  CHECK(back.alpha == 3);
  const auto& gj = std::get<augment::GaussianJitter>(back.kind);
  CHECK(gj.d_pert == 7);
  CHECK(gj.noise_std == 0.25);

  augment::LinearMaps lm;
  lm.maps.push_back(Matrix::Identity(2, 2));
  Matrix m2(2, 2);
  m2 << 0, 1, 1, 0;
  lm.maps.push_back(m2);
  augment::AugmentationSpec spec2;
  spec2.kind = lm;
  spec2.alpha = 2;
  const auto back2 = augment::AugmentationSpec::from_json(spec2.to_json());
  const auto& lm2 = std::get<augment::LinearMaps>(back2.kind);
  REQUIRE(lm2.maps.size() == 2);
  CHECK((lm2.maps[1] - m2).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(
      augment::AugmentationSpec::from_json({{"kind", "nope"}, {"alpha", 1}}),
      std::invalid_argument);
}

TEST_CASE("build_augmented validates dimensions") {
  Rng rng(37);
  const Matrix x = datagen::gaussian_matrix(5, 4, rng);
  augment::AugmentationSpec spec;
  spec.kind = augment::BlockScale{3, 3, 1.0, 1.0};  // 3 + 3 > 4
  spec.alpha = 1;
  CHECK_THROWS_AS(augment::build_augmented(x, Vector::Zero(5), spec, rng),
                  std::invalid_argument);
  spec.kind = augment::IdentityCopies{};
  CHECK_THROWS_AS(augment::build_augmented(x, Vector::Zero(4), spec, rng),
                  std::invalid_argument);
}
