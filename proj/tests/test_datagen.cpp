#include <doctest.h>

#include <cmath>

#include "daclab/datagen.hpp"

using daclab::Rng;
using daclab::matkit::Matrix;
using daclab::matkit::Vector;
namespace datagen = daclab::datagen;

TEST_CASE("gen_linear noiseless and covariance") {
  Rng rng(3);
  datagen::LinearModelSpec spec;
  spec.d = 6;
  spec.theta_star = datagen::gaussian_vector(6, rng);
  spec.sigma = 0.0;
  const auto [x, y] = datagen::gen_linear(spec, 200, rng);
  CHECK((y - x * spec.theta_star).cwiseAbs().maxCoeff() == 0.0);

  // Operator-norm check of the empirical covariance on a large draw.
  spec.d = 10;
  spec.theta_star = Vector::Zero(10);
  const auto [xc, yc] = datagen::gen_linear(spec, 100000, rng);
  const Matrix cov = xc.transpose() * xc / 100000.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.95);
  CHECK(es.eigenvalues().maxCoeff() < 1.05);
}

TEST_CASE("standardized fourth moment is Gaussian") {
  Rng rng(5);
  datagen::LinearModelSpec spec;
  spec.d = 2;
  spec.theta_star = Vector::Zero(2);
  spec.sigma = 0.0;
  const auto [x, y] = datagen::gen_linear(spec, 500000, rng);
  const double m4 = x.array().pow(4).mean();
  CHECK(m4 > 2.8);
  CHECK(m4 < 3.2);
}

TEST_CASE("sample covariance concentration at large n/d") {
  // The 0.9..1.1 band needs n >> d; n = 1000 d puts the eigenvalue edges
  // (1 +- sqrt(d/n))^2 ~ 1 +- 0.065 safely inside.
  Rng rng(7);
  const int d = 6, n = 6000, trials = 200;
  int ok = 0;
  for (int t = 0; t < trials; ++t) {
    const Matrix x = datagen::gaussian_matrix(n, d, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.transpose() * x / n,
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() >= 0.9 && es.eigenvalues().maxCoeff() <= 1.1) {
      ++ok;
    }
  }
  CHECK(ok >= 198);  // >= 99% of 200
}

TEST_CASE("gen_logistic marginals and calibration") {
  Rng rng(11);
  datagen::LogisticModelSpec spec;
  spec.d = 5;
  spec.theta_star = Vector::Zero(5);
  spec.c0 = 1.0;
  const auto [x0, y0] = datagen::gen_logistic(spec, 100000, rng);
  CHECK(std::abs(y0.mean() - 0.5) < 0.01);

  // Binned calibration against the sigmoid.
  spec.theta_star = datagen::gaussian_vector(5, rng);
  spec.theta_star *= 0.9 / spec.theta_star.norm();
  const int n = 200000;
  const auto [x, y] = datagen::gen_logistic(spec, n, rng);
  const Vector margin = x * spec.theta_star;
  const double lo = -2.0, width = 0.5;
  const int bins = 8;
  std::vector<double> count(bins, 0), hits(bins, 0), expected(bins, 0),
      varsum(bins, 0);
  for (int i = 0; i < n; ++i) {
    const int b = static_cast<int>(std::floor((margin(i) - lo) / width));
    if (b < 0 || b >= bins) continue;
    const double p = 1.0 / (1.0 + std::exp(-margin(i)));
    count[b] += 1;
    hits[b] += y(i);
    expected[b] += p;
    varsum[b] += p * (1.0 - p);
  }
  for (int b = 0; b < bins; ++b) {
    REQUIRE(count[b] > 100);
    const double se = std::sqrt(varsum[b]) / count[b];
    CHECK(std::abs(hits[b] / count[b] - expected[b] / count[b]) <= 3.0 * se);
  }
}

TEST_CASE("gen_logistic honors the feature clip") {
  Rng rng(13);
  datagen::LogisticModelSpec spec;
  spec.d = 8;
  spec.theta_star = Vector::Zero(8);
  spec.c0 = 1.0;
  spec.feature_clip = 2.0;
  const auto [x, y] = datagen::gen_logistic(spec, 500, rng);
  for (int i = 0; i < 500; ++i) {
    CHECK(x.row(i).norm() <= 2.0 + 1e-12);
  }
}

TEST_CASE("gen_relu teacher behaviors") {
  Rng rng(17);
  datagen::ReluNetSpec spec;
  spec.d = 4;
  spec.width = 1;
  spec.b_star = Matrix::Zero(4, 1);
  spec.b_star(0, 0) = 1.0;
  spec.w_star = Vector::Ones(1);
  spec.sigma = 0.0;
  spec.c_w = 1.0;
  const auto [x, y] = datagen::gen_relu(spec, 300, rng);
  for (int i = 0; i < 300; ++i) {
    CHECK(y(i) == doctest::Approx(std::max(x(i, 0), 0.0)));
  }

  // w* = 0 kills the signal entirely in the noiseless case.
  spec.w_star = Vector::Zero(1);
  const auto [x0, y0] = datagen::gen_relu(spec, 50, rng);
  CHECK(y0.cwiseAbs().maxCoeff() == 0.0);

  // Gaussian half-moment: E[y] = sum_k w_k / sqrt(2 pi).
  datagen::ReluNetSpec t3;
  t3.d = 6;
  t3.width = 3;
  t3.b_star = Matrix::Zero(6, 3);
  for (int k = 0; k < 3; ++k) {
    Vector col = datagen::gaussian_vector(6, rng);
    t3.b_star.col(k) = col / col.norm();
  }
  t3.w_star = Vector(3);
  t3.w_star << 1.0, 0.5, 0.25;
  t3.sigma = 0.0;
  t3.c_w = 2.0;
  const auto [xb, yb] = datagen::gen_relu(t3, 100000, rng);
  const double target = t3.w_star.sum() / std::sqrt(2.0 * M_PI);
  CHECK(std::abs(yb.mean() - target) <= 0.02 * std::abs(target) + 0.01);
}

TEST_CASE("gen_domain satisfies the causal-graph moments") {
  Rng rng(19);
  const auto p = datagen::preset("example_C1");
  auto spec = p.materialize_domain(4.0, rng);

  const int n = 100000;
  const auto [x, y] = datagen::gen_domain(spec, datagen::Domain::kTarget, n, rng);

  // Latent noise recovers exactly: z = y - theta*' x.
  const Vector z = y - x * spec.theta_star;
  const Matrix ze = x * spec.s_e;  // zeta_e coordinates

  // E[z * zeta_e] = 0 (Assumption on the target environment).
  for (int j = 0; j < spec.d_e; ++j) {
    const Vector prod = z.cwiseProduct(ze.col(j));
    const double mean = prod.mean();
    const double sd = std::sqrt((prod.array() - mean).square().mean());
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
  }

  // Cov(zeta_e) = sigma_t I within 5% in operator norm.
  const Matrix cov = ze.transpose() * ze / n;
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > 0.95 * spec.sigma_t);
  CHECK(es.eigenvalues().maxCoeff() < 1.05 * spec.sigma_t);

  // y carries no environmental signal: regressing y on zeta_e gives
  // coefficients within noise.
  const Matrix gram = ze.transpose() * ze;
  const Vector beta = gram.ldlt().solve(ze.transpose() * y);
  const double resid_var = (y - ze * beta).squaredNorm() / (n - spec.d_e);
  const Matrix gram_inv = gram.ldlt().solve(Matrix::Identity(spec.d_e, spec.d_e));
  for (int j = 0; j < spec.d_e; ++j) {
    const double se = std::sqrt(resid_var * gram_inv(j, j));
    CHECK(std::abs(beta(j)) <= 3.0 * se);
  }
}

TEST_CASE("presets carry the paper constants") {
  const auto p41 = datagen::preset("example_4_1");
  CHECK(p41.n == 50);
  CHECK(p41.d == 30);
  CHECK(p41.sigma == 1.0);
  bool has20 = false, has25 = false;
  for (const auto& c : p41.cells) {
    has20 = has20 || c.d_aug == 20;
    has25 = has25 || c.d_aug == 25;
  }
  CHECK(has20);
  CHECK(has25);

  const auto p42 = datagen::preset("example_4_2");
  CHECK(p42.n == 50);
  CHECK(p42.alpha_grid == std::vector<int>{1, 3, 7, 15});
  CHECK(p42.d_aug_grid == std::vector<int>{20, 25});

  const auto p6 = datagen::preset("example_6");
  CHECK(p6.sigma == 0.1);
  CHECK(p6.theta_support == 10);
  bool has32 = false;
  for (double l : p6.lambda_grid) has32 = has32 || l == doctest::Approx(3.2);
  CHECK(has32);
  CHECK(p6.jitter_std == doctest::Approx(std::sqrt(0.1)));
  CHECK(p6.jitter_std_alt == doctest::Approx(0.1));

  const auto pc1 = datagen::preset("example_C1");
  CHECK(pc1.d_iv + pc1.d_e == pc1.d);
  CHECK(pc1.sigma_t_grid == std::vector<double>{1.0, 5.0, 10.0});

  CHECK_THROWS_AS(datagen::preset("nope"), std::invalid_argument);
}

TEST_CASE("preset materializers are seed-deterministic") {
  const auto p = datagen::preset("example_4_1");
  Rng a(42), b(42), c(43);
  const auto sa = p.materialize_linear(a);
  const auto sb = p.materialize_linear(b);
  const auto sc = p.materialize_linear(c);
  CHECK((sa.theta_star - sb.theta_star).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sa.theta_star - sc.theta_star).cwiseAbs().maxCoeff() != 0.0);
  CHECK(sa.theta_star.tail(25).cwiseAbs().maxCoeff() == 0.0);

  const auto p6 = datagen::preset("example_6");
  Rng r6(1);
  const auto s6 = p6.materialize_misspec(r6);
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(s6.theta_star(i)) == 1.0);
  }
  CHECK(s6.theta_star.tail(20).cwiseAbs().maxCoeff() == 0.0);

  const auto pc1 = datagen::preset("example_C1");
  Rng rc(2);
  const auto dspec = pc1.materialize_domain(10.0, rc);
  Matrix s(dspec.d, dspec.d_iv + dspec.d_e);
  s << dspec.s_iv, dspec.s_e;
  CHECK((s.transpose() * s - Matrix::Identity(s.cols(), s.cols()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((dspec.p_iv() * dspec.theta_star - dspec.theta_star)
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("model spec JSON round trips") {
  Rng rng(23);
  datagen::LinearModelSpec lin;
  lin.d = 4;
  lin.theta_star = datagen::gaussian_vector(4, rng);
  lin.sigma = 0.3;
  const auto lin2 = datagen::LinearModelSpec::from_json(lin.to_json());
  CHECK(lin2.sigma == 0.3);
  CHECK((lin2.theta_star - lin.theta_star).cwiseAbs().maxCoeff() == 0.0);

  datagen::LogisticModelSpec log;
  log.d = 3;
  log.theta_star = Vector::Zero(3);
  log.c0 = 2.0;
  const auto log2 = datagen::LogisticModelSpec::from_json(log.to_json());
  CHECK(log2.c0 == 2.0);

  datagen::ReluNetSpec relu;
  relu.d = 3;
  relu.width = 2;
  relu.b_star = Matrix::Zero(3, 2);
  relu.b_star(0, 0) = 1.0;
  relu.b_star(2, 1) = 1.0;
  relu.w_star = Vector(2);
  relu.w_star << 0.5, -0.25;
  relu.sigma = 0.1;
  relu.c_w = 1.0;
  const auto relu2 = datagen::ReluNetSpec::from_json(relu.to_json());
  CHECK((relu2.b_star - relu.b_star).cwiseAbs().maxCoeff() == 0.0);
  CHECK(relu2.c_w == 1.0);

  const auto pc1 = datagen::preset("example_C1");
  Rng drng(31);
  const auto dom = pc1.materialize_domain(5.0, drng);
  const auto dom2 = datagen::DomainSpec::from_json(dom.to_json());
  CHECK((dom2.s_e - dom.s_e).cwiseAbs().maxCoeff() == 0.0);
  CHECK(dom2.sigma_t == 5.0);
}
