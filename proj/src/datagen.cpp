#include "daclab/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace daclab::datagen {

namespace {

Vector vector_from_json(const nlohmann::json& j) {
  Vector v(j.size());
  for (Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const nlohmann::json& j, Index rows, Index cols) {
  if (static_cast<Index>(j.size()) != rows * cols) {
    throw std::invalid_argument("model spec json: matrix length mismatch");
  }
  Matrix m(rows, cols);
  Index k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) m(i, c) = j[k++].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index c = 0; c < m.cols(); ++c) out.push_back(m(i, c));
  }
  return out;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

Vector gaussian_vector(Index size, Rng& rng) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  if (cols > rows) {
    throw std::invalid_argument("random_orthonormal: cols > rows");
  }
  const Matrix g = gaussian_matrix(rows, rows, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topLeftCorner(cols, cols);
  for (Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

nlohmann::json LinearModelSpec::to_json() const {
  return {{"d", d}, {"theta_star", vector_to_json(theta_star)}, {"sigma", sigma}};
}

LinearModelSpec LinearModelSpec::from_json(const nlohmann::json& j) {
  LinearModelSpec s;
  s.d = j.at("d").get<int>();
  s.theta_star = vector_from_json(j.at("theta_star"));
  s.sigma = j.at("sigma").get<double>();
  if (s.theta_star.size() != s.d || !s.theta_star.allFinite() || s.sigma < 0) {
    throw std::invalid_argument("LinearModelSpec: invalid fields");
  }
  return s;
}

nlohmann::json LogisticModelSpec::to_json() const {
  return {{"d", d},
          {"theta_star", vector_to_json(theta_star)},
          {"c0", c0},
          {"feature_clip", feature_clip}};
}

LogisticModelSpec LogisticModelSpec::from_json(const nlohmann::json& j) {
  LogisticModelSpec s;
  s.d = j.at("d").get<int>();
  s.theta_star = vector_from_json(j.at("theta_star"));
  s.c0 = j.at("c0").get<double>();
  s.feature_clip = j.value("feature_clip", 0.0);
  if (s.theta_star.norm() > s.c0 + 1e-12) {
    throw std::invalid_argument("LogisticModelSpec: ||theta*|| > c0");
  }
  return s;
}

nlohmann::json ReluNetSpec::to_json() const {
  return {{"d", d},
          {"width", width},
          {"b_star", matrix_to_json(b_star)},
          {"w_star", vector_to_json(w_star)},
          {"sigma", sigma},
          {"c_w", c_w}};
}

ReluNetSpec ReluNetSpec::from_json(const nlohmann::json& j) {
  ReluNetSpec s;
  s.d = j.at("d").get<int>();
  s.width = j.at("width").get<int>();
  s.b_star = matrix_from_json(j.at("b_star"), s.d, s.width);
  s.w_star = vector_from_json(j.at("w_star"));
  s.sigma = j.at("sigma").get<double>();
  s.c_w = j.at("c_w").get<double>();
  for (Index k = 0; k < s.width; ++k) {
    if (std::abs(s.b_star.col(k).norm() - 1.0) > 1e-10) {
      throw std::invalid_argument("ReluNetSpec: b_star columns must be unit");
    }
  }
  if (s.w_star.cwiseAbs().sum() > s.c_w + 1e-12) {
    throw std::invalid_argument("ReluNetSpec: ||w*||_1 > c_w");
  }
  return s;
}

nlohmann::json DomainSpec::to_json() const {
  return {{"d", d},
          {"d_iv", d_iv},
          {"d_e", d_e},
          {"s_iv", matrix_to_json(s_iv)},
          {"s_e", matrix_to_json(s_e)},
          {"theta_star", vector_to_json(theta_star)},
          {"sigma", sigma},
          {"sigma_t", sigma_t}};
}

DomainSpec DomainSpec::from_json(const nlohmann::json& j) {
  DomainSpec s;
  s.d = j.at("d").get<int>();
  s.d_iv = j.at("d_iv").get<int>();
  s.d_e = j.at("d_e").get<int>();
  s.s_iv = matrix_from_json(j.at("s_iv"), s.d, s.d_iv);
  s.s_e = matrix_from_json(j.at("s_e"), s.d, s.d_e);
  s.theta_star = vector_from_json(j.at("theta_star"));
  s.sigma = j.at("sigma").get<double>();
  s.sigma_t = j.at("sigma_t").get<double>();
  Matrix full(s.d, s.d_iv + s.d_e);
  full << s.s_iv, s.s_e;
  if ((full.transpose() * full - Matrix::Identity(full.cols(), full.cols()))
          .cwiseAbs()
          .maxCoeff() > 1e-10) {
    throw std::invalid_argument("DomainSpec: [s_iv, s_e] not orthonormal");
  }
  if ((s.p_iv() * s.theta_star - s.theta_star).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("DomainSpec: theta* outside Range(s_iv)");
  }
  return s;
}

std::pair<Matrix, Vector> gen_linear(const LinearModelSpec& spec, int n,
                                     Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_linear: n < 1");
  Matrix x = gaussian_matrix(n, spec.d, rng);
  Vector y = x * spec.theta_star;
  if (spec.sigma > 0) {
    for (Index i = 0; i < n; ++i) y(i) += rng.normal(0.0, spec.sigma);
  }
  return {std::move(x), std::move(y)};
}

std::pair<Matrix, Vector> gen_logistic(const LogisticModelSpec& spec, int n,
                                       Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_logistic: n < 1");
  Matrix x = gaussian_matrix(n, spec.d, rng);
  if (spec.feature_clip > 0) {
    for (Index i = 0; i < n; ++i) {
      const double nrm = x.row(i).norm();
      if (nrm > spec.feature_clip) x.row(i) *= spec.feature_clip / nrm;
    }
  }
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = rng.bernoulli(sigmoid(x.row(i).dot(spec.theta_star))) ? 1.0 : 0.0;
  }
  return {std::move(x), std::move(y)};
}

std::pair<Matrix, Vector> gen_relu(const ReluNetSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_relu: n < 1");
  if (spec.b_star.rows() != spec.d || spec.b_star.cols() != spec.width ||
      spec.w_star.size() != spec.width) {
    throw std::invalid_argument("gen_relu: inconsistent teacher shapes");
  }
  Matrix x = gaussian_matrix(n, spec.d, rng);
  Vector y = (x * spec.b_star).cwiseMax(0.0) * spec.w_star;
  if (spec.sigma > 0) {
    for (Index i = 0; i < n; ++i) y(i) += rng.normal(0.0, spec.sigma);
  }
  return {std::move(x), std::move(y)};
}

std::pair<Matrix, Vector> gen_domain(const DomainSpec& spec, Domain which,
                                     int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("gen_domain: n < 1");
  const double env_cov = which == Domain::kSource ? 1.0 : spec.sigma_t;
  const double env_std = std::sqrt(env_cov);
  Matrix x(n, spec.d);
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    const Vector zeta_iv = gaussian_vector(spec.d_iv, rng);
    const double z = rng.normal(0.0, spec.sigma);
    Vector e = gaussian_vector(spec.d_e, rng) * env_std;
    const Vector zeta_e = (z >= 0 ? 1.0 : -1.0) * e;
    x.row(i) = (spec.s_iv * zeta_iv + spec.s_e * zeta_e).transpose();
    y(i) = spec.theta_star.dot(x.row(i)) + z;
  }
  return {std::move(x), std::move(y)};
}

LinearModelSpec Preset::materialize_linear(Rng& rng) const {
  LinearModelSpec spec;
  spec.d = d;
  spec.sigma = sigma;
  spec.theta_star = Vector::Zero(d);
  spec.theta_star.head(theta_support) = gaussian_vector(theta_support, rng);
  return spec;
}

LogisticModelSpec Preset::materialize_logistic(Rng& rng) const {
  LogisticModelSpec spec;
  spec.d = d;
  spec.c0 = c0;
  spec.feature_clip = 0.0;
  spec.theta_star = Vector::Zero(d);
  spec.theta_star.head(theta_support) = gaussian_vector(theta_support, rng);
  // Rare out-of-ball draws are rescaled so the model stays well specified.
  const double nrm = spec.theta_star.norm();
  if (nrm > c0) spec.theta_star *= 0.99 * c0 / nrm;
  return spec;
}

LinearModelSpec Preset::materialize_misspec(Rng& rng) const {
  LinearModelSpec spec;
  spec.d = d;
  spec.sigma = sigma;
  spec.theta_star = Vector::Zero(d);
  for (int i = 0; i < theta_support; ++i) {
    spec.theta_star(i) = rng.sign();
  }
  return spec;
}

DomainSpec Preset::materialize_domain(double sigma_t, Rng& rng) const {
  DomainSpec spec;
  spec.d = d;
  spec.d_iv = d_iv;
  spec.d_e = d_e;
  spec.sigma = sigma;
  spec.sigma_t = sigma_t;
  const Matrix s = random_orthonormal(d, d_iv + d_e, rng);
  spec.s_iv = s.leftCols(d_iv);
  spec.s_e = s.rightCols(d_e);
  spec.theta_star = spec.s_iv * gaussian_vector(d_iv, rng);
  return spec;
}

augment::AugmentationSpec Preset::materialize_linear_maps(
    const DomainSpec& spec, Rng& rng) const {
  augment::LinearMaps lm;
  for (int j = 0; j < alpha; ++j) {
    Vector u = spec.s_e * gaussian_vector(spec.d_e, rng);
    Vector v = spec.s_e * gaussian_vector(spec.d_e, rng);
    u.normalize();
    v.normalize();
    lm.maps.push_back(spec.p_iv() + u * v.transpose());
  }
  augment::AugmentationSpec out;
  out.kind = std::move(lm);
  out.alpha = alpha;
  return out;
}

Preset preset(const std::string& name) {
  Preset p;
  p.name = name;
  if (name == "example_4_1") {
    p.d = 30;
    p.n = 50;
    p.sigma = 1.0;
    p.theta_support = 5;
    p.trials = 2000;
    p.fixed_design = true;
    // BlockScale grid: d_aug = 30 - d_c1, varying d_e1 moves d'.
    for (const auto& [d_c1, d_e1] :
         std::vector<std::pair<int, int>>{{5, 0},
                                          {5, 5},
                                          {5, 10},
                                          {5, 15},
                                          {5, 20},
                                          {5, 25},
                                          {10, 0},
                                          {10, 10},
                                          {10, 20}}) {
      PresetCell cell;
      cell.aug.kind = augment::BlockScale{d_c1, d_e1, 2.0, -1.0};
      cell.aug.alpha = 1;
      cell.d_aug = 30 - d_c1;
      cell.params = {{"d_c1", d_c1}, {"d_e1", d_e1}, {"d_aug", cell.d_aug}};
      p.cells.push_back(std::move(cell));
    }
  } else if (name == "example_4_2") {
    p.d = 30;
    p.n = 50;
    p.theta_support = 3;
    p.c0 = 4.0;
    p.trials = 200;
    p.fixed_design = false;
    p.test_size = 10000;
    p.d_aug_grid = {20, 25};
    p.alpha_grid = {1, 3, 7, 15};
  } else if (name == "example_6") {
    p.d = 30;
    p.n = 50;
    p.sigma = 0.1;
    p.theta_support = 10;  // d_c
    p.trials = 2000;
    p.fixed_design = true;
    // "N(0, 0.1)" jitter read as variance 0.1 (std ~ 0.3162); the
    // competing mean/std reading is kept selectable.
    p.jitter_std = std::sqrt(0.1);
    p.jitter_std_alt = 0.1;
    p.d_aug_grid = {20, 22, 24, 26, 28};
    for (int k = 0; k < 12; ++k) {
      p.lambda_grid.push_back(0.0125 * std::pow(2.0, k));  // hits 3.2 at k=8
    }
    for (const int d_aug : p.d_aug_grid) {
      PresetCell cell;
      cell.aug.kind = augment::GaussianJitter{d_aug, p.jitter_std};
      cell.aug.alpha = 1;
      cell.d_aug = d_aug;
      cell.params = {{"d_aug", d_aug}};
      p.cells.push_back(std::move(cell));
    }
  } else if (name == "example_C1") {
    p.d = 16;
    p.d_iv = 4;
    p.d_e = 12;
    p.n = 200;
    p.sigma = 1.0;
    p.alpha = 2;
    p.trials = 500;
    p.fixed_design = false;
    p.sigma_t_grid = {1.0, 5.0, 10.0};
  } else {
    throw std::invalid_argument("preset: unknown name '" + name + "'");
  }
  return p;
}

}  // namespace daclab::datagen
