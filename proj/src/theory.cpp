#include "daclab/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace daclab::theory {

namespace {

constexpr double kSoftSolveTol = 1e-13;
constexpr double kHardLambdaStandIn = 1e10;

Matrix sigma_x_of(const AugmentedDataset& aug) {
  return aug.x.transpose() * aug.x / static_cast<double>(aug.n());
}

Matrix sigma_delta_of(const AugmentedDataset& aug) {
  return aug.delta.transpose() * aug.delta /
         static_cast<double>((1 + aug.alpha) * aug.n());
}

}  // namespace

nlohmann::json TheoryReport::to_json() const {
  return {{"d", d},
          {"d_aug", d_aug},
          {"d_prime", d_prime},
          {"dac_risk_pred", dac_risk_pred},
          {"da_erm_risk_pred", da_erm_risk_pred},
          {"soft_var", soft_var},
          {"soft_bias", soft_bias},
          {"optimal_lambda", optimal_lambda},
          {"c_x", c_x},
          {"c_s", c_s},
          {"da_erm_bias", da_erm_bias},
          {"da_erm_var_lb", da_erm_var_lb}};
}

double dac_risk_pred(int d, int d_aug, double sigma, int n) {
  if (d_aug > d) throw std::invalid_argument("dac_risk_pred: d_aug > d");
  if (n < 1) throw std::invalid_argument("dac_risk_pred: n < 1");
  return static_cast<double>(d - d_aug) * sigma * sigma / n;
}

double da_erm_risk_pred(int d, int d_aug, double d_prime, double sigma, int n) {
  if (d_prime < 0 || d_prime > static_cast<double>(d_aug)) {
    throw std::invalid_argument("da_erm_risk_pred: d_prime outside [0, d_aug]");
  }
  if (d_aug > d) throw std::invalid_argument("da_erm_risk_pred: d_aug > d");
  return (static_cast<double>(d - d_aug) + d_prime) * sigma * sigma / n;
}

SoftBiasVariance soft_bias_variance(const AugmentedDataset& aug,
                                    const Vector& theta_star, double sigma,
                                    double lambda) {
  const Index d = aug.dim();
  const double n = static_cast<double>(aug.n());
  const Matrix sigma_x = sigma_x_of(aug);
  const Matrix sigma_d = sigma_delta_of(aug);

  const Matrix w = matkit::pinv(sigma_x + lambda * sigma_d, kSoftSolveTol);
  const Matrix ws = w * sigma_x;

  SoftBiasVariance out;
  out.var = sigma * sigma / n * (ws * ws).trace();
  const Vector bias_vec = ws * theta_star - theta_star;
  out.bias = bias_vec.dot(sigma_x * bias_vec);
  if (out.bias < 0) out.bias = 0;

  // Spectral cross-check, only meaningful for invertible Sigma_X.
  if (matkit::rank_tol(sigma_x) == d) {
    Eigen::SelfAdjointEigenSolver<Matrix> ex(sigma_x);
    const Vector lam = ex.eigenvalues();
    Matrix x_half = Matrix::Zero(d, d);
    Matrix x_half_inv = Matrix::Zero(d, d);
    for (Index i = 0; i < d; ++i) {
      const Vector v = ex.eigenvectors().col(i);
      x_half += std::sqrt(lam(i)) * v * v.transpose();
      x_half_inv += 1.0 / std::sqrt(lam(i)) * v * v.transpose();
    }
    Matrix m = x_half_inv * sigma_d * x_half_inv;
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> em(m);
    const Vector gam = em.eigenvalues();
    const double gmax = gam.cwiseAbs().maxCoeff();
    const double cutoff = gmax > 0 ? 1e-9 * gmax : 1e-9;

    const Matrix p_delta =
        matkit::proj(aug.delta, matkit::Subspace::kRowSpace, aug.tol).p;
    const Vector vartheta = x_half * (p_delta * theta_star);

    double var_sum = 0.0;
    double bias_sum = 0.0;
    Index rank = 0;
    for (Index i = 0; i < d; ++i) {
      if (gam(i) > cutoff) {
        ++rank;
        const double t = lambda * gam(i);
        var_sum += 1.0 / ((1.0 + t) * (1.0 + t));
        const double coord = em.eigenvectors().col(i).dot(vartheta);
        bias_sum += coord * coord * (t / (1.0 + t)) * (t / (1.0 + t));
      }
    }
    out.eigen_form_available = true;
    out.var_eigen =
        sigma * sigma / n * (static_cast<double>(d - rank) + var_sum);
    out.bias_eigen = bias_sum;
  }
  return out;
}

OptimalLambda optimal_lambda(const AugmentedDataset& aug,
                             const Vector& theta_star, double sigma) {
  const double n = static_cast<double>(aug.n());
  const Matrix sigma_x = sigma_x_of(aug);
  const Matrix sigma_d = sigma_delta_of(aug);
  const Matrix p_delta =
      matkit::proj(aug.delta, matkit::Subspace::kRowSpace, aug.tol).p;
  const Vector mis = p_delta * theta_star;
  const double misspec = mis.dot(sigma_d * mis);

  const double scale =
      std::max(theta_star.squaredNorm() * sigma_d.cwiseAbs().maxCoeff(), 1e-300);
  if (misspec <= 1e-12 * scale) {
    return {0.0, true};
  }
  const double tr = (sigma_x * matkit::pinv(sigma_d, aug.tol)).trace();
  return {std::sqrt(sigma * sigma * tr / (n * misspec)), false};
}

double soft_bound_surrogate(const AugmentedDataset& aug,
                            const Vector& theta_star, double sigma,
                            double lambda) {
  if (!(lambda > 0)) {
    throw std::invalid_argument("soft_bound_surrogate: lambda must be > 0");
  }
  const double n = static_cast<double>(aug.n());
  const Index d = aug.dim();
  const Index d_aug = augment::d_aug_of(aug);
  const Matrix sigma_x = sigma_x_of(aug);
  const Matrix sigma_d = sigma_delta_of(aug);
  const Matrix p_delta =
      matkit::proj(aug.delta, matkit::Subspace::kRowSpace, aug.tol).p;
  const Vector mis = p_delta * theta_star;
  const double misspec = mis.dot(sigma_d * mis);
  const double tr = (sigma_x * matkit::pinv(sigma_d, aug.tol)).trace();
  return sigma * sigma * static_cast<double>(d - d_aug) / n +
         sigma * sigma * tr / (2.0 * n * lambda) + 0.5 * lambda * misspec;
}

MisspecTerms da_erm_misspec_terms(const AugmentedDataset& aug,
                                  const Vector& theta_star, double sigma) {
  const Index d = aug.dim();
  const double n = static_cast<double>(aug.n());
  if (matkit::rank_tol(aug.x_aug_stacked, aug.tol) != d) {
    throw std::invalid_argument(
        "da_erm_misspec_terms: stacked matrix is rank deficient");
  }
  const double stack_rows = static_cast<double>((1 + aug.alpha) * aug.n());
  const Matrix sigma_x = sigma_x_of(aug);
  const Matrix sigma_a =
      aug.x_aug_stacked.transpose() * aug.x_aug_stacked / stack_rows;

  // S = M~' A / (1+alpha): the average of the original and augmented rows.
  Matrix s_mat = aug.x_aug_stacked.topRows(aug.n());
  for (int j = 1; j <= aug.alpha; ++j) {
    s_mat += aug.x_aug_stacked.middleRows(j * aug.n(), aug.n());
  }
  s_mat /= static_cast<double>(1 + aug.alpha);
  const Matrix sigma_s = s_mat.transpose() * s_mat / n;

  const Matrix p_delta =
      matkit::proj(aug.delta, matkit::Subspace::kRowSpace, aug.tol).p;

  // Delta~ = M~ X A^+ Delta, Sigma_Delta~ = Delta~' Delta~ / ((1+alpha) N).
  const Matrix a_pinv_delta = matkit::pinv(aug.x_aug_stacked, aug.tol) * aug.delta;
  Matrix mx(aug.x_aug_stacked.rows(), d);
  for (int j = 0; j <= aug.alpha; ++j) {
    mx.middleRows(j * aug.n(), aug.n()) = aug.x;
  }
  const Matrix dt = mx * a_pinv_delta;
  const Matrix sigma_dt = dt.transpose() * dt / stack_rows;

  MisspecTerms out;
  const Vector mis = p_delta * theta_star;
  out.bias = matkit::seminorm_sq(mis, sigma_dt);
  out.c_x = matkit::min_dominating_scalar(sigma_a, sigma_x, aug.tol);
  out.c_s = matkit::min_dominating_scalar(sigma_a, sigma_s, aug.tol);
  out.var_lb =
      sigma * sigma * static_cast<double>(d) / (n * out.c_x * out.c_s);
  const Matrix sigma_a_inv = sigma_a.ldlt().solve(Matrix::Identity(d, d));
  out.exact_var =
      sigma * sigma / n * (sigma_x * sigma_a_inv * sigma_s * sigma_a_inv).trace();
  return out;
}

RademacherEstimate rademacher_linear_dac(const Matrix& x, const Matrix& delta,
                                         double c0, int mc_draws, Rng& rng) {
  if (mc_draws < 100) {
    throw std::invalid_argument("rademacher_linear_dac: mc_draws must be >= 100");
  }
  const double n = static_cast<double>(x.rows());
  const Matrix p_perp =
      matkit::proj(delta, matkit::Subspace::kNullSpace, matkit::kDefaultRankTol)
          .p;
  const Matrix xp = x * p_perp;  // rows P_perp x_i

  double sum = 0.0;
  double sum_sq = 0.0;
  Vector eps(x.rows());
  for (int t = 0; t < mc_draws; ++t) {
    for (Index i = 0; i < eps.size(); ++i) eps(i) = rng.sign();
    const double v = c0 / n * (xp.transpose() * eps).norm();
    sum += v;
    sum_sq += v * v;
  }
  RademacherEstimate out;
  out.estimate = sum / mc_draws;
  const double var =
      std::max(0.0, sum_sq / mc_draws - out.estimate * out.estimate);
  out.std_error = std::sqrt(var / mc_draws);
  out.closed_form_bound =
      c0 / std::sqrt(n) * std::sqrt((xp.transpose() * xp).trace() / n);
  return out;
}

double prop51_bound(double rad, double c_l, double b, double delta_prob, int n) {
  if (!(delta_prob > 0 && delta_prob < 1)) {
    throw std::invalid_argument("prop51_bound: delta_prob outside (0,1)");
  }
  return 4.0 * c_l * rad +
         std::sqrt(2.0 * b * b * std::log(2.0 / delta_prob) / n);
}

TwoLayerBound two_layer_bound(const Matrix& x, const Matrix& delta, double c_w,
                              double sigma) {
  const double n = static_cast<double>(x.rows());
  const Matrix p_perp =
      matkit::proj(delta, matkit::Subspace::kNullSpace, matkit::kDefaultRankTol)
          .p;
  const Matrix xp = x * p_perp;
  TwoLayerBound out;
  out.c_n = std::sqrt(xp.squaredNorm() / n);
  out.bound = sigma * c_w * out.c_n / std::sqrt(n);
  return out;
}

DomainTargetQuantities domain_target_quantities(const DomainSpec& spec,
                                                const Vector& theta) {
  DomainTargetQuantities out;
  out.sigma_xt = spec.s_iv * spec.s_iv.transpose() +
                 spec.sigma_t * spec.s_e * spec.s_e.transpose();
  const Vector diff = theta - spec.theta_star;
  out.target_excess = 0.5 * matkit::seminorm_sq(diff, out.sigma_xt);
  return out;
}

EerEstimate eer_e(const AugmentedDataset& aug, const DomainSpec& spec,
                  int trials, Rng& rng) {
  if (trials < 100) throw std::invalid_argument("eer_e: trials must be >= 100");
  const double stack = static_cast<double>((1 + aug.alpha) * aug.n());
  const Matrix ae = aug.x_aug_stacked * spec.p_e();

  EerEstimate out;
  if (ae.cwiseAbs().maxCoeff() <= 1e-12) {
    out.degenerate = true;
    return out;
  }
  const Matrix sigma_ae_pinv =
      matkit::pinv(ae.transpose() * ae / stack, aug.tol);

  const Index n = aug.n();
  double sum = 0.0;
  double sum_sq = 0.0;
  Vector z(n);
  for (int t = 0; t < trials; ++t) {
    for (Index i = 0; i < n; ++i) z(i) = rng.normal(0.0, spec.sigma);
    // Ae' M~ z accumulated block by block; M~ replicates z.
    Vector atz = Vector::Zero(aug.dim());
    for (int j = 0; j <= aug.alpha; ++j) {
      atz += ae.middleRows(j * n, n).transpose() * z;
    }
    const Vector v = sigma_ae_pinv * atz / stack;
    const double val = 0.5 * v.squaredNorm();
    sum += val;
    sum_sq += val * val;
  }
  out.value = sum / trials;
  const double var = std::max(0.0, sum_sq / trials - out.value * out.value);
  out.std_error = std::sqrt(var / trials);
  return out;
}

TheoryReport build_report(const AugmentedDataset& aug, const Vector& theta_star,
                          double sigma) {
  TheoryReport rep;
  rep.d = static_cast<int>(aug.dim());
  rep.d_aug = static_cast<int>(augment::d_aug_of(aug));
  const auto dp = augment::d_prime(aug);
  rep.d_prime = dp.value;
  rep.dac_risk_pred =
      dac_risk_pred(rep.d, rep.d_aug, sigma, static_cast<int>(aug.n()));
  rep.da_erm_risk_pred = da_erm_risk_pred(rep.d, rep.d_aug, rep.d_prime, sigma,
                                          static_cast<int>(aug.n()));

  const auto lam = optimal_lambda(aug, theta_star, sigma);
  rep.optimal_lambda = lam.label_invariant ? kHardLambdaStandIn : lam.value;
  const auto sv = soft_bias_variance(aug, theta_star, sigma, rep.optimal_lambda);
  rep.soft_var = sv.var;
  rep.soft_bias = sv.bias;

  const auto mt = da_erm_misspec_terms(aug, theta_star, sigma);
  rep.c_x = mt.c_x;
  rep.c_s = mt.c_s;
  rep.da_erm_bias = mt.bias;
  rep.da_erm_var_lb = mt.var_lb;
  return rep;
}

}  // namespace daclab::theory
