#pragma once

#include <string>

#include "daclab/augment.hpp"
#include "daclab/datagen.hpp"
#include "daclab/matkit.hpp"
#include "daclab/rng.hpp"

#include <json.hpp>

namespace daclab::theory {

using augment::AugmentedDataset;
using datagen::DomainSpec;
using matkit::Index;
using matkit::Matrix;
using matkit::Vector;

/// Closed-form predictions for one augmented-design instance.
struct TheoryReport {
  int d = 0;
  int d_aug = 0;
  double d_prime = 0.0;
  double dac_risk_pred = 0.0;
  double da_erm_risk_pred = 0.0;
  double soft_var = 0.0;
  double soft_bias = 0.0;
  double optimal_lambda = 0.0;
  double c_x = 0.0;
  double c_s = 0.0;
  double da_erm_bias = 0.0;
  double da_erm_var_lb = 0.0;

  nlohmann::json to_json() const;
};

/// Fixed-design DAC excess risk (d - d_aug) sigma^2 / n.
double dac_risk_pred(int d, int d_aug, double sigma, int n);

/// Fixed-design DA-ERM excess risk (d - d_aug + d') sigma^2 / n.
double da_erm_risk_pred(int d, int d_aug, double d_prime, double sigma, int n);

struct SoftBiasVariance {
  double var = 0.0;
  double bias = 0.0;
  // Spectral cross-check, available when Sigma_X is positive definite.
  bool eigen_form_available = false;
  double var_eigen = 0.0;
  double bias_eigen = 0.0;
};

/// Exact fixed-design variance and squared bias of the soft-DAC solution:
/// Var = (sigma^2/N) tr([(Sigma_X + lambda Sigma_D)^+ Sigma_X]^2),
/// Bias = ||(Sigma_X + lambda Sigma_D)^+ Sigma_X theta* - theta*||^2_{Sigma_X}.
/// The gamma_i / vartheta_i spectral forms are computed alongside as a
/// cross-check whenever Sigma_X is invertible.
SoftBiasVariance soft_bias_variance(const AugmentedDataset& aug,
                                    const Vector& theta_star, double sigma,
                                    double lambda);

struct OptimalLambda {
  double value = 0.0;
  /// True when ||P_D theta*||^2_{Sigma_D} = 0: the augmentation is label
  /// invariant for theta*, the optimum is lambda -> infinity (hard DAC)
  /// and `value` is meaningless.
  bool label_invariant = false;
};

/// lambda* = sqrt(sigma^2 tr(Sigma_X Sigma_D^+) / (N ||P_D theta*||^2_{Sigma_D})).
OptimalLambda optimal_lambda(const AugmentedDataset& aug,
                             const Vector& theta_star, double sigma);

/// The surrogate objective lambda* minimizes:
/// sigma^2 (d-d_aug)/N + sigma^2 tr(Sigma_X Sigma_D^+)/(2 N lambda)
///   + (lambda/2) ||P_D theta*||^2_{Sigma_D}.
double soft_bound_surrogate(const AugmentedDataset& aug,
                            const Vector& theta_star, double sigma,
                            double lambda);

struct MisspecTerms {
  double bias = 0.0;       // ||P_D theta*||^2_{Sigma_D~}
  double var_lb = 0.0;     // sigma^2 d / (N c_x c_s)
  double c_x = 0.0;
  double c_s = 0.0;
  double exact_var = 0.0;  // (sigma^2/N) tr(Sigma_X Sigma_A^-1 Sigma_S Sigma_A^-1)
};

/// DA-ERM side of the misspecification comparison; requires the stacked
/// matrix to have full column rank.
MisspecTerms da_erm_misspec_terms(const AugmentedDataset& aug,
                                  const Vector& theta_star, double sigma);

struct RademacherEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double closed_form_bound = 0.0;
};

/// Empirical Rademacher complexity of the DAC-constrained linear class:
/// MC mean of (c0/n) ||sum_i eps_i P_perp x_i||_2 against the closed-form
/// bound (c0/sqrt(n)) sqrt(tr(P_perp X'X P_perp)/n).
RademacherEstimate rademacher_linear_dac(const Matrix& x, const Matrix& delta,
                                         double c0, int mc_draws, Rng& rng);

/// Generalization bound for B-bounded, C_l-Lipschitz losses:
/// 4 C_l rad + sqrt(2 B^2 log(2/delta) / n).
double prop51_bound(double rad, double c_l, double b, double delta_prob, int n);

struct TwoLayerBound {
  double c_n = 0.0;
  double bound = 0.0;  // sigma c_w c_n / sqrt(n)
};

TwoLayerBound two_layer_bound(const Matrix& x, const Matrix& delta, double c_w,
                              double sigma);

struct DomainTargetQuantities {
  Matrix sigma_xt;        // S_iv S_iv' + sigma_t S_e S_e'
  double target_excess;   // 0.5 ||theta - theta*||^2_{Sigma_xt}
};

DomainTargetQuantities domain_target_quantities(const DomainSpec& spec,
                                                const Vector& theta);

struct EerEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool degenerate = false;  // environmental block of the design is zero
};

/// Monte Carlo estimate of the environmental excess-risk term
/// E[ 1/2 || Sigma_Ae^+ Ae' M~ z / ((1+alpha) n) ||^2 ] with z resampled
/// per trial; Ae is the stacked design projected onto Col(S_e).
EerEstimate eer_e(const AugmentedDataset& aug, const DomainSpec& spec,
                  int trials, Rng& rng);

/// Assembles the full report for a linear instance. When the
/// augmentation is label invariant for theta*, lambda* is infinite and
/// the report stores the hard-DAC stand-in 1e10 (soft terms evaluated
/// there coincide with the hard limit).
TheoryReport build_report(const AugmentedDataset& aug, const Vector& theta_star,
                          double sigma);

}  // namespace daclab::theory
