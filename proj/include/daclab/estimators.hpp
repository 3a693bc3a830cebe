#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "daclab/augment.hpp"
#include "daclab/matkit.hpp"

namespace daclab::estimators {

using augment::AugmentedDataset;
using matkit::Index;
using matkit::Matrix;
using matkit::Vector;

enum class LinearMethod { kOls, kDaErm, kDacHard, kDacSoft };

struct LinearEstimate {
  Vector theta_hat;
  LinearMethod method = LinearMethod::kOls;
  double lambda = 0.0;  // meaningful for kDacSoft
  std::map<std::string, double> diagnostics;
  std::vector<double> loss_trace;  // filled by iterative fits only

  bool converged() const {
    auto it = diagnostics.find("converged");
    return it == diagnostics.end() || it->second != 0.0;
  }
};

struct OptimizerConfig {
  int max_iters = 5000;
  double step_size = 0.1;
  double grad_tol = 1e-7;
  std::uint64_t seed = 0;
};

enum class ReluMethod { kDaErm, kDac };

struct ReluEstimate {
  Matrix b_hat;  // d x q, unit-norm columns
  Vector w_hat;  // q, ||w||_1 <= c_w
  ReluMethod method = ReluMethod::kDaErm;
  double train_loss = 0.0;
  bool converged = false;
};

enum class Design { kAugmented, kOriginal };

/// Minimum-norm least squares X+ y.
LinearEstimate ols(const Matrix& x, const Vector& y);

/// Least squares over the stacked dataset with replicated labels.
LinearEstimate da_erm_ls(const AugmentedDataset& aug);

/// Minimizes ||y - X theta||^2 subject to Delta theta = 0, minimum-norm
/// among constrained minimizers (null-space reparametrization).
LinearEstimate dac_hard_ls(const AugmentedDataset& aug);

/// theta = (Sigma_X + lambda Sigma_Delta)^+ X'y / N with
/// Sigma_X = X'X/N and Sigma_Delta = Delta'Delta/((1+alpha)N).
LinearEstimate dac_soft_ls(const AugmentedDataset& aug, double lambda);

enum class LogisticMode { kDaErm, kDacHard };

/// Projected-gradient descent on the logistic loss over {||theta|| <= c0}.
/// kDaErm trains on the stacked samples with replicated labels; kDacHard
/// parametrizes theta = Q beta over the null space of Delta and trains on
/// the N original labeled samples only.
LinearEstimate logistic_fit(const AugmentedDataset& aug, LogisticMode mode,
                            double c0, const OptimizerConfig& opt);

/// Mean logistic loss of theta on (x, y); exposed for test-time
/// evaluation against held-out draws.
double logistic_loss(const Matrix& x, const Vector& y, const Vector& theta);

/// Gradient of the mean logistic loss (used by the fit and by the
/// finite-difference checks).
Vector logistic_grad(const Matrix& x, const Vector& y, const Vector& theta);

/// Two-layer ReLU regression, square loss. kDac constrains the hidden
/// layer to the null space of Delta (B = P_perp B~, unit columns) and
/// trains on the original samples; kDaErm trains unconstrained columns on
/// the stacked data. w is kept inside the l1 ball of radius c_w by exact
/// Euclidean projection.
ReluEstimate relu_fit(const AugmentedDataset& aug, ReluMethod mode, int width,
                      double c_w, const OptimizerConfig& opt);

/// Prediction of a fitted two-layer network at rows of x.
Vector relu_predict(const ReluEstimate& est, const Matrix& x);

/// Exact Euclidean projection onto {||w||_1 <= radius}.
Vector project_l1_ball(const Vector& w, double radius);

/// Fixed-design excess risk: augmented design
/// ||A(theta - theta*)||^2 / ((1+alpha)N), or original design
/// ||theta - theta*||^2_{Sigma_X}.
double excess_risk_fixed_design(const Vector& theta, const Vector& theta_star,
                                const AugmentedDataset& aug, Design design);

}  // namespace daclab::estimators
