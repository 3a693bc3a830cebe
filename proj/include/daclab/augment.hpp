#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "daclab/matkit.hpp"
#include "daclab/rng.hpp"

#include <json.hpp>

namespace daclab::augment {

using matkit::Index;
using matkit::Matrix;
using matkit::Vector;

// Augmentation recipes. All of them act row-wise on an N x d sample
// matrix and produce alpha copies stacked below the originals.
struct IdentityCopies {};

/// (x_c1, x_e1, x_e2) -> (x_c1, scale_e1 * x_e1, scale_e2 * x_e2),
/// deterministic and identical for every copy.
struct BlockScale {
  int d_c1 = 0;
  int d_e1 = 0;
  double scale_e1 = 1.0;
  double scale_e2 = 1.0;
};

/// Redraws the last d_pert coordinates from a standard normal,
/// independently per copy.
struct CoordinateResample {
  int d_pert = 0;
};

/// Adds N(0, noise_std^2) entry-wise to the last d_pert coordinates,
/// independently per copy.
struct GaussianJitter {
  int d_pert = 0;
  double noise_std = 0.0;
};

/// Copy j is X * A_j' (row i maps to A_j x_i); maps.size() must equal
/// alpha and each map must be d x d.
struct LinearMaps {
  std::vector<Matrix> maps;
};

/// Deterministically negates the last env_dim coordinates.
struct EnvSignFlip {
  int env_dim = 0;
};

struct AugmentationSpec {
  std::variant<IdentityCopies, BlockScale, CoordinateResample, GaussianJitter,
               LinearMaps, EnvSignFlip>
      kind;
  int alpha = 1;

  std::string kind_name() const;
  nlohmann::json to_json() const;
  static AugmentationSpec from_json(const nlohmann::json& j);
};

/// Original samples, replicated labels, stacked augmentations and the
/// difference matrix Delta = x_aug_stacked - [X; X; ...; X].
///
/// Row layout of x_aug_stacked: rows 0..N-1 are X; rows k*N..(k+1)*N-1
/// (k = 1..alpha) are the k-th augmentation of each sample, in sample
/// order.
struct AugmentedDataset {
  Matrix x;              // N x d
  Vector y;              // N
  int alpha = 1;
  Matrix x_aug_stacked;  // (1+alpha)N x d
  Matrix delta;          // (1+alpha)N x d, first N rows exactly zero
  double tol = matkit::kDefaultRankTol;

  Index n() const { return x.rows(); }
  Index dim() const { return x.cols(); }
};

AugmentedDataset build_augmented(const Matrix& x, const Vector& y,
                                 const AugmentationSpec& spec, Rng& rng);

/// Labels for the stacked dataset: y repeated (1+alpha) times, matching
/// the row order of x_aug_stacked.
Vector replicate_labels(const AugmentedDataset& aug);

/// Augmentation strength d_aug = rank(Delta).
Index d_aug_of(const AugmentedDataset& aug);

struct QuantileResult {
  int value = 0;
  bool degenerate_sampler = false;
};

/// Monte Carlo realization of the distributional strength d_aug(delta):
/// largest k such that the empirical frequency of {rank(Delta) < k}
/// over the trials stays <= delta_prob.
QuantileResult d_aug_quantile(const AugmentationSpec& spec,
                              const std::function<Matrix(int, Rng&)>& sampler,
                              int n, double delta_prob, int trials, Rng& rng);

struct DPrimeResult {
  double value = 0.0;  // clamped to [0, d_aug]
  double raw = 0.0;    // unclamped, kept for drift diagnostics
  Index d_aug = 0;
};

/// d' = tr(M'(P_A - P_S)M) / (1+alpha), the variance excess of DA-ERM over
/// DAC. Requires the stacked matrix to have full column rank.
DPrimeResult d_prime(const AugmentedDataset& aug);

}  // namespace daclab::augment
