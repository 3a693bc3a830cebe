#pragma once

#include <string>
#include <utility>
#include <vector>

#include "daclab/augment.hpp"
#include "daclab/matkit.hpp"
#include "daclab/rng.hpp"

#include <json.hpp>

namespace daclab::datagen {

using matkit::Index;
using matkit::Matrix;
using matkit::Vector;

struct LinearModelSpec {
  int d = 0;
  Vector theta_star;
  double sigma = 0.0;  // noise std

  nlohmann::json to_json() const;
  static LinearModelSpec from_json(const nlohmann::json& j);
};

struct LogisticModelSpec {
  int d = 0;
  Vector theta_star;
  double c0 = 1.0;           // parameter ball radius, ||theta*|| <= c0
  double feature_clip = 0.0; // max ||x||_2; 0 disables clipping

  nlohmann::json to_json() const;
  static LogisticModelSpec from_json(const nlohmann::json& j);
};

struct ReluNetSpec {
  int d = 0;
  int width = 0;   // q
  Matrix b_star;   // d x q, unit-norm columns
  Vector w_star;   // q, ||w*||_1 <= c_w
  double sigma = 0.0;
  double c_w = 1.0;

  nlohmann::json to_json() const;
  static ReluNetSpec from_json(const nlohmann::json& j);
};

struct DomainSpec {
  int d = 0;
  int d_iv = 0;
  int d_e = 0;
  Matrix s_iv;        // d x d_iv
  Matrix s_e;         // d x d_e, [s_iv, s_e] orthonormal columns
  Vector theta_star;  // in Range(s_iv)
  double sigma = 0.0;
  double sigma_t = 1.0;  // target environmental covariance scale

  Matrix p_iv() const { return s_iv * s_iv.transpose(); }
  Matrix p_e() const { return s_e * s_e.transpose(); }

  nlohmann::json to_json() const;
  static DomainSpec from_json(const nlohmann::json& j);
};

enum class Domain { kSource, kTarget };

/// X rows iid N(0, I_d); y = X theta* + eps, eps iid N(0, sigma^2).
std::pair<Matrix, Vector> gen_linear(const LinearModelSpec& spec, int n, Rng& rng);

/// X rows iid N(0, I_d), rescaled onto the clip ball when enabled;
/// y_i ~ Bernoulli(sigmoid(theta*' x_i)) in {0,1}.
std::pair<Matrix, Vector> gen_logistic(const LogisticModelSpec& spec, int n,
                                       Rng& rng);

/// y = relu(X B*) w* + z, z iid N(0, sigma^2).
std::pair<Matrix, Vector> gen_relu(const ReluNetSpec& spec, int n, Rng& rng);

/// Causal-graph generator: zeta_iv ~ N(0,I), z ~ N(0,sigma^2),
/// e ~ N(0,I) (source) or N(0, sigma_t I) (target), zeta_e = sign(z) e,
/// x = S_iv zeta_iv + S_e zeta_e, y = theta*' x + z.
std::pair<Matrix, Vector> gen_domain(const DomainSpec& spec, Domain which,
                                     int n, Rng& rng);

/// One sweep cell of a preset (the grid layer over the base constants).
struct PresetCell {
  augment::AugmentationSpec aug;
  int d_aug = 0;
  nlohmann::json params;  // grid coordinates, e.g. {"d_c1": 5, "d_e1": 10}
};

/// Named experiment configurations with the constants the experiments
/// are defined with. Randomized quantities (theta*, map directions) are
/// drawn per run via the materialize_* helpers, seed-controlled.
struct Preset {
  std::string name;
  int d = 0;
  int n = 0;
  double sigma = 0.0;
  int trials = 0;
  bool fixed_design = false;

  // example_4_1 / example_6 (linear models)
  int theta_support = 0;        // nonzero leading coords of theta*
  std::vector<PresetCell> cells;
  std::vector<double> lambda_grid;
  double jitter_std = 0.0;      // example_6; see jitter_std_alt
  double jitter_std_alt = 0.0;  // the competing variance-vs-std reading

  // example_4_2 (logistic)
  double c0 = 0.0;
  std::vector<int> alpha_grid;
  std::vector<int> d_aug_grid;
  int test_size = 0;

  // example_C1 (domain adaptation)
  int d_iv = 0;
  int d_e = 0;
  int alpha = 1;
  std::vector<double> sigma_t_grid;

  LinearModelSpec materialize_linear(Rng& rng) const;
  LogisticModelSpec materialize_logistic(Rng& rng) const;
  LinearModelSpec materialize_misspec(Rng& rng) const;  // theta_c in {-1,+1}^10
  DomainSpec materialize_domain(double sigma_t, Rng& rng) const;
  augment::AugmentationSpec materialize_linear_maps(const DomainSpec& spec,
                                                    Rng& rng) const;
};

/// Known names: example_4_1, example_4_2, example_6, example_C1.
Preset preset(const std::string& name);

// Small drawing helpers shared by generators and tests.
Matrix gaussian_matrix(Index rows, Index cols, Rng& rng);
Vector gaussian_vector(Index size, Rng& rng);
/// Orthonormal columns spanning a uniformly random subspace (QR of a
/// Gaussian draw with sign-fixed diagonal).
Matrix random_orthonormal(Index rows, Index cols, Rng& rng);

}  // namespace daclab::datagen
