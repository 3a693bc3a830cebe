#include "daclab/augment.hpp"

#include <algorithm>
#include <stdexcept>

namespace daclab::augment {

namespace {

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows * cols) {
    throw std::invalid_argument("matrix json: data length != rows*cols");
  }
  Matrix m(rows, cols);
  Index k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index c = 0; c < cols; ++c) {
      m(i, c) = data[k++].get<double>();
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index c = 0; c < m.cols(); ++c) {
      data.push_back(m(i, c));
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

}  // namespace

std::string AugmentationSpec::kind_name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, IdentityCopies>) return "identity_copies";
        if constexpr (std::is_same_v<T, BlockScale>) return "block_scale";
        if constexpr (std::is_same_v<T, CoordinateResample>)
          return "coordinate_resample";
        if constexpr (std::is_same_v<T, GaussianJitter>) return "gaussian_jitter";
        if constexpr (std::is_same_v<T, LinearMaps>) return "linear_maps";
        if constexpr (std::is_same_v<T, EnvSignFlip>) return "env_sign_flip";
      },
      kind);
}

nlohmann::json AugmentationSpec::to_json() const {
  nlohmann::json params = nlohmann::json::object();
  std::visit(
      [&params](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, BlockScale>) {
          params = {{"d_c1", k.d_c1},
                    {"d_e1", k.d_e1},
                    {"scale_e1", k.scale_e1},
                    {"scale_e2", k.scale_e2}};
        } else if constexpr (std::is_same_v<T, CoordinateResample>) {
          params = {{"d_pert", k.d_pert}};
        } else if constexpr (std::is_same_v<T, GaussianJitter>) {
          params = {{"d_pert", k.d_pert}, {"noise_std", k.noise_std}};
        } else if constexpr (std::is_same_v<T, LinearMaps>) {
          nlohmann::json maps = nlohmann::json::array();
          for (const auto& m : k.maps) maps.push_back(matrix_to_json(m));
          params = {{"maps", std::move(maps)}};
        } else if constexpr (std::is_same_v<T, EnvSignFlip>) {
          params = {{"env_dim", k.env_dim}};
        }
      },
      kind);
  return {{"kind", kind_name()}, {"alpha", alpha}, {"params", params}};
}

AugmentationSpec AugmentationSpec::from_json(const nlohmann::json& j) {
  AugmentationSpec spec;
  spec.alpha = j.at("alpha").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params =
      j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (kind == "identity_copies") {
    spec.kind = IdentityCopies{};
  } else if (kind == "block_scale") {
    spec.kind = BlockScale{params.at("d_c1").get<int>(),
                           params.at("d_e1").get<int>(),
                           params.at("scale_e1").get<double>(),
                           params.at("scale_e2").get<double>()};
  } else if (kind == "coordinate_resample") {
    spec.kind = CoordinateResample{params.at("d_pert").get<int>()};
  } else if (kind == "gaussian_jitter") {
    spec.kind = GaussianJitter{params.at("d_pert").get<int>(),
                               params.at("noise_std").get<double>()};
  } else if (kind == "linear_maps") {
    LinearMaps lm;
    for (const auto& mj : params.at("maps")) {
      lm.maps.push_back(matrix_from_json(mj));
    }
    spec.kind = std::move(lm);
  } else if (kind == "env_sign_flip") {
    spec.kind = EnvSignFlip{params.at("env_dim").get<int>()};
  } else {
    throw std::invalid_argument("AugmentationSpec: unknown kind '" + kind + "'");
  }
  if (spec.alpha < 1) {
    throw std::invalid_argument("AugmentationSpec: alpha must be >= 1");
  }
  return spec;
}

AugmentedDataset build_augmented(const Matrix& x, const Vector& y,
                                 const AugmentationSpec& spec, Rng& rng) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (y.size() != n) {
    throw std::invalid_argument("build_augmented: x rows != y length");
  }
  if (spec.alpha < 1) {
    throw std::invalid_argument("build_augmented: alpha must be >= 1");
  }
  if (!matkit::all_finite(x)) {
    throw std::invalid_argument("build_augmented: non-finite x");
  }

  AugmentedDataset out;
  out.x = x;
  out.y = y;
  out.alpha = spec.alpha;
  out.x_aug_stacked.resize((1 + spec.alpha) * n, d);
  out.x_aug_stacked.topRows(n) = x;

  for (int j = 1; j <= spec.alpha; ++j) {
    auto block = out.x_aug_stacked.middleRows(j * n, n);
    std::visit(
        [&](const auto& k) {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, IdentityCopies>) {
            block = x;
          } else if constexpr (std::is_same_v<T, BlockScale>) {
            if (k.d_c1 < 0 || k.d_e1 < 0 || k.d_c1 + k.d_e1 > d) {
              throw std::invalid_argument("BlockScale: d_c1 + d_e1 > d");
            }
            block = x;
            block.middleCols(k.d_c1, k.d_e1) *= k.scale_e1;
            block.rightCols(d - k.d_c1 - k.d_e1) *= k.scale_e2;
          } else if constexpr (std::is_same_v<T, CoordinateResample>) {
            if (k.d_pert < 0 || k.d_pert > d) {
              throw std::invalid_argument("CoordinateResample: bad d_pert");
            }
            block = x;
            for (Index i = 0; i < n; ++i) {
              for (Index c = d - k.d_pert; c < d; ++c) {
                block(i, c) = rng.normal();
              }
            }
          } else if constexpr (std::is_same_v<T, GaussianJitter>) {
            if (k.d_pert < 0 || k.d_pert > d) {
              throw std::invalid_argument("GaussianJitter: bad d_pert");
            }
            block = x;
            for (Index i = 0; i < n; ++i) {
              for (Index c = d - k.d_pert; c < d; ++c) {
                block(i, c) += rng.normal(0.0, k.noise_std);
              }
            }
          } else if constexpr (std::is_same_v<T, LinearMaps>) {
            if (static_cast<int>(k.maps.size()) != spec.alpha) {
              throw std::invalid_argument("LinearMaps: maps.size() != alpha");
            }
            const Matrix& a = k.maps[j - 1];
            if (a.rows() != d || a.cols() != d) {
              throw std::invalid_argument("LinearMaps: map is not d x d");
            }
            block = x * a.transpose();
          } else if constexpr (std::is_same_v<T, EnvSignFlip>) {
            if (k.env_dim < 0 || k.env_dim > d) {
              throw std::invalid_argument("EnvSignFlip: bad env_dim");
            }
            block = x;
            block.rightCols(k.env_dim) *= -1.0;
          }
        },
        spec.kind);
  }

  out.delta.resize(out.x_aug_stacked.rows(), d);
  out.delta.topRows(n).setZero();
  for (int j = 1; j <= spec.alpha; ++j) {
    out.delta.middleRows(j * n, n) = out.x_aug_stacked.middleRows(j * n, n) - x;
  }
  return out;
}

Vector replicate_labels(const AugmentedDataset& aug) {
  const Index n = aug.n();
  Vector out((1 + aug.alpha) * n);
  for (int j = 0; j <= aug.alpha; ++j) {
    out.segment(j * n, n) = aug.y;
  }
  return out;
}

Index d_aug_of(const AugmentedDataset& aug) {
  return matkit::rank_tol(aug.delta, aug.tol);
}

QuantileResult d_aug_quantile(const AugmentationSpec& spec,
                              const std::function<Matrix(int, Rng&)>& sampler,
                              int n, double delta_prob, int trials, Rng& rng) {
  if (!(delta_prob > 0.0 && delta_prob < 1.0)) {
    throw std::invalid_argument("d_aug_quantile: delta_prob outside (0,1)");
  }
  if (trials < 100) {
    throw std::invalid_argument("d_aug_quantile: trials must be >= 100");
  }

  const std::uint64_t master = rng.next_u64();

  // Degenerate-sampler probe: a constant data source has no rank
  // distribution to take a quantile of.
  {
    Rng probe_a = Rng::substream(master, 0xa11ce);
    Rng probe_b = Rng::substream(master, 0xb0b);
    const Matrix xa = sampler(n, probe_a);
    const Matrix xb = sampler(n, probe_b);
    if (xa.rows() == xb.rows() && xa.cols() == xb.cols() && xa == xb) {
      return {0, true};
    }
  }

  int d = 0;
  std::vector<int> rank_count;
  for (int t = 0; t < trials; ++t) {
    Rng sub = Rng::substream(master, static_cast<std::uint64_t>(t));
    const Matrix x = sampler(n, sub);
    const Vector y = Vector::Zero(x.rows());
    const AugmentedDataset aug = build_augmented(x, y, spec, sub);
    const int r = static_cast<int>(d_aug_of(aug));
    d = static_cast<int>(x.cols());
    if (static_cast<int>(rank_count.size()) < d + 1) rank_count.resize(d + 1, 0);
    rank_count[std::min(r, d)] += 1;
  }

  // P[rank < k] for k = 0..d, scan from above for the largest feasible k.
  int below = trials;
  for (int k = d; k >= 0; --k) {
    below -= rank_count[k];  // now: #trials with rank < k
    if (static_cast<double>(below) / trials <= delta_prob) {
      return {k, false};
    }
  }
  return {0, false};
}

DPrimeResult d_prime(const AugmentedDataset& aug) {
  const Index n = aug.n();
  const Index d = aug.dim();
  const Index d_aug = d_aug_of(aug);
  if (matkit::rank_tol(aug.x_aug_stacked, aug.tol) != d) {
    throw std::invalid_argument(
        "d_prime: stacked augmented matrix is rank deficient");
  }

  const Matrix p_a =
      matkit::proj(aug.x_aug_stacked, matkit::Subspace::kColumnSpace, aug.tol).p;

  // S = { M~ X theta : Delta theta = 0 } realized as Col(M~ X Q) for an
  // orthonormal null-space basis Q of Delta.
  const Matrix q = matkit::null_space_basis(aug.delta, aug.tol);
  Matrix p_s = Matrix::Zero(p_a.rows(), p_a.cols());
  if (q.cols() > 0) {
    const Matrix xq = aug.x * q;
    Matrix s_mat((1 + aug.alpha) * n, q.cols());
    for (int j = 0; j <= aug.alpha; ++j) {
      s_mat.middleRows(j * n, n) = xq;
    }
    p_s = matkit::proj(s_mat, matkit::Subspace::kColumnSpace, aug.tol).p;
  }

  // S is a subspace of Col(A~), so G = P_A - P_S is itself an orthogonal
  // projector and tr(M~' G M~) = ||G M~||_F^2; the Frobenius form keeps
  // round-off from driving the unclamped value negative.
  const Matrix g = p_a - p_s;
  Matrix gm = Matrix::Zero(g.rows(), n);
  for (int k = 0; k <= aug.alpha; ++k) {
    gm += g.middleCols(k * n, n);
  }

  DPrimeResult out;
  out.d_aug = d_aug;
  out.raw = gm.squaredNorm() / (1.0 + aug.alpha);
  out.value = std::clamp(out.raw, 0.0, static_cast<double>(d_aug));
  return out;
}

}  // namespace daclab::augment
