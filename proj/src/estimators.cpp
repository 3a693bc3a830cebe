#include "daclab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "daclab/rng.hpp"

namespace daclab::estimators {

namespace {

// The soft solver sees Sigma_X + lambda Sigma_Delta with lambda up to
// 1e10, so the spread between the constraint block and the data block
// spans ~10 decades. A much tighter relative cutoff than the default
// keeps the data-block directions alive without admitting noise.
constexpr double kSoftSolveTol = 1e-13;

double stable_softplus(double z) {
  // log(1 + e^z) without overflow.
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

Vector project_l2_ball(Vector v, double radius) {
  const double nrm = v.norm();
  if (nrm > radius) v *= radius / nrm;
  return v;
}

Matrix normalize_columns(Matrix b, Rng& rng, const Matrix* subspace_proj) {
  for (Index k = 0; k < b.cols(); ++k) {
    double nrm = b.col(k).norm();
    while (nrm < 1e-12) {
      // Collapsed column: redraw inside the feasible subspace.
      Vector fresh(b.rows());
      for (Index i = 0; i < fresh.size(); ++i) fresh(i) = rng.normal();
      if (subspace_proj != nullptr) fresh = (*subspace_proj) * fresh;
      b.col(k) = fresh;
      nrm = b.col(k).norm();
    }
    b.col(k) /= nrm;
  }
  return b;
}

}  // namespace

LinearEstimate ols(const Matrix& x, const Vector& y) {
  LinearEstimate est;
  est.method = LinearMethod::kOls;
  est.theta_hat = matkit::pinv(x) * y;
  est.diagnostics["residual_norm"] = (x * est.theta_hat - y).norm();
  est.diagnostics["effective_rank"] = static_cast<double>(matkit::rank_tol(x));
  return est;
}

LinearEstimate da_erm_ls(const AugmentedDataset& aug) {
  LinearEstimate est;
  est.method = LinearMethod::kDaErm;
  const Vector labels = replicate_labels(aug);
  est.theta_hat = matkit::pinv(aug.x_aug_stacked, aug.tol) * labels;
  est.diagnostics["residual_norm"] =
      (aug.x_aug_stacked * est.theta_hat - labels).norm();
  est.diagnostics["effective_rank"] =
      static_cast<double>(matkit::rank_tol(aug.x_aug_stacked, aug.tol));
  return est;
}

LinearEstimate dac_hard_ls(const AugmentedDataset& aug) {
  LinearEstimate est;
  est.method = LinearMethod::kDacHard;
  const Matrix q = matkit::null_space_basis(aug.delta, aug.tol);
  if (q.cols() == 0) {
    est.theta_hat = Vector::Zero(aug.dim());
    est.diagnostics["degenerate_constraint"] = 1.0;
    est.diagnostics["residual_norm"] = aug.y.norm();
    est.diagnostics["effective_rank"] = 0.0;
    return est;
  }
  const Matrix xq = aug.x * q;
  est.theta_hat = q * (matkit::pinv(xq, aug.tol) * aug.y);
  est.diagnostics["residual_norm"] = (aug.x * est.theta_hat - aug.y).norm();
  est.diagnostics["effective_rank"] =
      static_cast<double>(matkit::rank_tol(xq, aug.tol));
  est.diagnostics["constraint_residual"] =
      (aug.delta * est.theta_hat).cwiseAbs().maxCoeff();
  return est;
}

LinearEstimate dac_soft_ls(const AugmentedDataset& aug, double lambda) {
  if (lambda < 0) {
    throw std::invalid_argument("dac_soft_ls: lambda must be >= 0");
  }
  const Index n = aug.n();
  const Matrix sigma_x = aug.x.transpose() * aug.x / static_cast<double>(n);
  const Matrix sigma_d = aug.delta.transpose() * aug.delta /
                         static_cast<double>((1 + aug.alpha) * n);
  const Vector rhs = aug.x.transpose() * aug.y / static_cast<double>(n);

  LinearEstimate est;
  est.method = LinearMethod::kDacSoft;
  est.lambda = lambda;
  est.theta_hat = matkit::pinv(sigma_x + lambda * sigma_d, kSoftSolveTol) * rhs;
  est.diagnostics["residual_norm"] = (aug.x * est.theta_hat - aug.y).norm();
  est.diagnostics["penalty"] =
      (aug.delta * est.theta_hat).squaredNorm() /
      static_cast<double>((1 + aug.alpha) * n);
  return est;
}

double logistic_loss(const Matrix& x, const Vector& y, const Vector& theta) {
  const Vector s = x * theta;
  double loss = 0.0;
  for (Index i = 0; i < s.size(); ++i) {
    loss += stable_softplus(s(i)) - y(i) * s(i);
  }
  return loss / static_cast<double>(s.size());
}

Vector logistic_grad(const Matrix& x, const Vector& y, const Vector& theta) {
  const Vector s = x * theta;
  Vector r(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    r(i) = 1.0 / (1.0 + std::exp(-s(i))) - y(i);
  }
  return x.transpose() * r / static_cast<double>(s.size());
}

LinearEstimate logistic_fit(const AugmentedDataset& aug, LogisticMode mode,
                            double c0, const OptimizerConfig& opt) {
  if (!(c0 > 0)) throw std::invalid_argument("logistic_fit: c0 must be > 0");

  Matrix features;
  Vector labels;
  Matrix q;  // null-space basis for kDacHard
  if (mode == LogisticMode::kDacHard) {
    // Consistency is equivalent to Delta theta = 0; train on the N
    // original labeled samples in theta = Q beta coordinates. Q has
    // orthonormal columns, so the c0 ball carries over to beta.
    q = matkit::null_space_basis(aug.delta, aug.tol);
    features = aug.x * q;
    labels = aug.y;
  } else {
    features = aug.x_aug_stacked;
    labels = replicate_labels(aug);
  }

  LinearEstimate est;
  est.method = mode == LogisticMode::kDacHard ? LinearMethod::kDacHard
                                              : LinearMethod::kDaErm;
  Vector beta = Vector::Zero(features.cols());
  bool converged = features.cols() == 0;
  est.loss_trace.reserve(64);
  est.loss_trace.push_back(logistic_loss(features, labels, beta));
  Vector best = beta;
  double best_loss = est.loss_trace.back();
  int iters = 0;
  for (; iters < opt.max_iters && !converged; ++iters) {
    const Vector g = logistic_grad(features, labels, beta);
    const Vector next = project_l2_ball(beta - opt.step_size * g, c0);
    const double step_norm = (next - beta).norm() / opt.step_size;
    beta = next;
    est.loss_trace.push_back(logistic_loss(features, labels, beta));
    if (est.loss_trace.back() < best_loss) {
      best_loss = est.loss_trace.back();
      best = beta;
    }
    if (step_norm <= opt.grad_tol) {
      converged = true;
    }
  }
  // On non-convergence the best recorded iterate is the answer.
  if (!converged) beta = best;

  est.theta_hat = mode == LogisticMode::kDacHard
                      ? Vector(q * beta)
                      : beta;
  est.diagnostics["converged"] = converged ? 1.0 : 0.0;
  est.diagnostics["iters"] = static_cast<double>(iters);
  est.diagnostics["loss"] = converged ? est.loss_trace.back() : best_loss;
  if (mode == LogisticMode::kDacHard) {
    est.diagnostics["constraint_residual"] =
        aug.delta.rows() > 0 ? (aug.delta * est.theta_hat).cwiseAbs().maxCoeff()
                             : 0.0;
  }
  return est;
}

Vector project_l1_ball(const Vector& w, double radius) {
  if (radius < 0) throw std::invalid_argument("project_l1_ball: radius < 0");
  if (w.cwiseAbs().sum() <= radius) return w;
  // Duchi et al. simplex projection: find the soft threshold tau from the
  // sorted magnitudes.
  std::vector<double> mags(w.size());
  for (Index i = 0; i < w.size(); ++i) mags[i] = std::abs(w(i));
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (Index k = 0; k < static_cast<Index>(mags.size()); ++k) {
    cumsum += mags[k];
    const double cand = (cumsum - radius) / static_cast<double>(k + 1);
    if (mags[k] > cand) tau = cand;
  }
  Vector out(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    const double m = std::abs(w(i)) - tau;
    out(i) = m > 0 ? (w(i) > 0 ? m : -m) : 0.0;
  }
  return out;
}

Vector relu_predict(const ReluEstimate& est, const Matrix& x) {
  return (x * est.b_hat).cwiseMax(0.0) * est.w_hat;
}

ReluEstimate relu_fit(const AugmentedDataset& aug, ReluMethod mode, int width,
                      double c_w, const OptimizerConfig& opt) {
  if (width < 1) throw std::invalid_argument("relu_fit: width must be >= 1");
  if (!(c_w > 0)) throw std::invalid_argument("relu_fit: c_w must be > 0");

  const Index d = aug.dim();
  Matrix features;
  Vector labels;
  Matrix p_perp;  // null-space projector for kDac
  const Matrix* constraint = nullptr;
  if (mode == ReluMethod::kDac) {
    p_perp = matkit::proj(aug.delta, matkit::Subspace::kNullSpace, aug.tol).p;
    constraint = &p_perp;
    features = aug.x;
    labels = aug.y;
  } else {
    features = aug.x_aug_stacked;
    labels = replicate_labels(aug);
  }
  const double m = static_cast<double>(features.rows());

  Rng rng(splitmix64(opt.seed ^ 0x2e1uLL));
  Matrix b(d, width);
  for (Index i = 0; i < d; ++i) {
    for (Index k = 0; k < width; ++k) b(i, k) = rng.normal();
  }
  if (constraint != nullptr) b = (*constraint) * b;
  b = normalize_columns(std::move(b), rng, constraint);
  Vector w = Vector::Zero(width);

  const auto loss_of = [&](const Matrix& bm, const Vector& wv) {
    const Vector r = (features * bm).cwiseMax(0.0) * wv - labels;
    return r.squaredNorm() / (2.0 * m);
  };

  bool converged = false;
  double loss = loss_of(b, w);
  Matrix best_b = b;
  Vector best_w = w;
  double best_loss = loss;
  int iters = 0;
  for (; iters < opt.max_iters && !converged; ++iters) {
    const Matrix pre = features * b;          // m x q
    const Matrix hid = pre.cwiseMax(0.0);     // relu
    const Vector resid = hid * w - labels;    // m

    const Vector grad_w = hid.transpose() * resid / m;
    Matrix grad_b =
        features.transpose() *
        ((pre.array() > 0.0).cast<double>() * (resid * w.transpose()).array())
            .matrix() /
        m;

    const Vector w_next = project_l1_ball(w - opt.step_size * grad_w, c_w);
    Matrix b_next = b - opt.step_size * grad_b;
    if (constraint != nullptr) b_next = (*constraint) * b_next;
    b_next = normalize_columns(std::move(b_next), rng, constraint);

    const double move =
        std::sqrt((w_next - w).squaredNorm() + (b_next - b).squaredNorm()) /
        opt.step_size;
    w = w_next;
    b = std::move(b_next);
    loss = loss_of(b, w);
    if (loss < best_loss) {
      best_loss = loss;
      best_b = b;
      best_w = w;
    }
    if (move <= opt.grad_tol) converged = true;
  }

  ReluEstimate est;
  // The landscape is nonconvex; report the best iterate seen when the
  // loop ran out of budget.
  est.b_hat = converged ? std::move(b) : std::move(best_b);
  est.w_hat = converged ? std::move(w) : std::move(best_w);
  est.method = mode;
  est.train_loss = converged ? loss : best_loss;
  est.converged = converged;
  return est;
}

double excess_risk_fixed_design(const Vector& theta, const Vector& theta_star,
                                const AugmentedDataset& aug, Design design) {
  if (theta.size() != theta_star.size() || theta.size() != aug.dim()) {
    throw std::invalid_argument("excess_risk_fixed_design: dimension mismatch");
  }
  const Vector diff = theta - theta_star;
  if (design == Design::kAugmented) {
    return (aug.x_aug_stacked * diff).squaredNorm() /
           static_cast<double>((1 + aug.alpha) * aug.n());
  }
  return (aug.x * diff).squaredNorm() / static_cast<double>(aug.n());
}

}  // namespace daclab::estimators
