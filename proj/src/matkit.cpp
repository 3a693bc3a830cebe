#include "daclab/matkit.hpp"

#include <cmath>
#include <stdexcept>

namespace daclab::matkit {

namespace {

void require_finite(const Matrix& a, const char* who) {
  if (!all_finite(a)) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

void require_positive_tol(double tol, const char* who) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": tol must be > 0");
  }
}

// Eigenvalues may dip slightly negative from round-off; anything above
// -1e-8 * ||A||_2 counts as PSD.
void require_symmetric_psd(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix not square");
  }
  require_finite(a, who);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument(std::string(who) + ": matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  if (es.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw std::invalid_argument(std::string(who) + ": matrix not PSD");
  }
}

}  // namespace

bool all_finite(const Matrix& a) { return a.allFinite(); }

Index rank_tol(const Matrix& a, double tol) {
  require_positive_tol(tol, "rank_tol");
  require_finite(a, "rank_tol");
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = smax > 0.0 ? tol * smax : tol;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++r;
  }
  return r;
}

Matrix pinv(const Matrix& a, double tol) {
  require_positive_tol(tol, "pinv");
  require_finite(a, "pinv");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = smax > 0.0 ? tol * smax : tol;
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix null_space_basis(const Matrix& a, double tol) {
  require_positive_tol(tol, "null_space_basis");
  require_finite(a, "null_space_basis");
  const Index d = a.cols();
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = smax > 0.0 ? tol * smax : tol;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++r;
  }
  return svd.matrixV().rightCols(d - r);
}

Projector proj(const Matrix& a, Subspace which, double tol) {
  require_positive_tol(tol, "proj");
  require_finite(a, "proj");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = smax > 0.0 ? tol * smax : tol;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++r;
  }

  Projector out;
  out.tol = tol;
  Matrix p;
  switch (which) {
    case Subspace::kRowSpace: {
      const Matrix vr = svd.matrixV().leftCols(r);
      p = vr * vr.transpose();
      out.rank = r;
      break;
    }
    case Subspace::kNullSpace: {
      const Matrix vn = svd.matrixV().rightCols(a.cols() - r);
      p = vn * vn.transpose();
      out.rank = a.cols() - r;
      break;
    }
    case Subspace::kColumnSpace: {
      const Matrix ur = svd.matrixU().leftCols(r);
      p = ur * ur.transpose();
      out.rank = r;
      break;
    }
  }
  out.p = 0.5 * (p + p.transpose());
  return out;
}

void validate_projector(const Projector& pr) {
  const Matrix& p = pr.p;
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("projector: not square");
  }
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("projector: not symmetric");
  }
  if ((p * p - p).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::invalid_argument("projector: not idempotent");
  }
  if (std::abs(p.trace() - static_cast<double>(pr.rank)) > 1e-6) {
    throw std::invalid_argument("projector: trace does not match rank");
  }
}

double seminorm_sq(const Vector& u, const Matrix& sigma) {
  if (sigma.rows() != u.size() || sigma.cols() != u.size()) {
    throw std::invalid_argument("seminorm_sq: dimension mismatch");
  }
  require_symmetric_psd(sigma, "seminorm_sq");
  const double v = u.dot(sigma * u);
  return v < 0.0 ? 0.0 : v;
}

double min_dominating_scalar(const Matrix& a, const Matrix& b, double tol) {
  require_positive_tol(tol, "min_dominating_scalar");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("min_dominating_scalar: size mismatch");
  }
  require_symmetric_psd(a, "min_dominating_scalar");
  require_symmetric_psd(b, "min_dominating_scalar");

  Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
  const Vector& lam = eb.eigenvalues();
  const double lmax = lam.cwiseAbs().maxCoeff();
  const double cutoff = lmax > 0.0 ? tol * lmax : tol;

  Matrix b_half_pinv = Matrix::Zero(b.rows(), b.cols());
  Matrix p_range = Matrix::Zero(b.rows(), b.cols());
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) {
      const Vector v = eb.eigenvectors().col(i);
      b_half_pinv += v * v.transpose() / std::sqrt(lam(i));
      p_range += v * v.transpose();
    }
  }

  // Range containment: a must vanish off Range(b), otherwise a <= c*b
  // fails for every finite c.
  const Matrix resid = a - p_range * a * p_range;
  const double a_scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  if (resid.cwiseAbs().maxCoeff() > std::sqrt(tol) * a_scale) {
    throw std::runtime_error(
        "min_dominating_scalar: Range(a) not contained in Range(b), "
        "no finite dominating scalar exists");
  }

  Matrix m = b_half_pinv * a * b_half_pinv;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> em(m, Eigen::EigenvaluesOnly);
  const double c = em.eigenvalues().maxCoeff();
  return c < 0.0 ? 0.0 : c;
}

}  // namespace daclab::matkit
