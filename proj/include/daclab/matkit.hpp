#pragma once

#include <Eigen/Dense>

namespace daclab::matkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative singular-value cutoff used by every rank-revealing routine
/// unless a caller overrides it.
inline constexpr double kDefaultRankTol = 1e-9;

/// Symmetric idempotent matrix with rank metadata.
struct Projector {
  Matrix p;
  Index rank = 0;
  double tol = kDefaultRankTol;
};

enum class Subspace { kRowSpace, kNullSpace, kColumnSpace };

bool all_finite(const Matrix& a);

/// Numerical rank: number of singular values > tol * sigma_max, with an
/// absolute cutoff of tol when sigma_max == 0.
Index rank_tol(const Matrix& a, double tol = kDefaultRankTol);

/// Moore-Penrose pseudoinverse via SVD with relative cutoff tol.
Matrix pinv(const Matrix& a, double tol = kDefaultRankTol);

/// Orthonormal basis of the null space of a (d x (d - rank)); empty
/// matrix with zero columns when a has full column rank.
Matrix null_space_basis(const Matrix& a, double tol = kDefaultRankTol);

/// Orthogonal projector onto the requested subspace of a:
/// row space -> A+A, null space -> I - A+A, column space -> AA+.
Projector proj(const Matrix& a, Subspace which, double tol = kDefaultRankTol);

/// Throws if the projector invariants (symmetry, idempotence,
/// trace == rank) do not hold.
void validate_projector(const Projector& p);

/// u' * sigma * u for symmetric PSD sigma; negative round-off is clamped
/// to zero so the result is always usable as a squared seminorm.
double seminorm_sq(const Vector& u, const Matrix& sigma);

/// Smallest c >= 0 with a <= c * b in the PSD order, computed as the
/// maximal eigenvalue of B^{+/2} A B^{+/2} on Range(b). Requires
/// Range(a) being contained in Range(b); otherwise no finite c exists and an
/// exception is thrown.
double min_dominating_scalar(const Matrix& a, const Matrix& b,
                             double tol = kDefaultRankTol);

}  // namespace daclab::matkit
