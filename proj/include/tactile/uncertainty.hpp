#pragma once

/**
 * Concentrated Gaussians on SE(3).
 *
 * A PoseBelief (mean, cov) describes X = exp(eps^) mean with eps ~ N(0, cov):
 * the perturbation is applied on the left and cov is expressed in the
 * translation-first tangent coordinates (mm^2, mm rad, rad^2 by block).
 */

#include <algorithm>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tactile/se3.hpp"

namespace tactile {

struct PoseBelief {
  Pose mean;
  Matrix6d cov = Matrix6d::Identity();
};

/// Gaussian over exponential coordinates at the identity (e.g. a model output).
struct TangentGaussian {
  Twist mu = Twist::Zero();
  Matrix6d cov = Matrix6d::Identity();
};

/// Raised when a covariance that must be inverted is (numerically) singular.
class SingularCovariance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Floor applied to eigenvalues before inverting.
inline constexpr double kEigenvalueFloor = 1e-12;

template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.transpose()) * 0.5;
}

inline double min_eigenvalue(const Matrix6d& m) {
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Matrix6d& m) {
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Inverse of a symmetric PSD matrix with eigenvalues clamped at kEigenvalueFloor.
inline Matrix6d spd_inverse(const Matrix6d& m) {
  Eigen::SelfAdjointEigenSolver<Matrix6d> es(symmetrize(m));
  const Vector6d inv_vals =
      es.eigenvalues().unaryExpr([](double v) { return 1.0 / std::max(v, kEigenvalueFloor); });
  return symmetrize(es.eigenvectors() * inv_vals.asDiagonal() * es.eigenvectors().transpose());
}

/// Maps a tangent-space Gaussian to a belief: mean = exp(mu), cov = J cov J^T.
inline PoseBelief belief_from_tangent(const TangentGaussian& g) {
  const Matrix6d jac = left_jacobian(g.mu);
  return {exp_map(g.mu), symmetrize(jac * g.cov * jac.transpose())};
}

/// Inverse of belief_from_tangent. The Jacobian is inverted exactly (not via
/// the truncated inverse series) so the two conversions round-trip.
inline TangentGaussian belief_to_tangent(const PoseBelief& b) {
  const Twist mu = log_map(b.mean);
  const Matrix6d jac_inv = left_jacobian(mu).inverse();
  return {mu, symmetrize(jac_inv * b.cov * jac_inv.transpose())};
}

/// Left-composes a belief with T = exp(phi^) T_mean, phi ~ N(0, noise_cov).
inline PoseBelief propagate(const PoseBelief& b, const Pose& t_mean, const Matrix6d& noise_cov) {
  const Matrix6d ad = adjoint(t_mean);
  return {t_mean * b.mean, symmetrize(ad * b.cov * ad.transpose() + noise_cov)};
}

struct FusionOptions {
  int iterations = 5;
  /// Early exit once the operating-point update norm drops below this.
  double tolerance = 1e-10;
};

struct FusionResult {
  PoseBelief belief;
  /// Number of operating-point updates performed.
  int iterations = 0;
  /// False when the update norm never fell below tolerance (advisory only).
  bool converged = false;
  double final_update_norm = 0.0;
};

/**
 * Normalised product of two SE(3) beliefs by fixed-point iteration.
 *
 * The operating point starts at b1.mean. Each pass linearises both factors
 * about the operating point,
 *
 *   xi_i = log(X X_i^-1),  G_i = J(xi_i)^-1  (second-order series)
 *   Sigma = (G_1^T S_1^-1 G_1 + G_2^T S_2^-1 G_2)^-1
 *   mu    = -Sigma (G_1^T S_1^-1 xi_1 + G_2^T S_2^-1 xi_2)
 *
 * and moves it: X <- exp(mu^) X. Returns (X, Sigma) from the last pass.
 * Throws SingularCovariance if either input covariance is singular.
 */
inline FusionResult fuse(const PoseBelief& b1, const PoseBelief& b2, const FusionOptions& opts = {}) {
  if (!(min_eigenvalue(b1.cov) > kEigenvalueFloor) || !(min_eigenvalue(b2.cov) > kEigenvalueFloor)) {
    throw SingularCovariance("fuse: input covariance is singular");
  }
  const Matrix6d info1 = spd_inverse(b1.cov);
  const Matrix6d info2 = spd_inverse(b2.cov);
  const Pose inv1 = b1.mean.inverse();
  const Pose inv2 = b2.mean.inverse();

  // log(X X_i^-1) is exactly zero when the operating point is the factor mean
  const auto offset = [](const Pose& op, const Pose& mean, const Pose& mean_inv) -> Twist {
    if (op.matrix() == mean.matrix()) {
      return Twist::Zero();
    }
    return log_map(op * mean_inv);
  };

  FusionResult result;
  Pose op = b1.mean;
  Matrix6d sigma = b1.cov;
  for (int it = 0; it < opts.iterations; ++it) {
    const Twist xi1 = offset(op, b1.mean, inv1);
    const Twist xi2 = offset(op, b2.mean, inv2);
    const Matrix6d g1 = inv_left_jacobian(xi1);
    const Matrix6d g2 = inv_left_jacobian(xi2);
    const Matrix6d w1 = g1.transpose() * info1;
    const Matrix6d w2 = g2.transpose() * info2;
    sigma = spd_inverse(w1 * g1 + w2 * g2);
    const Twist mu = -sigma * (w1 * xi1 + w2 * xi2);
    op = exp_map(mu) * op;
    result.iterations = it + 1;
    result.final_update_norm = mu.norm();
    if (result.final_update_norm < opts.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.belief = {op, sigma};
  return result;
}

}  // namespace tactile
