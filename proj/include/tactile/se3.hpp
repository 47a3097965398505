#pragma once

/**
 * SE(3) / se(3) operators.
 *
 * Poses are rigid transforms X = [C r; 0 1] with C in SO(3). Tangent
 * coordinates ("twists") are 6-vectors ordered translation first:
 *
 *   xi = [rho; phi],   rho = xi(0..2) (mm),  phi = xi(3..5) (rad)
 *
 *   xi^  = [ phi^  rho ]      xi^curly = [ phi^  rho^ ]
 *          [ 0^T    0  ]                 [  0    phi^ ]
 *
 * exp/log are closed form (Rodrigues + V matrix). The left Jacobian and its
 * inverse are the second-order truncations of their series.
 */

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace tactile {

template <typename Scalar>
using Vector3T = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3T = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix4T = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vector6T = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar>
using Matrix6T = Eigen::Matrix<Scalar, 6, 6>;

using Vector6d = Vector6T<double>;
using Matrix6d = Matrix6T<double>;
using Twist = Vector6d;

/// Below this rotation angle exp/log switch to Taylor expansions.
inline constexpr double kSmallAngle = 1e-6;
/// log_map refuses rotation angles within this margin of pi.
inline constexpr double kLogPiMargin = 1e-6;
/// Rotation blocks are projected back onto SO(3) past this drift.
inline constexpr double kOrthoDriftLimit = 1e-8;
/// Tolerance for accepting user-supplied rotations and hat matrices.
inline constexpr double kStructureTolerance = 1e-9;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegPerRad = 180.0 / kPi;
inline constexpr double kRadPerDeg = kPi / 180.0;

/// Thrown by log_map when the rotation angle is too close to pi.
class NearSingularLog : public std::domain_error {
 public:
  explicit NearSingularLog(double angle)
      : std::domain_error("log_map: rotation angle " + std::to_string(angle) +
                          " rad is within the pi singularity margin"),
        angle_(angle) {}
  double angle() const { return angle_; }

 private:
  double angle_;
};

template <typename Derived>
Matrix3T<typename Derived::Scalar> skew(const Eigen::MatrixBase<Derived>& v) {
  using S = typename Derived::Scalar;
  Matrix3T<S> m;
  m << S(0), -v(2), v(1),  //
      v(2), S(0), -v(0),   //
      -v(1), v(0), S(0);
  return m;
}

template <typename Derived>
Vector3T<typename Derived::Scalar> unskew(const Eigen::MatrixBase<Derived>& m) {
  return {m(2, 1), m(0, 2), m(1, 0)};
}

template <typename Derived>
auto rho(const Eigen::MatrixBase<Derived>& xi) {
  return xi.template head<3>();
}

template <typename Derived>
auto phi(const Eigen::MatrixBase<Derived>& xi) {
  return xi.template tail<3>();
}

template <typename Scalar>
Vector6T<Scalar> make_twist(const Vector3T<Scalar>& rho_part, const Vector3T<Scalar>& phi_part) {
  Vector6T<Scalar> xi;
  xi << rho_part, phi_part;
  return xi;
}

/// Nearest rotation to `m` in the Frobenius sense (polar decomposition).
template <typename Scalar>
Matrix3T<Scalar> project_to_rotation(const Matrix3T<Scalar>& m) {
  Eigen::JacobiSVD<Matrix3T<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3T<Scalar> u = svd.matrixU();
  const Matrix3T<Scalar> v = svd.matrixV();
  if ((u * v.transpose()).determinant() < Scalar(0)) {
    u.col(2) *= Scalar(-1);
  }
  return u * v.transpose();
}

template <typename Scalar>
Scalar orthonormality_error(const Matrix3T<Scalar>& c) {
  return (c.transpose() * c - Matrix3T<Scalar>::Identity()).norm();
}

/// Rigid transform with an orthonormal rotation block (translation in mm).
template <typename Scalar>
class PoseT {
 public:
  using Matrix3 = Matrix3T<Scalar>;
  using Vector3 = Vector3T<Scalar>;
  using Matrix4 = Matrix4T<Scalar>;

  PoseT() : rotation_(Matrix3::Identity()), translation_(Vector3::Zero()) {}

  /// Throws std::invalid_argument unless `rotation` is a proper rotation.
  PoseT(const Matrix3& rotation, const Vector3& translation)
      : rotation_(rotation), translation_(translation) {
    if (!(orthonormality_error(rotation_) < Scalar(kStructureTolerance)) ||
        !(std::abs(rotation_.determinant() - Scalar(1)) < Scalar(kStructureTolerance))) {
      throw std::invalid_argument("PoseT: rotation block is not in SO(3)");
    }
  }

  static PoseT identity() { return PoseT(); }
  static PoseT from_translation(const Vector3& r) { return unchecked(Matrix3::Identity(), r); }
  static PoseT from_rotation(const Matrix3& c) { return PoseT(c, Vector3::Zero()); }

  /// Validates the homogeneous structure (bottom row [0 0 0 1]) and the rotation.
  static PoseT from_matrix(const Matrix4& m) {
    const Eigen::Matrix<Scalar, 1, 4> expected(0, 0, 0, 1);
    if (!((m.template bottomRows<1>() - expected).norm() < Scalar(kStructureTolerance))) {
      throw std::invalid_argument("PoseT::from_matrix: bottom row must be [0 0 0 1]");
    }
    return PoseT(m.template topLeftCorner<3, 3>(), m.template topRightCorner<3, 1>());
  }

  /// Skips validation; callers guarantee `c` is a rotation.
  static PoseT unchecked(const Matrix3& c, const Vector3& r) {
    PoseT p;
    p.rotation_ = c;
    p.translation_ = r;
    return p;
  }

  const Matrix3& rotation() const { return rotation_; }
  const Vector3& translation() const { return translation_; }

  Matrix4 matrix() const {
    Matrix4 m = Matrix4::Identity();
    m.template topLeftCorner<3, 3>() = rotation_;
    m.template topRightCorner<3, 1>() = translation_;
    return m;
  }

  PoseT inverse() const {
    const Matrix3 ct = rotation_.transpose();
    return unchecked(ct, -(ct * translation_));
  }

  /// Composition; the rotation block is re-projected onto SO(3) once drift
  /// exceeds kOrthoDriftLimit.
  PoseT operator*(const PoseT& other) const {
    Matrix3 c = rotation_ * other.rotation_;
    if (orthonormality_error(c) > Scalar(kOrthoDriftLimit)) {
      c = project_to_rotation(c);
    }
    return unchecked(c, rotation_ * other.translation_ + translation_);
  }

  Vector3 operator*(const Vector3& point) const { return rotation_ * point + translation_; }

  PoseT normalized() const { return unchecked(project_to_rotation(rotation_), translation_); }

  bool is_approx(const PoseT& other, Scalar tol) const {
    return (matrix() - other.matrix()).norm() < tol;
  }

  template <typename Other>
  PoseT<Other> cast() const {
    return PoseT<Other>::unchecked(rotation_.template cast<Other>(),
                                   translation_.template cast<Other>());
  }

 private:
  Matrix3 rotation_;
  Vector3 translation_;
};

using Pose = PoseT<double>;

template <typename Scalar>
Matrix4T<Scalar> hat(const Vector6T<Scalar>& xi) {
  Matrix4T<Scalar> m = Matrix4T<Scalar>::Zero();
  m.template topLeftCorner<3, 3>() = skew(phi(xi));
  m.template topRightCorner<3, 1>() = rho(xi);
  return m;
}

/// Inverse of hat. Throws std::invalid_argument when `m` lacks hat structure.
template <typename Scalar>
Vector6T<Scalar> vee(const Matrix4T<Scalar>& m) {
  const Matrix3T<Scalar> block = m.template topLeftCorner<3, 3>();
  if (!((block + block.transpose()).norm() < Scalar(kStructureTolerance))) {
    throw std::invalid_argument("vee: rotation block is not skew-symmetric");
  }
  if (!(m.template bottomRows<1>().norm() < Scalar(kStructureTolerance))) {
    throw std::invalid_argument("vee: bottom row must be zero");
  }
  return make_twist<Scalar>(m.template topRightCorner<3, 1>(), unskew(block));
}

namespace detail {

/// Below this angle the cancelling coefficients use their series.
inline constexpr double kSeriesAngle = 1e-2;

// Coefficients of exp on SO(3) and the V matrix:
//   C = I + a K + b K^2,  V = I + b K + c K^2,  K = phi^
template <typename Scalar>
void exp_coefficients(Scalar theta, Scalar& a, Scalar& b, Scalar& c) {
  const Scalar t2 = theta * theta;
  if (theta < Scalar(kSmallAngle)) {
    a = Scalar(1) - t2 / Scalar(6);
    b = Scalar(0.5) - t2 / Scalar(24);
    c = Scalar(1) / Scalar(6) - t2 / Scalar(120);
    return;
  }
  const Scalar half_sin = std::sin(theta / Scalar(2));
  a = std::sin(theta) / theta;
  b = Scalar(2) * half_sin * half_sin / t2;
  if (theta < Scalar(kSeriesAngle)) {
    // (theta - sin theta) / theta^3 cancels badly for small theta
    c = Scalar(1) / Scalar(6) - t2 / Scalar(120) + t2 * t2 / Scalar(5040) -
        t2 * t2 * t2 / Scalar(362880);
  } else {
    c = (theta - std::sin(theta)) / (t2 * theta);
  }
}

// Coefficient d in V^-1 = I - K/2 + d K^2.
template <typename Scalar>
Scalar v_inverse_coefficient(Scalar theta) {
  const Scalar t2 = theta * theta;
  if (theta < Scalar(kSeriesAngle)) {
    return Scalar(1) / Scalar(12) + t2 / Scalar(720) + t2 * t2 / Scalar(30240) +
           t2 * t2 * t2 / Scalar(1209600);
  }
  const Scalar half = theta / Scalar(2);
  return (Scalar(1) - half * std::cos(half) / std::sin(half)) / t2;
}

}  // namespace detail

template <typename Scalar>
PoseT<Scalar> exp_map(const Vector6T<Scalar>& xi) {
  const Vector3T<Scalar> w = phi(xi);
  const Scalar theta = w.norm();
  const Matrix3T<Scalar> k = skew(w);
  const Matrix3T<Scalar> k2 = k * k;
  Scalar a, b, c;
  detail::exp_coefficients(theta, a, b, c);
  const Matrix3T<Scalar> eye = Matrix3T<Scalar>::Identity();
  const Matrix3T<Scalar> rot = eye + a * k + b * k2;
  const Matrix3T<Scalar> v = eye + b * k + c * k2;
  return PoseT<Scalar>::unchecked(rot, v * rho(xi));
}

/// Rotation angle of `c` in [0, pi], computed with atan2 for accuracy at
/// both ends of the range.
template <typename Scalar>
Scalar rotation_angle(const Matrix3T<Scalar>& c) {
  const Scalar sin_part = Scalar(0.5) * unskew(c - c.transpose()).norm();
  const Scalar cos_part = Scalar(0.5) * (c.trace() - Scalar(1));
  return std::atan2(sin_part, cos_part);
}

/// Throws NearSingularLog when the rotation angle is >= pi - kLogPiMargin.
template <typename Scalar>
Vector6T<Scalar> log_map(const PoseT<Scalar>& x) {
  const Matrix3T<Scalar>& c = x.rotation();
  const Scalar theta = rotation_angle(c);
  if (theta >= Scalar(kPi - kLogPiMargin)) {
    throw NearSingularLog(double(theta));
  }
  const Vector3T<Scalar> axis_part = unskew(c - c.transpose());  // 2 sin(theta) * axis
  Vector3T<Scalar> w;
  if (theta < Scalar(kSmallAngle)) {
    w = Scalar(0.5) * (Scalar(1) + theta * theta / Scalar(6)) * axis_part;
  } else {
    w = (theta / (Scalar(2) * std::sin(theta))) * axis_part;
  }
  const Matrix3T<Scalar> k = skew(w);
  const Matrix3T<Scalar> v_inv = Matrix3T<Scalar>::Identity() - Scalar(0.5) * k +
                                 detail::v_inverse_coefficient(theta) * (k * k);
  return make_twist<Scalar>(v_inv * x.translation(), w);
}

/// Ad(X) = [C  r^C; 0  C]
template <typename Scalar>
Matrix6T<Scalar> adjoint(const PoseT<Scalar>& x) {
  Matrix6T<Scalar> ad = Matrix6T<Scalar>::Zero();
  ad.template topLeftCorner<3, 3>() = x.rotation();
  ad.template bottomRightCorner<3, 3>() = x.rotation();
  ad.template topRightCorner<3, 3>() = skew(x.translation()) * x.rotation();
  return ad;
}

/// ad(xi^) = [phi^  rho^; 0  phi^]
template <typename Scalar>
Matrix6T<Scalar> ad_small(const Vector6T<Scalar>& xi) {
  Matrix6T<Scalar> m = Matrix6T<Scalar>::Zero();
  const Matrix3T<Scalar> k = skew(phi(xi));
  m.template topLeftCorner<3, 3>() = k;
  m.template bottomRightCorner<3, 3>() = k;
  m.template topRightCorner<3, 3>() = skew(rho(xi));
  return m;
}

/// J(xi) ~= I + ad/2 + ad^2/6
template <typename Scalar>
Matrix6T<Scalar> left_jacobian(const Vector6T<Scalar>& xi) {
  const Matrix6T<Scalar> a = ad_small(xi);
  return Matrix6T<Scalar>::Identity() + Scalar(0.5) * a + (a * a) / Scalar(6);
}

/// J(xi)^-1 ~= I - ad/2 + ad^2/12 (Bernoulli series B0, B1, B2).
template <typename Scalar>
Matrix6T<Scalar> inv_left_jacobian(const Vector6T<Scalar>& xi) {
  const Matrix6T<Scalar> a = ad_small(xi);
  return Matrix6T<Scalar>::Identity() - Scalar(0.5) * a + (a * a) / Scalar(12);
}

enum class SmallArgument { first, second };

/// First-order BCH: log(exp(t1^) exp(t2^))v with one argument small.
template <typename Scalar>
Vector6T<Scalar> bch_compose(const Vector6T<Scalar>& t1, const Vector6T<Scalar>& t2,
                             SmallArgument which_small) {
  if (which_small == SmallArgument::first) {
    return inv_left_jacobian(t2) * t1 + t2;
  }
  return t1 + inv_left_jacobian<Scalar>(-t1) * t2;
}

// Extrinsic xyz Euler angles: C = Rz(gamma) Ry(beta) Rx(alpha).

template <typename Scalar>
Matrix3T<Scalar> rotation_from_euler_xyz(Scalar alpha, Scalar beta, Scalar gamma) {
  using AA = Eigen::AngleAxis<Scalar>;
  return (AA(gamma, Vector3T<Scalar>::UnitZ()) * AA(beta, Vector3T<Scalar>::UnitY()) *
          AA(alpha, Vector3T<Scalar>::UnitX()))
      .toRotationMatrix();
}

/// Returns (alpha, beta, gamma) in rad with beta in [-pi/2, pi/2].
template <typename Scalar>
Vector3T<Scalar> euler_xyz_from_rotation(const Matrix3T<Scalar>& c) {
  const Scalar beta = std::atan2(-c(2, 0), std::hypot(c(0, 0), c(1, 0)));
  const Scalar alpha = std::atan2(c(2, 1), c(2, 2));
  const Scalar gamma = std::atan2(c(1, 0), c(0, 0));
  return {alpha, beta, gamma};
}

/// Pose from (x, y, z [mm], alpha, beta, gamma [deg]), extrinsic xyz.
inline Pose pose_from_euler6_deg(const Vector6d& v) {
  return Pose::unchecked(
      rotation_from_euler_xyz(v(3) * kRadPerDeg, v(4) * kRadPerDeg, v(5) * kRadPerDeg),
      v.head<3>());
}

inline Vector6d euler6_deg_from_pose(const Pose& p) {
  Vector6d v;
  v << p.translation(), euler_xyz_from_rotation(p.rotation()) * kDegPerRad;
  return v;
}

/// Twist with rotational part scaled rad -> deg (for reporting and gains).
inline Vector6d twist_rad_to_deg(const Vector6d& xi) {
  Vector6d out = xi;
  out.tail<3>() *= kDegPerRad;
  return out;
}

inline Vector6d twist_deg_to_rad(const Vector6d& xi) {
  Vector6d out = xi;
  out.tail<3>() *= kRadPerDeg;
  return out;
}

}  // namespace tactile
