#pragma once

/**
 * Surface contact pose and shear, training-range samplers, a stochastic
 * stand-in for the pose-and-shear network, and the network's loss/activation
 * formulas as plain numerics.
 *
 * Feature frame {f}: z along the surface normal pointing into the surface,
 * origin where the sensor frame sits at first touch. The sensor pose in {f}
 * is X_fs = X_par X_perp, with
 *   X_perp = Trans(0, 0, z) Rot(alpha, beta)    normal contact
 *   X_par  = Trans(x, y, 0) Rz(gamma)           post-contact shear
 * which collapses to the extrinsic-xyz Euler pose (x, y, z, alpha, beta, gamma).
 */

#include <cmath>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tactile/uncertainty.hpp"

namespace tactile {

/// x, y, z in mm; alpha, beta, gamma in deg.
struct ContactPose {
  double x = 0, y = 0, z = 0;
  double alpha = 0, beta = 0, gamma = 0;

  Vector6d as_vector() const {
    Vector6d v;
    v << x, y, z, alpha, beta, gamma;
    return v;
  }
  static ContactPose from_vector(const Vector6d& v) { return {v(0), v(1), v(2), v(3), v(4), v(5)}; }
  double shear_magnitude() const { return std::hypot(x, y); }
};

/// Normal-contact stage: rotate by (alpha, beta), then approach by z along the normal.
inline Pose normal_contact_pose(const ContactPose& c) {
  return Pose::unchecked(rotation_from_euler_xyz(c.alpha * kRadPerDeg, c.beta * kRadPerDeg, 0.0),
                         {0, 0, c.z});
}

/// Shear stage: tangential displacement (x, y) with rotation gamma about the normal.
inline Pose shear_pose(const ContactPose& c) {
  return Pose::unchecked(rotation_from_euler_xyz(0.0, 0.0, c.gamma * kRadPerDeg), {c.x, c.y, 0});
}

/// X_fs = X_par X_perp
inline Pose contact_to_pose(const ContactPose& c) { return shear_pose(c) * normal_contact_pose(c); }

inline ContactPose pose_to_contact(const Pose& x_fs) {
  return ContactPose::from_vector(euler6_deg_from_pose(x_fs));
}

/// Label in exponential coordinates: log(X_fs^-1) = xi_sf.
inline Twist pose_to_inverted_tangent(const ContactPose& c) {
  return log_map(contact_to_pose(c).inverse());
}

// --- sampling ------------------------------------------------------------

/// Uniform over a disk of radius r_max from two unit uniforms.
inline std::pair<double, double> disk_point(double r_max, double r_unit, double theta_unit) {
  const double r = r_max * std::sqrt(r_unit);
  const double theta = 2.0 * kPi * theta_unit;
  return {r * std::cos(theta), r * std::sin(theta)};
}

template <typename Rng>
std::pair<double, double> sample_disk(Rng& rng, double r_max) {
  if (!(r_max > 0)) throw std::invalid_argument("sample_disk: r_max must be positive");
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double r_unit = u01(rng);
  return disk_point(r_max, r_unit, u01(rng));
}

/// (alpha, beta) in deg for a direction uniform over a cap of half-angle
/// phi_max (deg) about the z-axis, from two unit uniforms.
inline std::pair<double, double> cap_angles(double phi_max_deg, double phi_unit, double theta_unit) {
  const double phi_max = phi_max_deg * kRadPerDeg;
  const double ph = std::acos(1.0 - (1.0 - std::cos(phi_max)) * phi_unit);
  const double theta = 2.0 * kPi * theta_unit;
  const double p = std::sin(ph) * std::cos(theta);
  const double q = std::sin(ph) * std::sin(theta);
  const double r = std::cos(ph);
  return {-std::asin(q) * kDegPerRad, -std::atan2(p, r) * kDegPerRad};
}

template <typename Rng>
std::pair<double, double> sample_spherical_cap(Rng& rng, double phi_max_deg) {
  if (!(phi_max_deg > 0 && phi_max_deg < 90)) {
    throw std::invalid_argument("sample_spherical_cap: phi_max must be in (0, 90) deg");
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double phi_unit = u01(rng);
  return cap_angles(phi_max_deg, phi_unit, u01(rng));
}

/// Sampling envelope of the training data.
struct DatasetRanges {
  double shear_radius = 5.0;  // mm
  double depth_min = 0.5;     // mm
  double depth_max = 6.0;     // mm
  double cap_angle = 25.0;    // deg
  double gamma_max = 5.0;     // deg
};

struct LabelledContact {
  ContactPose contact;
  Twist label;
};

template <typename Rng>
ContactPose sample_contact(Rng& rng, const DatasetRanges& ranges = {}) {
  ContactPose c;
  std::tie(c.x, c.y) = sample_disk(rng, ranges.shear_radius);
  c.z = std::uniform_real_distribution<double>(ranges.depth_min, ranges.depth_max)(rng);
  std::tie(c.alpha, c.beta) = sample_spherical_cap(rng, ranges.cap_angle);
  c.gamma = std::uniform_real_distribution<double>(-ranges.gamma_max, ranges.gamma_max)(rng);
  return c;
}

template <typename Rng>
std::vector<LabelledContact> generate_dataset(Rng& rng, std::size_t n, const DatasetRanges& ranges = {}) {
  if (n == 0) throw std::invalid_argument("generate_dataset: n must be positive");
  std::vector<LabelledContact> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ContactPose c = sample_contact(rng, ranges);
    out.push_back({c, pose_to_inverted_tangent(c)});
  }
  return out;
}

// --- observation surrogate -------------------------------------------------

/// Per-component observation noise. sigma: (mm, mm, mm, deg, deg, deg).
struct SurrogateNoiseProfile {
  Vector6d sigma = Vector6d::Ones();
  /// Tangential shear (mm) beyond which the shear components alias.
  double aliasing_slip_threshold = 4.0;
  /// Variance multiplier applied to the shear components when aliasing.
  double aliasing_variance_factor = 4.0;

  /// Twist components affected by aliasing: x, y translation and rotation about z.
  static constexpr int kShearComponents[3] = {0, 1, 5};

  /// Stdevs matching the network's reported mean absolute errors
  /// (0.426, 0.422, 0.123 mm; 0.45, 0.64, 1.16 deg) via sigma = MAE sqrt(pi/2).
  static SurrogateNoiseProfile calibrated() {
    SurrogateNoiseProfile p;
    p.sigma = target_mae() * std::sqrt(kPi / 2.0);
    return p;
  }
  static Vector6d target_mae() {
    Vector6d m;
    m << 0.426, 0.422, 0.123, 0.45, 0.64, 1.16;
    return m;
  }
  SurrogateNoiseProfile without_aliasing() const {
    SurrogateNoiseProfile p = *this;
    p.aliasing_variance_factor = 1.0;
    return p;
  }
  /// Stdevs in twist units (mm, rad) for a contact, aliasing included.
  Vector6d twist_sigma(const ContactPose& truth) const {
    Vector6d s = sigma;
    s.tail<3>() *= kRadPerDeg;
    if (truth.shear_magnitude() > aliasing_slip_threshold) {
      for (int k : kShearComponents) s(k) *= std::sqrt(aliasing_variance_factor);
    }
    return s;
  }
};

/// Noisy label with diagonal reported covariance, from six standard normals.
inline TangentGaussian surrogate_from_normals(const ContactPose& truth, const SurrogateNoiseProfile& profile,
                                              const Vector6d& normals) {
  const Vector6d s = profile.twist_sigma(truth);
  return {pose_to_inverted_tangent(truth) + s.cwiseProduct(normals),
          Matrix6d(s.cwiseProduct(s).asDiagonal())};
}

template <typename Rng>
TangentGaussian surrogate_observe(const ContactPose& truth, const SurrogateNoiseProfile& profile, Rng& rng) {
  std::normal_distribution<double> n01;
  Vector6d z;
  for (int k = 0; k < 6; ++k) z(k) = n01(rng);
  return surrogate_from_normals(truth, profile, z);
}

// --- loss and activation numerics ------------------------------------------

/// ln(1 + e^x), evaluated as x + ln(1 + e^-x) for large x.
inline double softplus(double x) {
  if (x > 30.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

inline double softbound(double x, double x_min, double x_max) {
  if (!(x_min < x_max)) throw std::invalid_argument("softbound: x_min must be below x_max");
  return x_min + softplus(x - x_min) - softplus(x - x_max);
}

/// Weights found to balance the translation (mm) and rotation (rad) outputs.
inline Vector6d default_loss_weights() {
  Vector6d a;
  a << 1, 1, 1, 100, 100, 100;
  return a;
}

/// (1/N) sum_i sum_j alpha_j (label_ij - pred_ij)^2
inline double weighted_mse(std::span<const Vector6d> preds, std::span<const Vector6d> labels,
                           const Vector6d& alpha) {
  if (preds.empty()) throw std::invalid_argument("weighted_mse: empty input");
  if (preds.size() != labels.size()) throw std::invalid_argument("weighted_mse: size mismatch");
  double sum = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    sum += alpha.dot((labels[i] - preds[i]).cwiseAbs2());
  }
  return sum / double(preds.size());
}

/// Mean negative log likelihood of labels under diagonal Gaussians given by
/// means and inverse stdevs, without the constant M ln(2 pi) / 2.
inline double gdn_nll(std::span<const Vector6d> mu, std::span<const Vector6d> inv_sigma,
                      std::span<const Vector6d> labels) {
  if (mu.empty()) throw std::invalid_argument("gdn_nll: empty input");
  if (mu.size() != inv_sigma.size() || mu.size() != labels.size()) {
    throw std::invalid_argument("gdn_nll: size mismatch");
  }
  double sum = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(inv_sigma[i].minCoeff() > 0)) throw std::invalid_argument("gdn_nll: inverse sigma must be positive");
    const Vector6d r = inv_sigma[i].cwiseProduct(labels[i] - mu[i]);
    sum += 0.5 * r.squaredNorm() - inv_sigma[i].array().log().sum();
  }
  return sum / double(mu.size());
}

}  // namespace tactile
