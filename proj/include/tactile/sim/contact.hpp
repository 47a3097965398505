#pragma once

// Ground-truth contact between the spherical sensor tip and a surface.
//
// The sensor frame origin is the tip-sphere centre and its z-axis points
// into the surface. Depth is the sphere's penetration; (alpha, beta) are the
// sensor tilts relative to the local feature frame; (x, y, gamma) is the
// slip-free tangential motion accumulated since contact onset, saturating at
// the slip limits (the sensor slides beyond them).

#include <optional>

#include "tactile/sensing.hpp"
#include "tactile/sim/surfaces.hpp"

namespace tactile::sim {

inline constexpr double kTipRadius = 20.0;  // mm

struct ShearLimits {
  double translation = 5.0;  // mm
  double rotation = 5.0;     // deg
};

/// Shear accumulator; empty while out of contact.
struct ShearState {
  struct Engaged {
    Vector2d shear = Vector2d::Zero();  // mm, along feature x/y
    double twist = 0.0;                 // rad, about the feature normal
    Pose body_to_sensor;                // X_bs at the previous step
  };
  std::optional<Engaged> engaged;
};

struct ContactReading {
  ContactPose contact;
  SurfacePoint surface;
  Pose feature_axes;  // world pose of the unsheared feature frame
};

namespace detail {

/// Feature axes at a contact: z inward along -n, x the tangent projection of
/// the sensor x-axis (falls back to the sensor y-axis when degenerate).
inline Eigen::Matrix3d feature_axes(const Vector3d& n, const Eigen::Matrix3d& sensor_rot) {
  const Vector3d zf = -n;
  Vector3d xf = sensor_rot.col(0) - sensor_rot.col(0).dot(zf) * zf;
  if (xf.norm() < 1e-6) xf = sensor_rot.col(1) - sensor_rot.col(1).dot(zf) * zf;
  xf.normalize();
  Eigen::Matrix3d r;
  r << xf, zf.cross(xf), zf;
  return r;
}

}  // namespace detail

/**
 * Returns the true contact pose, or nullopt (and resets `shear`) when the
 * tip does not penetrate. `shear` is advanced by the sensor motion relative
 * to the surface body frame since the previous call.
 */
inline std::optional<ContactReading> true_contact(const Surface& surface, const Pose& x_ws, ShearState& shear,
                                                  const ShearLimits& limits = {}) {
  const Vector3d c = x_ws.translation();
  const SurfacePoint sp = closest_point(surface, c);
  const double depth = kTipRadius - sp.height(c);
  if (!(depth > 0)) {
    shear.engaged.reset();
    return std::nullopt;
  }
  const Eigen::Matrix3d r_wf = detail::feature_axes(sp.normal, x_ws.rotation());
  const Vector3d tilt = euler_xyz_from_rotation(Eigen::Matrix3d(r_wf.transpose() * x_ws.rotation()));

  const Pose x_wb = body_frame(surface);
  const Pose x_bs = x_wb.inverse() * x_ws;
  if (shear.engaged) {
    auto& e = *shear.engaged;
    const Vector3d dp = x_wb.rotation() * (x_bs.translation() - e.body_to_sensor.translation());
    e.shear += Vector2d(dp.dot(r_wf.col(0)), dp.dot(r_wf.col(1)));
    const Eigen::AngleAxisd turn(x_bs.rotation() * e.body_to_sensor.rotation().transpose());
    e.twist += (x_wb.rotation() * (turn.angle() * turn.axis())).dot(r_wf.col(2));
    if (e.shear.norm() > limits.translation) e.shear *= limits.translation / e.shear.norm();
    const double max_twist = limits.rotation * kRadPerDeg;
    e.twist = std::clamp(e.twist, -max_twist, max_twist);
  } else {
    shear.engaged.emplace();
  }
  shear.engaged->body_to_sensor = x_bs;

  const auto& e = *shear.engaged;
  ContactReading out;
  out.contact = {e.shear.x(), e.shear.y(), depth, tilt.x() * kDegPerRad, tilt.y() * kDegPerRad,
                 e.twist * kDegPerRad};
  out.surface = sp;
  out.feature_axes = Pose::unchecked(r_wf, c - depth * r_wf.col(2));
  return out;
}

}  // namespace tactile::sim
