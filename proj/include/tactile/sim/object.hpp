#pragma once

// Quasi-static pushed object. Deliberately simple: the object translates by
// the commanded advance along the push direction and turns by an amount
// proportional to the normalised moment arm of the push about the centroid.

#include <cmath>
#include <stdexcept>

#include "tactile/sim/surfaces.hpp"

namespace tactile::sim {

struct PushModel {
  double kappa = 0.0075;      // rad of heading per mm of advance at unit normalised arm
  double yield_depth = 3.0;   // mm of tip penetration the object resists before moving
  double boundary_tol = 1e-6; // mm
};

/// Signed planar moment (y-z cross product) of a push about the centroid.
inline double push_moment(const Vector2d& centroid, const Vector2d& contact, const Vector2d& dir) {
  const Vector2d r = contact - centroid;
  return r.x() * dir.y() - r.y() * dir.x();
}

inline ObjectState step_pushed_object(const ObjectState& o, const Vector2d& contact_point, const Vector2d& push_dir,
                                      double advance, const PushModel& model = {}) {
  const ClosestPoint2d cp = closest_on_footprint(o.footprint, o.pose.to_object(contact_point));
  if ((o.pose.to_world(cp.point) - contact_point).norm() > model.boundary_tol) {
    throw std::invalid_argument("step_pushed_object: contact point is not on the footprint boundary");
  }
  if (std::abs(push_dir.norm() - 1.0) > 1e-9) throw std::invalid_argument("step_pushed_object: direction not unit");
  if (advance < 0) throw std::invalid_argument("step_pushed_object: negative advance");
  ObjectState next = o;
  const double arm = push_moment(o.pose.position(), contact_point, push_dir) / o.footprint.char_length;
  next.pose.y += advance * push_dir.x();
  next.pose.z += advance * push_dir.y();
  next.pose.heading += model.kappa * arm * advance * kDegPerRad;
  return next;
}

}  // namespace tactile::sim
