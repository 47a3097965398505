#pragma once

// Contact surfaces for the kinematic simulator. Every surface answers one
// query: the closest surface point to a tip-sphere centre and the outward
// unit normal there, in world coordinates (mm).

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "tactile/se3.hpp"

namespace tactile::sim {

using Eigen::Vector2d;
using Eigen::Vector3d;

struct SurfacePoint {
  Vector3d point;
  Vector3d normal;  // outward, unit

  /// Signed distance of `c` from the tangent plane (positive outside).
  double height(const Vector3d& c) const { return (c - point).dot(normal); }
};

/// Plane z = 0 of `pose`, outward normal +z of `pose`. Used both for fixed
/// flat surfaces and for the flat plate carried by the tracking leader.
struct PlaneSurface {
  Pose pose;
};

/// World z = h(y): flat, then one cosine hump of height `amplitude` over
/// [start_y, start_y + wavelength], then flat again.
struct RampSurface {
  double amplitude = 20.0;
  double wavelength = 300.0;
  double start_y = 0.0;

  double height(double y) const {
    const double s = y - start_y;
    if (s <= 0 || s >= wavelength) return 0.0;
    return 0.5 * amplitude * (1.0 - std::cos(2 * kPi * s / wavelength));
  }
  double slope(double y) const {
    const double s = y - start_y;
    if (s <= 0 || s >= wavelength) return 0.0;
    const double k = 2 * kPi / wavelength;
    return 0.5 * amplitude * k * std::sin(k * s);
  }
  double curvature(double y) const {
    const double s = y - start_y;
    if (s <= 0 || s >= wavelength) return 0.0;
    const double k = 2 * kPi / wavelength;
    return 0.5 * amplitude * k * k * std::cos(k * s);
  }
};

/// Dome of `radius` centred on the plane z = 0, standing on that plane.
struct HemisphereSurface {
  Vector3d center = Vector3d::Zero();
  double radius = 100.0;
};

/// Convex planar footprint in object coordinates (u, v), or a circle.
struct Footprint {
  std::vector<Vector2d> vertices;  // counter-clockwise; empty for a circle
  double circle_radius = 0.0;
  double char_length = 0.0;  // inscribed radius, used to normalise moment arms

  bool is_circle() const { return vertices.empty(); }

  static Footprint square(double side) {
    const double h = side / 2;
    return {{{-h, -h}, {h, -h}, {h, h}, {-h, h}}, 0.0, h};
  }
  static Footprint circle(double diameter) { return {{}, diameter / 2, diameter / 2}; }
  static Footprint regular_polygon(int n, double circumradius) {
    if (n < 3 || !(circumradius > 0)) throw std::invalid_argument("regular_polygon: bad size");
    Footprint f;
    for (int k = 0; k < n; ++k) {
      const double a = 2 * kPi * k / n;
      f.vertices.emplace_back(circumradius * std::cos(a), circumradius * std::sin(a));
    }
    f.char_length = circumradius * std::cos(kPi / n);
    return f;
  }
};

struct ClosestPoint2d {
  Vector2d point;
  Vector2d normal;  // outward
};

/// Closest boundary point of a footprint to q (object coordinates).
inline ClosestPoint2d closest_on_footprint(const Footprint& f, const Vector2d& q) {
  if (f.is_circle()) {
    const double n = q.norm();
    const Vector2d dir = n > 1e-12 ? Vector2d(q / n) : Vector2d(1, 0);
    return {f.circle_radius * dir, dir};
  }
  ClosestPoint2d best{};
  double best_d = INFINITY;
  double max_signed = -INFINITY;
  Vector2d max_normal;
  const std::size_t n = f.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2d a = f.vertices[i];
    const Vector2d e = f.vertices[(i + 1) % n] - a;
    const Vector2d on = Vector2d(e.y(), -e.x()).normalized();
    const double signed_d = (q - a).dot(on);
    if (signed_d > max_signed) {
      max_signed = signed_d;
      max_normal = on;
    }
    const double t = std::clamp((q - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    const Vector2d p = a + t * e;
    const double d = (q - p).norm();
    if (d < best_d) {
      best_d = d;
      // Face normal on an edge interior, radial direction off a vertex.
      best = {p, (t > 0 && t < 1) || d < 1e-12 ? on : Vector2d((q - p) / d)};
    }
  }
  // Inside: project onto the least-penetrated face.
  if (max_signed <= 0) return {q - max_signed * max_normal, max_normal};
  return best;
}

/// Planar pose of an object on the support plane; (y, z) in the world
/// y-z plane, heading in deg about world +x.
struct PlanarPose {
  double y = 0, z = 0, heading = 0;

  Eigen::Matrix2d rotation() const {
    const double a = heading * kRadPerDeg;
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
  }
  Vector2d position() const { return {y, z}; }
  Vector2d to_world(const Vector2d& uv) const { return rotation() * uv + position(); }
  Vector2d to_object(const Vector2d& yz) const { return rotation().transpose() * (yz - position()); }
  Pose pose3() const {
    return Pose::unchecked(Eigen::AngleAxisd(heading * kRadPerDeg, Vector3d::UnitX()).toRotationMatrix(),
                           {0, y, z});
  }
};

enum class HeightClass { short_object, tall_object };

struct ObjectState {
  PlanarPose pose;
  Footprint footprint;
  HeightClass height = HeightClass::short_object;
};

/// Vertical faces of an extruded footprint; world x is the extrusion axis.
struct ObjectFaceSurface {
  ObjectState object;
};

using Surface = std::variant<PlaneSurface, RampSurface, HemisphereSurface, ObjectFaceSurface>;

namespace detail {

inline SurfacePoint closest(const PlaneSurface& s, const Vector3d& c) {
  const Vector3d n = s.pose.rotation().col(2);
  return {c - (c - s.pose.translation()).dot(n) * n, n};
}

inline SurfacePoint closest(const RampSurface& s, const Vector3d& c) {
  // Stationarity of |(y, h(y)) - (c_y, c_z)|^2, solved by damped Newton.
  double y = c.y();
  for (int it = 0; it < 50; ++it) {
    const double h = s.height(y), dh = s.slope(y), ddh = s.curvature(y);
    const double g = (y - c.y()) + (h - c.z()) * dh;
    const double gp = 1 + dh * dh + (h - c.z()) * ddh;
    const double step = g / std::max(gp, 0.1);
    y -= step;
    if (std::abs(step) < 1e-12) break;
  }
  const double dh = s.slope(y);
  return {{c.x(), y, s.height(y)}, Vector3d(0, -dh, 1).normalized()};
}

inline SurfacePoint closest(const HemisphereSurface& s, const Vector3d& c) {
  const SurfacePoint base{{c.x(), c.y(), s.center.z()}, Vector3d::UnitZ()};
  Vector3d d = c - s.center;
  if (d.norm() < 1e-12) d = Vector3d::UnitZ();
  const Vector3d n = d.normalized();
  const SurfacePoint dome{s.center + s.radius * n, n};
  if (n.z() < 0) return base;
  // Outside a union of solids the nearer boundary wins.
  return dome.height(c) <= base.height(c) ? dome : base;
}

inline SurfacePoint closest(const ObjectFaceSurface& s, const Vector3d& c) {
  const PlanarPose& p = s.object.pose;
  const ClosestPoint2d cp = closest_on_footprint(s.object.footprint, p.to_object({c.y(), c.z()}));
  const Vector2d pw = p.to_world(cp.point);
  const Vector2d nw = p.rotation() * cp.normal;
  return {{c.x(), pw.x(), pw.y()}, {0, nw.x(), nw.y()}};
}

}  // namespace detail

inline SurfacePoint closest_point(const Surface& s, const Vector3d& c) {
  return std::visit([&](const auto& v) { return detail::closest(v, c); }, s);
}

/// Frame the surface material moves with; tangential slip is measured in it.
inline Pose body_frame(const Surface& s) {
  if (const auto* p = std::get_if<PlaneSurface>(&s)) return p->pose;
  if (const auto* o = std::get_if<ObjectFaceSurface>(&s)) return o->object.pose.pose3();
  return Pose();
}

}  // namespace tactile::sim
