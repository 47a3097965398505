#pragma once

// Built-in controller parameter sets. Rotational gains act on errors in deg,
// feedforward is in mm/s and deg/s; reference poses are Euler 6-vectors
// (mm, deg). The config/*.yaml files carry the same numbers.

#include "tactile/control.hpp"

namespace tactile::gains {

inline Vector6d v6(double a, double b, double c, double d, double e, double f) {
  Vector6d v;
  v << a, b, c, d, e, f;
  return v;
}

struct ServoPreset {
  PidConfig pid;
  Vector6d reference_euler = Vector6d::Zero();  // mm, deg
  Vector6d feedforward = Vector6d::Zero();      // mm/s, deg/s

  ServoConfig servo() const { return {pose_from_euler6_deg(reference_euler), feedforward}; }
};

inline ServoPreset tracking() {
  ServoPreset p;
  p.pid.kp = v6(5, 5, 5, 2, 2, 0);
  p.pid.ki = v6(0.5, 0.5, 0.5, 0.2, 0.2, 0.2);
  p.pid.kd = p.pid.ki;
  p.reference_euler = v6(0, 0, 6, 0, 0, 0);
  return p;
}

inline ServoPreset surface_following() {
  ServoPreset p;
  p.pid.kp = v6(0, 0, 2, 2, 2, 0);
  p.pid.ki = v6(0, 0, 0.1, 0.1, 0.1, 0);
  p.pid.kd = v6(0, 0, 0.05, 0.05, 0.05, 0);
  p.pid.integral_clip = Bounds<6>::symmetric(25);
  p.reference_euler = v6(0, 0, 3, 0, 0, 0);
  return p;
}

inline ServoPreset ramp_following() {
  ServoPreset p = surface_following();
  p.feedforward = v6(0, 10, 0, 0, 0, 0);
  return p;
}

/// Radial feedforward at heading theta_deg for the dome.
inline ServoPreset hemisphere_following(double theta_deg) {
  ServoPreset p = surface_following();
  const double t = theta_deg * kRadPerDeg;
  p.feedforward = v6(10 * std::cos(t), 10 * std::sin(t), 0, 0, 0, 0);
  return p;
}

inline ServoPreset pushing() {
  ServoPreset p;
  p.pid.kp = v6(1, 0, 0, 1, 0, 0);
  p.pid.ki = v6(0.1, 0, 0, 0.1, 0, 0);
  p.pid.kd = p.pid.ki;
  p.pid.integral_clip = Bounds<6>::symmetric(25);
  p.feedforward = v6(0, 0, 10, 0, 0, 0);
  return p;
}

inline ScalarPidConfig alignment(bool dual_arm) {
  ScalarPidConfig c;
  c.kp << 0.9;
  c.ki << (dual_arm ? 0.5 : 0.3);
  c.kd << 0.9;
  c.integral_clip = Bounds<1>::symmetric(10);
  c.output_clip = Bounds<1>::symmetric(15);
  return c;
}

inline ServoPreset stabiliser() {
  ServoPreset p;
  p.pid.kp = v6(5, 0, 5, 1, 0, 0);
  p.pid.ki = v6(0.5, 0, 0.5, 0.1, 0, 0);
  p.pid.kd = p.pid.ki;
  p.pid.integral_clip = Bounds<6>::symmetric(200);
  p.reference_euler = v6(0, 0, 3, 0, 0, 0);
  return p;
}

/// Tall objects: leader and follower references shifted by 0.5 mm along x.
inline void apply_tall_offsets(ServoPreset& leader, ServoPreset& follower) {
  leader.reference_euler(0) += 0.5;
  follower.reference_euler(0) -= 0.5;
}

inline PushConfig push_config(bool dual_arm) {
  const ServoPreset p = pushing();
  PushConfig c;
  c.servo = p.servo();
  c.servo_pid = p.pid;
  c.align_pid = alignment(dual_arm);
  return c;
}

}  // namespace tactile::gains
