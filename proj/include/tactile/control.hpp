#pragma once

/**
 * Tangent-space feedforward/feedback control.
 *
 * Errors are SE(3) poses mapped to twists with log. The PID acts on errors
 * with the rotational part in degrees, and its output is read as a velocity
 * twist in mm/s and deg/s; controllers return body twists in mm/s, rad/s.
 */

#include <cmath>
#include <optional>
#include <stdexcept>
#include <type_traits>

#include "tactile/se3.hpp"

namespace tactile {

template <int N>
using VectorN = Eigen::Matrix<double, N, 1>;

template <int N>
struct Bounds {
  VectorN<N> lower;
  VectorN<N> upper;

  static Bounds symmetric(double limit) {
    return {VectorN<N>::Constant(-limit), VectorN<N>::Constant(limit)};
  }
  VectorN<N> clamp(const VectorN<N>& v) const { return v.cwiseMax(lower).cwiseMin(upper); }
};

/// Diagonal PID gains. ewma_decay weights the previous smoothed error.
template <int N>
struct PidConfigT {
  VectorN<N> kp = VectorN<N>::Zero();
  VectorN<N> ki = VectorN<N>::Zero();
  VectorN<N> kd = VectorN<N>::Zero();
  std::optional<Bounds<N>> integral_clip;
  std::optional<Bounds<N>> output_clip;
  double ewma_decay = 0.5;

  void validate() const {
    const auto ok = [](const VectorN<N>& g) { return g.allFinite() && (g.array() >= 0).all(); };
    if (!ok(kp) || !ok(ki) || !ok(kd)) throw std::invalid_argument("PID gains must be finite and >= 0");
    for (const auto& clip : {integral_clip, output_clip}) {
      if (clip && !(clip->lower.array() < clip->upper.array()).all()) {
        throw std::invalid_argument("PID clip lower bound must be below upper bound");
      }
    }
    if (!(ewma_decay > 0 && ewma_decay < 1)) throw std::invalid_argument("ewma_decay must be in (0, 1)");
  }
};

template <int N>
struct PidStateT {
  VectorN<N> integral = VectorN<N>::Zero();
  VectorN<N> smoothed_error = VectorN<N>::Zero();
  bool started = false;
  double time = 0.0;
};

template <int N>
struct PidResult {
  VectorN<N> u;
  PidStateT<N> state;
};

using PidConfig = PidConfigT<6>;
using PidState = PidStateT<6>;
using ScalarPidConfig = PidConfigT<1>;
using ScalarPidState = PidStateT<1>;

/**
 * u = Kp e + Ki integral(e) + Kd d/dt(smoothed e)
 *
 * Backward-Euler integral (clipped), exponentially smoothed error with a
 * finite-difference derivative (zero on the first step), then output clip.
 */
template <int N>
PidResult<N> pid_update(const PidConfigT<N>& cfg, const PidStateT<N>& st,
                        const std::type_identity_t<VectorN<N>>& e, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("pid_update: dt must be positive");
  PidStateT<N> next = st;
  next.integral += e * dt;
  if (cfg.integral_clip) next.integral = cfg.integral_clip->clamp(next.integral);
  VectorN<N> derivative = VectorN<N>::Zero();
  if (st.started) {
    next.smoothed_error = cfg.ewma_decay * st.smoothed_error + (1.0 - cfg.ewma_decay) * e;
    derivative = (next.smoothed_error - st.smoothed_error) / dt;
  } else {
    next.smoothed_error = e;
  }
  next.started = true;
  next.time = st.time + dt;
  VectorN<N> u = cfg.kp.cwiseProduct(e) + cfg.ki.cwiseProduct(next.integral) + cfg.kd.cwiseProduct(derivative);
  if (cfg.output_clip) u = cfg.output_clip->clamp(u);
  return {u, next};
}

/// e = log(X^-1 X_ref), so that X_ref = X exp(e^).
inline Twist pose_error(const Pose& observed, const Pose& reference) {
  return log_map(observed.inverse() * reference);
}

/// X_ss' = X_sf X_s'f^-1 = X_sf X_fs' with X_fs' the reference sensor pose in the feature frame.
inline Pose servo_error(const Pose& x_sf, const Pose& x_fs_ref) { return x_sf * x_fs_ref; }

struct ServoConfig {
  /// Reference sensor pose in the feature frame.
  Pose reference;
  /// Feedforward velocity in the reference sensor frame (mm/s, deg/s).
  Twist feedforward = Twist::Zero();
};

struct ServoResult {
  Twist u;  // mm/s, rad/s in the current sensor frame
  PidState state;
  Pose error;  // X_ss'
};

/// Feedback on log(X_ss') plus the feedforward mapped by Ad(X_ss').
inline ServoResult servo_control(const ServoConfig& cfg, const PidConfig& pid, const PidState& st,
                                 const Pose& x_sf, double dt) {
  const Pose err = servo_error(x_sf, cfg.reference);
  const PidResult<6> fb = pid_update(pid, st, twist_rad_to_deg(log_map(err)), dt);
  const Twist u = twist_deg_to_rad(fb.u) + adjoint(err) * twist_deg_to_rad(cfg.feedforward);
  return {u, fb.state, err};
}

struct TargetGeometry {
  double bearing = 0;   // deg
  double distance = 0;  // mm
};

/// Target position in the reference sensor frame, X_s't = X_ss'^-1 X_ws^-1 X_wt,
/// reduced to bearing atan2(y, z) and range in the (y, z) plane.
inline TargetGeometry target_geometry(const Pose& x_ss_ref, const Pose& x_ws, const Pose& x_wt) {
  const Eigen::Vector3d p = (x_ss_ref.inverse() * x_ws.inverse() * x_wt).translation();
  return {std::atan2(p.y(), p.z()) * kDegPerRad, std::hypot(p.y(), p.z())};
}

struct PushConfig {
  ServoConfig servo;
  PidConfig servo_pid;
  ScalarPidConfig align_pid;
  double reference_bearing = 0.0;  // deg
  double align_cutoff = 120.0;     // mm, alignment output zeroed inside this range
  double done_radius = 20.0;       // mm, sensor tip radius
};

struct PushState {
  PidState servo;
  ScalarPidState align;
};

struct PushResult {
  Twist u;
  PushState state;
  Pose error;
  TargetGeometry target;
  bool done = false;
};

/// Servo control plus a sideways (reference-frame y) velocity from a scalar
/// PID on the bearing error, mapped by Ad(X_ss').
inline PushResult push_control(const PushConfig& cfg, const PushState& st, const Pose& x_sf,
                               const Pose& x_ws, const Pose& x_wt, double dt) {
  const ServoResult servo = servo_control(cfg.servo, cfg.servo_pid, st.servo, x_sf, dt);
  const TargetGeometry tg = target_geometry(servo.error, x_ws, x_wt);
  PushState next{servo.state, st.align};
  Twist u = servo.u;
  if (tg.distance >= cfg.align_cutoff) {
    const VectorN<1> e = VectorN<1>::Constant(cfg.reference_bearing - tg.bearing);
    const PidResult<1> al = pid_update(cfg.align_pid, st.align, e, dt);
    next.align = al.state;
    Twist align = Twist::Zero();
    align(1) = al.u(0);
    u += adjoint(servo.error) * align;
  }
  return {u, next, servo.error, tg, tg.distance < cfg.done_radius};
}

}  // namespace tactile
