#pragma once

/**
 * Discriminative Bayes filter on SE(3).
 *
 * Predict: the belief is carried through the sensor motion between steps,
 *   T = (X_k^sens)^-1 X_{k-1}^sens,  bel = (T X_fil, Ad(T) S_fil Ad(T)^T + S_phi)
 * Correct: bel is fused with the observation (observation first, so the
 * fusion operating point starts at the observed mean).
 */

#include <optional>
#include <stdexcept>

#include "tactile/uncertainty.hpp"

namespace tactile {

/// Per-step state dynamics noise. Translational block in mm^2, rotational in rad^2.
struct DynamicsNoise {
  Matrix6d cov = Matrix6d::Zero();

  /// sigma^2 per component: sigma read as mm for translation and deg for rotation.
  static DynamicsNoise isotropic(double sigma) {
    if (!(sigma >= 0.0)) {
      throw std::invalid_argument("DynamicsNoise: sigma must be non-negative");
    }
    Vector6d var;
    const double rot = sigma * kRadPerDeg;
    var << sigma * sigma, sigma * sigma, sigma * sigma, rot * rot, rot * rot, rot * rot;
    return {var.asDiagonal()};
  }
};

inline constexpr double kDefaultSigmaPhi = 0.5;

struct FilterState {
  PoseBelief filtered;
  /// Unset until the first sensor pose is seen.
  std::optional<Pose> prev_sensor_pose;
  long step_index = 0;
};

inline FilterState filter_init(const PoseBelief& obs) { return {obs, std::nullopt, 0}; }

inline FilterState filter_init(const PoseBelief& obs, const Pose& sensor_pose) {
  return {obs, sensor_pose, 0};
}

/// Prediction with an explicit state transformation.
inline PoseBelief filter_predict_transform(const FilterState& s, const Pose& transform,
                                           const DynamicsNoise& noise) {
  return propagate(s.filtered, transform, noise.cov);
}

/// Prediction from the current sensor pose (robot kinematics).
inline PoseBelief filter_predict(const FilterState& s, const Pose& sensor_pose_k,
                                 const DynamicsNoise& noise) {
  const Pose t = s.prev_sensor_pose ? sensor_pose_k.inverse() * *s.prev_sensor_pose : Pose();
  return filter_predict_transform(s, t, noise);
}

inline PoseBelief filter_correct(const PoseBelief& belief, const PoseBelief& obs,
                                 const FusionOptions& opts = {}) {
  return fuse(obs, belief, opts).belief;
}

/// One predict/correct cycle. Without an observation only the prediction runs.
inline FilterState filter_step(const FilterState& s, const std::optional<PoseBelief>& obs,
                               const Pose& sensor_pose_k, const DynamicsNoise& noise) {
  const PoseBelief bel = filter_predict(s, sensor_pose_k, noise);
  return {obs ? filter_correct(bel, *obs) : bel, sensor_pose_k, s.step_index + 1};
}

/// As filter_step, with the state transformation supplied directly.
inline FilterState filter_step_transform(const FilterState& s, const std::optional<PoseBelief>& obs,
                                         const Pose& transform, const DynamicsNoise& noise) {
  const PoseBelief bel = filter_predict_transform(s, transform, noise);
  return {obs ? filter_correct(bel, *obs) : bel, s.prev_sensor_pose, s.step_index + 1};
}

}  // namespace tactile
