#pragma once

#include <stdexcept>

#include "tactile/se3.hpp"

namespace tactile::sim {

struct ArmState {
  Pose end_effector;
  Twist commanded = Twist::Zero();  // mm/s, rad/s
};

/// Body-frame velocity integration, X <- X exp(u dt), re-orthonormalised.
inline ArmState integrate_arm(const ArmState& a, const Twist& u, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("integrate_arm: dt must be positive");
  return {(a.end_effector * exp_map(Twist(u * dt))).normalized(), u};
}

}  // namespace tactile::sim
