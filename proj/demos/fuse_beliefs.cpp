// Fuse two uncertain contact-pose estimates and filter a noisy sequence.

#include <random>

#include <fmt/format.h>

#include "tactile/bayes_filter.hpp"
#include "tactile/sensing.hpp"

using namespace tactile;

int main() {
  const ContactPose truth{1.0, -0.5, 3.0, 4.0, -2.0, 1.0};
  const Twist label = pose_to_inverted_tangent(truth);
  std::mt19937_64 rng(5);
  const auto profile = SurrogateNoiseProfile::calibrated().without_aliasing();

  const PoseBelief a = belief_from_tangent(surrogate_observe(truth, profile, rng));
  const PoseBelief b = belief_from_tangent(surrogate_observe(truth, profile, rng));
  const FusionResult f = fuse(a, b);
  fmt::print("two observations fused in {} iterations\n", f.iterations);
  fmt::print("  error a     {:.3f}\n", (log_map(a.mean) - label).norm());
  fmt::print("  error b     {:.3f}\n", (log_map(b.mean) - label).norm());
  fmt::print("  error fused {:.3f}\n\n", (log_map(f.belief.mean) - label).norm());

  // Stationary sensor: the filter averages successive observations.
  const DynamicsNoise noise = DynamicsNoise::isotropic(0.05);
  FilterState st = filter_init(belief_from_tangent(surrogate_observe(truth, profile, rng)));
  for (int k = 1; k <= 30; ++k) {
    const TangentGaussian obs = surrogate_observe(truth, profile, rng);
    st = filter_step_transform(st, belief_from_tangent(obs), Pose::identity(), noise);
    if (k % 5 == 0) {
      fmt::print("step {:2}: raw error {:.3f}, filtered error {:.3f}\n", k, (obs.mu - label).norm(),
                 (log_map(st.filtered.mean) - label).norm());
    }
  }
}
