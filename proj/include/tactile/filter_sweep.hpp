#pragma once

/**
 * Filter accuracy versus state dynamics noise.
 *
 * A sequence of random contacts X_k = exp(label_k) is observed through the
 * surrogate; the state transformation fed to the filter is
 *   T_k = exp(psi_k^) X_k X_{k-1}^-1,  psi_k ~ N(0, S_psi)
 * and the filter uses S_phi = S_psi. Per level, per-component MAEs of the raw
 * and filtered twists against the labels are reported (mm, deg).
 *
 * Observation noise and psi are drawn once per seed as standard normals and
 * scaled per level, so every level sees the same underlying draws.
 */

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "tactile/bayes_filter.hpp"
#include "tactile/sensing.hpp"

namespace tactile {

struct SweepOptions {
  std::vector<double> levels{10.0, 1.0, 0.1, 0.01};
  std::size_t steps = 2000;
  std::uint64_t seed = 1;
  SurrogateNoiseProfile profile = SurrogateNoiseProfile::calibrated().without_aliasing();
};

struct SweepLevel {
  double sigma_psi = 0;
  Vector6d raw_mae = Vector6d::Zero();       // mm, deg
  Vector6d filtered_mae = Vector6d::Zero();  // mm, deg
};

namespace detail {

inline Vector6d abs_error_mm_deg(const Twist& est, const Twist& truth) {
  return twist_rad_to_deg(est - truth).cwiseAbs();
}

template <typename Rng>
std::vector<Vector6d> standard_normals(Rng& rng, std::size_t n) {
  std::normal_distribution<double> n01;
  std::vector<Vector6d> out(n);
  for (auto& v : out) {
    for (int k = 0; k < 6; ++k) v(k) = n01(rng);
  }
  return out;
}

}  // namespace detail

inline std::vector<SweepLevel> run_filter_sweep(const SweepOptions& opts) {
  if (opts.steps < 2) throw std::invalid_argument("filter sweep: need at least 2 steps");
  for (double level : opts.levels) {
    if (!(level > 0)) throw std::invalid_argument("filter sweep: levels must be positive");
  }
  std::seed_seq seq{opts.seed, std::uint64_t(0x5eed)};
  std::uint64_t stream_seeds[3];
  seq.generate(stream_seeds, stream_seeds + 3);
  std::mt19937_64 data_rng(stream_seeds[0]), obs_rng(stream_seeds[1]), psi_rng(stream_seeds[2]);

  const auto data = generate_dataset(data_rng, opts.steps);
  const auto obs_normals = detail::standard_normals(obs_rng, opts.steps);
  const auto psi_normals = detail::standard_normals(psi_rng, opts.steps);

  std::vector<PoseBelief> observations;
  Vector6d raw_sum = Vector6d::Zero();
  for (std::size_t k = 0; k < opts.steps; ++k) {
    const TangentGaussian g = surrogate_from_normals(data[k].contact, opts.profile, obs_normals[k]);
    raw_sum += detail::abs_error_mm_deg(g.mu, data[k].label);
    observations.push_back(belief_from_tangent(g));
  }
  std::vector<Pose> truth;
  for (const auto& d : data) truth.push_back(exp_map(d.label));

  std::vector<SweepLevel> out;
  for (double level : opts.levels) {
    const DynamicsNoise noise = DynamicsNoise::isotropic(level);
    FilterState st = filter_init(observations[0]);
    Vector6d sum = detail::abs_error_mm_deg(log_map(st.filtered.mean), data[0].label);
    for (std::size_t k = 1; k < opts.steps; ++k) {
      const Twist psi = twist_deg_to_rad(level * psi_normals[k]);
      const Pose t = exp_map(psi) * truth[k] * truth[k - 1].inverse();
      st = filter_step_transform(st, observations[k], t, noise);
      sum += detail::abs_error_mm_deg(log_map(st.filtered.mean), data[k].label);
    }
    out.push_back({level, raw_sum / double(opts.steps), sum / double(opts.steps)});
  }
  return out;
}

}  // namespace tactile
