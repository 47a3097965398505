#pragma once

// CSV and JSON writers. Numbers are printed in shortest round-trip form so
// identical runs give byte-identical files; files land via temp + rename.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <fmt/format.h>
#include <json.hpp>

#include "tactile/filter_sweep.hpp"
#include "tactile/io/config.hpp"

namespace tactile::io {

using nlohmann::ordered_json;

struct WriteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void write_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = path.string() + fmt::format(".tmp{}.{}", ::getpid(), counter++);
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw WriteError(fmt::format("cannot write {}", tmp.string()));
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw WriteError(fmt::format("write failed: {}", tmp.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw WriteError(fmt::format("cannot rename into {}", path.string()));
  }
}

namespace detail {

inline void append_vec(std::string& s, const auto& v) {
  for (int i = 0; i < v.size(); ++i) fmt::format_to(std::back_inserter(s), ",{}", v(i));
}

inline std::string names(const std::string& prefix, std::initializer_list<const char*> parts, const std::string& suffix = "") {
  std::string s;
  for (const char* p : parts) s += fmt::format(",{}{}{}", prefix, p, suffix);
  return s;
}

inline std::vector<double> to_list(const auto& v) {
  std::vector<double> out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = v(i);
  return out;
}

template <int N>
ordered_json pid_json(const PidConfigT<N>& p) {
  ordered_json j;
  j["kp"] = to_list(p.kp);
  j["ki"] = to_list(p.ki);
  j["kd"] = to_list(p.kd);
  const auto clip = [](const std::optional<Bounds<N>>& b) {
    return b ? ordered_json{{"lower", to_list(b->lower)}, {"upper", to_list(b->upper)}} : ordered_json(nullptr);
  };
  j["integral_clip"] = clip(p.integral_clip);
  j["output_clip"] = clip(p.output_clip);
  j["ewma_decay"] = p.ewma_decay;
  return j;
}

inline ordered_json servo_json(const gains::ServoPreset& p) {
  ordered_json j = pid_json(p.pid);
  j["reference_pose_mm_deg"] = to_list(p.reference_euler);
  j["feedforward_mm_s_deg_s"] = to_list(p.feedforward);
  return j;
}

inline ordered_json finite_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

}  // namespace detail

inline std::string trajectory_csv(const sim::TrajectoryLog& log) {
  std::string s = "t_s";
  const auto pose = {"x_mm", "y_mm", "z_mm", "alpha_deg", "beta_deg", "gamma_deg"};
  const auto xi = {"1", "2", "3", "4", "5", "6"};
  s += detail::names("arm_", pose) + detail::names("aux_", pose);
  s += ",object_y_mm,object_z_mm,object_heading_deg,contact";
  s += detail::names("true_", pose);
  s += detail::names("observed_xi_", xi) + detail::names("filtered_xi_", xi) + detail::names("cov_", xi);
  s += detail::names("u_", {"vx_mm_s", "vy_mm_s", "vz_mm_s", "wx_deg_s", "wy_deg_s", "wz_deg_s"});
  s += ",bearing_deg,distance_mm,aux_depth_mm\n";
  for (const auto& r : log.rows) {
    fmt::format_to(std::back_inserter(s), "{}", r.t);
    detail::append_vec(s, r.arm);
    detail::append_vec(s, r.aux);
    detail::append_vec(s, r.object);
    fmt::format_to(std::back_inserter(s), ",{}", int(r.contact));
    detail::append_vec(s, r.true_contact);
    detail::append_vec(s, r.observed);
    detail::append_vec(s, r.filtered);
    detail::append_vec(s, r.cov_diag);
    detail::append_vec(s, r.control);
    fmt::format_to(std::back_inserter(s), ",{},{},{}\n", r.bearing, r.distance, r.aux_depth);
  }
  return s;
}

inline ordered_json task_config_json(const sim::TaskConfig& c) {
  ordered_json j;
  j["task"] = sim::task_name(c.task);
  j["dt_s"] = c.dt;
  j["step_budget"] = c.step_budget;
  j["duration_s"] = c.duration;
  j["sigma_phi_mm_deg"] = c.sigma_phi;
  j["noise"] = {{"sigma_mm_deg", detail::to_list(c.noise.sigma)},
                {"aliasing_threshold_mm", c.noise.aliasing_slip_threshold},
                {"aliasing_variance_factor", c.noise.aliasing_variance_factor}};
  j["initial_depth_mm"] = c.initial_depth;
  j["workspace_limit_mm"] = c.workspace_limit;
  j["servo"] = detail::servo_json(c.servo);
  switch (c.task) {
    case sim::Task::track:
      j["leader"] = {{"amplitude_mm_deg", detail::to_list(c.leader.amplitude)},
                     {"phase_rad", detail::to_list(c.leader.phase)},
                     {"period_s", c.leader.period}};
      break;
    case sim::Task::follow_ramp:
      j["ramp"] = {{"amplitude_mm", c.ramp.amplitude}, {"wavelength_mm", c.ramp.wavelength}, {"approach_mm", c.ramp_approach}};
      break;
    case sim::Task::follow_hemisphere:
      j["dome"] = {{"radius_mm", c.dome.radius}, {"heading_deg", c.heading}};
      break;
    case sim::Task::push_dual:
      j["follower"] = detail::servo_json(c.follower);
      [[fallthrough]];
    case sim::Task::push_single:
      j["alignment"] = detail::pid_json(c.align);
      j["alignment"]["cutoff_mm"] = c.align_cutoff;
      j["alignment"]["done_radius_mm"] = c.done_radius;
      j["object"] = {{"shape", sim::shape_name(c.shape)},
                     {"height", c.height == sim::HeightClass::tall_object ? "tall" : "short"},
                     {"kappa_rad_mm", c.push.kappa},
                     {"yield_depth_mm", c.push.yield_depth}};
      j["start_mm"] = detail::to_list(c.start);
      j["target_mm"] = detail::to_list(c.target);
      break;
  }
  return j;
}

inline std::string run_metadata_json(const RunConfig& rc, const sim::TrajectoryLog& log, const std::string& csv_name) {
  ordered_json j;
  j["seed"] = rc.seed;
  j["task"] = sim::task_name(log.task);
  j["termination"] = sim::termination_name(log.termination);
  j["aborted"] = log.aborted();
  j["diagnostic"] = log.diagnostic;
  j["steps"] = log.rows.size();
  j["final_miss_mm"] = detail::finite_or_null(log.final_miss);
  j["trajectory_csv"] = csv_name;
  j["config_file"] = rc.config_path.filename().string();
  j["controller_file"] = rc.controller_path.filename().string();
  j["config"] = task_config_json(rc.task);
  return j.dump(2) + "\n";
}

/// Header plus one row per sample: contact (mm, deg) and label twist (mm, rad).
inline std::string dataset_csv(const std::vector<LabelledContact>& data) {
  std::string s = "x,y,z,alpha,beta,gamma,xi_1,xi_2,xi_3,xi_4,xi_5,xi_6\n";
  for (const auto& d : data) {
    const Vector6d c = d.contact.as_vector();
    fmt::format_to(std::back_inserter(s), "{}", c(0));
    for (int i = 1; i < 6; ++i) fmt::format_to(std::back_inserter(s), ",{}", c(i));
    detail::append_vec(s, d.label);
    s += '\n';
  }
  return s;
}

inline std::string dataset_metadata_json(std::size_t n, std::uint64_t seed, const DatasetRanges& ranges) {
  ordered_json j;
  j["rows"] = n;
  j["seed"] = seed;
  j["units"] = {{"x,y,z", "mm"}, {"alpha,beta,gamma", "deg"}, {"xi_1..xi_3", "mm"}, {"xi_4..xi_6", "rad"}};
  j["ranges"] = {{"shear_radius_mm", ranges.shear_radius},
                 {"depth_min_mm", ranges.depth_min},
                 {"depth_max_mm", ranges.depth_max},
                 {"cap_angle_deg", ranges.cap_angle},
                 {"gamma_max_deg", ranges.gamma_max}};
  return j.dump(2) + "\n";
}

inline std::string sweep_csv(const std::vector<SweepLevel>& levels) {
  const auto comps = {"x_mm", "y_mm", "z_mm", "alpha_deg", "beta_deg", "gamma_deg"};
  std::string s = "sigma_psi" + detail::names("raw_mae_", comps) + detail::names("filtered_mae_", comps) + "\n";
  for (const auto& l : levels) {
    fmt::format_to(std::back_inserter(s), "{}", l.sigma_psi);
    detail::append_vec(s, l.raw_mae);
    detail::append_vec(s, l.filtered_mae);
    s += '\n';
  }
  return s;
}

}  // namespace tactile::io
