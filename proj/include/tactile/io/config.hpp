#pragma once

// YAML run and controller files. Every key carries its unit in its name
// where one applies; unknown keys are rejected so a typo cannot silently
// fall back to a default. Errors report file:line:column.

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "tactile/sim/tasks.hpp"

namespace tactile::io {

namespace fs = std::filesystem;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ControllerFile {
  gains::ServoPreset servo;
  std::optional<gains::ServoPreset> follower;
  std::optional<ScalarPidConfig> align;
  std::optional<double> align_cutoff;  // mm
  std::optional<double> done_radius;   // mm
};

struct RunConfig {
  sim::TaskConfig task;
  std::uint64_t seed = 1;
  fs::path config_path;
  fs::path controller_path;
  fs::path output_dir = "out";
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const YAML::Mark m = at.Mark();
    if (m.is_null()) throw ConfigError(fmt::format("{}: {}", file_, msg));
    throw ConfigError(fmt::format("{}:{}:{}: {}", file_, m.line + 1, m.column + 1, msg));
  }

  YAML::Node load() const {
    try {
      return YAML::LoadFile(file_);
    } catch (const YAML::BadFile&) {
      throw ConfigError(fmt::format("{}: cannot open file", file_));
    } catch (const YAML::ParserException& e) {
      throw ConfigError(fmt::format("{}:{}:{}: {}", file_, e.mark.line + 1, e.mark.column + 1, e.msg));
    }
  }

  void require_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, what + " must be a mapping");
  }

  void allow_keys(const YAML::Node& n, std::initializer_list<const char*> keys) const {
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail(kv.first, fmt::format("unknown key '{}'", k));
    }
  }

  YAML::Node child(const YAML::Node& n, const char* key) const {
    const YAML::Node c = n[key];
    if (!c) fail(n, fmt::format("missing key '{}'", key));
    return c;
  }

  template <typename T>
  T scalar(const YAML::Node& n, const char* key) const {
    return as<T>(child(n, key), key);
  }

  template <typename T>
  T scalar_or(const YAML::Node& n, const char* key, T fallback) const {
    return n[key] ? as<T>(n[key], key) : fallback;
  }

  template <typename T>
  T as(const YAML::Node& v, const char* key) const {
    if (!v.IsScalar()) fail(v, fmt::format("'{}' must be a scalar", key));
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      fail(v, fmt::format("'{}' has invalid value '{}'", key, v.Scalar()));
    }
  }

  template <int N>
  VectorN<N> vec(const YAML::Node& n, const char* key) const {
    const YAML::Node v = child(n, key);
    return vec_value<N>(v, key);
  }

  template <int N>
  VectorN<N> vec_value(const YAML::Node& v, const char* key) const {
    VectorN<N> out;
    if (N == 1 && v.IsScalar()) {
      out(0) = as<double>(v, key);
      return out;
    }
    if (!v.IsSequence() || v.size() != std::size_t(N)) fail(v, fmt::format("'{}' must be a list of {} numbers", key, N));
    for (int i = 0; i < N; ++i) out(i) = as<double>(v[i], key);
    return out;
  }

  /// A clip is either a number (symmetric) or {lower: [...], upper: [...]}.
  template <int N>
  std::optional<Bounds<N>> clip(const YAML::Node& n, const char* key) const {
    const YAML::Node v = n[key];
    if (!v) return std::nullopt;
    if (v.IsScalar()) return Bounds<N>::symmetric(as<double>(v, key));
    require_map(v, key);
    allow_keys(v, {"lower", "upper"});
    return Bounds<N>{vec<N>(v, "lower"), vec<N>(v, "upper")};
  }

  template <typename Fn>
  void checked(const YAML::Node& at, Fn&& fn) const {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      fail(at, e.what());
    }
  }

  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

inline gains::ServoPreset read_servo(const Reader& r, const YAML::Node& n, const char* what) {
  r.require_map(n, what);
  r.allow_keys(n, {"kp", "ki", "kd", "integral_clip", "output_clip_mm_s_deg_s", "ewma_decay",
                   "reference_pose_mm_deg", "feedforward_mm_s_deg_s"});
  gains::ServoPreset p;
  p.pid.kp = r.vec<6>(n, "kp");
  p.pid.ki = r.vec<6>(n, "ki");
  p.pid.kd = r.vec<6>(n, "kd");
  p.pid.integral_clip = r.clip<6>(n, "integral_clip");
  p.pid.output_clip = r.clip<6>(n, "output_clip_mm_s_deg_s");
  p.pid.ewma_decay = r.scalar_or(n, "ewma_decay", 0.5);
  if (n["reference_pose_mm_deg"]) p.reference_euler = r.vec<6>(n, "reference_pose_mm_deg");
  if (n["feedforward_mm_s_deg_s"]) p.feedforward = r.vec<6>(n, "feedforward_mm_s_deg_s");
  r.checked(n, [&] { p.pid.validate(); });
  return p;
}

template <typename E>
E parse_enum(const Reader& r, const YAML::Node& v, const char* key, std::initializer_list<std::pair<const char*, E>> opts) {
  const auto s = r.as<std::string>(v, key);
  std::string names;
  for (const auto& [name, e] : opts) {
    if (s == name) return e;
    names += names.empty() ? name : fmt::format(", {}", name);
  }
  r.fail(v, fmt::format("'{}' must be one of: {}", key, names));
}

inline sim::Task parse_task(const Reader& r, const YAML::Node& v) {
  using sim::Task;
  return parse_enum<Task>(r, v, "task",
                          {{"track", Task::track},
                           {"follow_ramp", Task::follow_ramp},
                           {"follow_hemisphere", Task::follow_hemisphere},
                           {"push_single", Task::push_single},
                           {"push_dual", Task::push_dual}});
}

}  // namespace detail

inline ControllerFile load_controller(const fs::path& path) {
  const detail::Reader r(path.string());
  const YAML::Node root = r.load();
  r.require_map(root, "controller file");
  r.allow_keys(root, {"servo", "follower", "alignment"});
  ControllerFile out;
  out.servo = detail::read_servo(r, r.child(root, "servo"), "servo");
  if (root["follower"]) out.follower = detail::read_servo(r, root["follower"], "follower");
  if (const YAML::Node a = root["alignment"]) {
    r.require_map(a, "alignment");
    r.allow_keys(a, {"kp", "ki", "kd", "integral_clip", "output_clip_deg_s", "ewma_decay", "cutoff_mm",
                     "done_radius_mm"});
    ScalarPidConfig c;
    c.kp = r.vec<1>(a, "kp");
    c.ki = r.vec<1>(a, "ki");
    c.kd = r.vec<1>(a, "kd");
    c.integral_clip = r.clip<1>(a, "integral_clip");
    c.output_clip = r.clip<1>(a, "output_clip_deg_s");
    c.ewma_decay = r.scalar_or(a, "ewma_decay", 0.5);
    r.checked(a, [&] { c.validate(); });
    out.align = c;
    if (a["cutoff_mm"]) out.align_cutoff = r.scalar<double>(a, "cutoff_mm");
    if (a["done_radius_mm"]) out.done_radius = r.scalar<double>(a, "done_radius_mm");
  }
  return out;
}

/**
 * Loads a run file. `controller` is resolved relative to the run file.
 * Starts from the task defaults, then overlays the controller file and any
 * keys present. For follow_hemisphere the controller feedforward is taken
 * at heading 0 and rotated about the world vertical by `heading_deg`.
 */
inline RunConfig load_run_config(const fs::path& path) {
  const detail::Reader r(path.string());
  const YAML::Node root = r.load();
  r.require_map(root, "run file");
  r.allow_keys(root, {"task", "controller", "seed", "sigma_phi_mm_deg", "dt_s", "step_budget", "duration_s",
                      "output_dir", "noise", "initial_depth_mm", "workspace_limit_mm", "heading_deg", "shape",
                      "object_height"});
  RunConfig rc;
  rc.config_path = path;
  const double heading = r.scalar_or(root, "heading_deg", 0.0);
  sim::TaskConfig& c = rc.task;
  c = sim::default_config(detail::parse_task(r, r.child(root, "task")), heading);

  rc.controller_path = path.parent_path() / r.scalar<std::string>(root, "controller");
  ControllerFile ctl;
  try {
    ctl = load_controller(rc.controller_path);
  } catch (const ConfigError& e) {
    r.fail(root["controller"], e.what());
  }
  c.servo = ctl.servo;
  if (c.task == sim::Task::follow_hemisphere) {
    const double t = heading * kRadPerDeg, fx = c.servo.feedforward(0), fy = c.servo.feedforward(1);
    c.servo.feedforward(0) = std::cos(t) * fx - std::sin(t) * fy;
    c.servo.feedforward(1) = std::sin(t) * fx + std::cos(t) * fy;
  }
  if (ctl.follower) c.follower = *ctl.follower;
  if (ctl.align) c.align = *ctl.align;
  if (ctl.align_cutoff) c.align_cutoff = *ctl.align_cutoff;
  if (ctl.done_radius) c.done_radius = *ctl.done_radius;
  const bool pushing = c.task == sim::Task::push_single || c.task == sim::Task::push_dual;
  if (pushing && !ctl.align) r.fail(root["controller"], "pushing tasks need an 'alignment' section");
  if (c.task == sim::Task::push_dual && !ctl.follower) r.fail(root["controller"], "push_dual needs a 'follower' section");

  rc.seed = r.scalar_or<std::uint64_t>(root, "seed", 1);
  c.sigma_phi = r.scalar_or(root, "sigma_phi_mm_deg", c.sigma_phi);
  c.dt = r.scalar_or(root, "dt_s", c.dt);
  c.step_budget = r.scalar_or(root, "step_budget", c.step_budget);
  c.duration = r.scalar_or(root, "duration_s", c.duration);
  c.initial_depth = r.scalar_or(root, "initial_depth_mm", c.initial_depth);
  c.workspace_limit = r.scalar_or(root, "workspace_limit_mm", c.workspace_limit);
  const auto positive = [&](const char* key, double v) {
    if (root[key] && !(v > 0)) r.fail(root[key], fmt::format("'{}' must be > 0", key));
  };
  positive("sigma_phi_mm_deg", c.sigma_phi);
  positive("dt_s", c.dt);
  positive("step_budget", double(c.step_budget));
  positive("initial_depth_mm", c.initial_depth);
  positive("workspace_limit_mm", c.workspace_limit);
  rc.output_dir = r.scalar_or<std::string>(root, "output_dir", "out");
  if (rc.output_dir.is_relative()) rc.output_dir = path.parent_path() / rc.output_dir;

  if (const YAML::Node n = root["noise"]) {
    r.require_map(n, "noise");
    r.allow_keys(n, {"sigma_mm_deg", "aliasing_threshold_mm", "aliasing_variance_factor"});
    if (n["sigma_mm_deg"]) c.noise.sigma = r.vec<6>(n, "sigma_mm_deg");
    c.noise.aliasing_slip_threshold = r.scalar_or(n, "aliasing_threshold_mm", c.noise.aliasing_slip_threshold);
    c.noise.aliasing_variance_factor = r.scalar_or(n, "aliasing_variance_factor", c.noise.aliasing_variance_factor);
  }
  if (const YAML::Node s = root["shape"]) {
    using sim::Shape;
    c.shape = detail::parse_enum<Shape>(r, s, "shape",
                                        {{"blue_square", Shape::blue_square},
                                         {"blue_circle", Shape::blue_circle},
                                         {"red_square", Shape::red_square},
                                         {"yellow_hexagon", Shape::yellow_hexagon}});
  }
  if (const YAML::Node h = root["object_height"]) {
    const bool tall = detail::parse_enum<bool>(r, h, "object_height", {{"short", false}, {"tall", true}});
    if (tall) c = sim::with_tall_object(c);
  }
  r.checked(root, [&] { c.validate(); });
  return rc;
}

}  // namespace tactile::io
