#pragma once

// Closed-loop task simulations: sense -> filter -> control -> move.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tactile/bayes_filter.hpp"
#include "tactile/gains.hpp"
#include "tactile/sensing.hpp"
#include "tactile/sim/arm.hpp"
#include "tactile/sim/contact.hpp"
#include "tactile/sim/object.hpp"

namespace tactile::sim {

enum class Task { track, follow_ramp, follow_hemisphere, push_single, push_dual };
enum class Shape { blue_square, blue_circle, red_square, yellow_hexagon };

inline const char* task_name(Task t) {
  switch (t) {
    case Task::track: return "track";
    case Task::follow_ramp: return "follow_ramp";
    case Task::follow_hemisphere: return "follow_hemisphere";
    case Task::push_single: return "push_single";
    case Task::push_dual: return "push_dual";
  }
  return "?";
}

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::blue_square: return "blue_square";
    case Shape::blue_circle: return "blue_circle";
    case Shape::red_square: return "red_square";
    case Shape::yellow_hexagon: return "yellow_hexagon";
  }
  return "?";
}

/// Footprint and initial heading (deg) presenting a flat face to a -y push.
inline std::pair<Footprint, double> shape_footprint(Shape s) {
  switch (s) {
    case Shape::blue_square: return {Footprint::square(80), 0.0};
    case Shape::blue_circle: return {Footprint::circle(80), 0.0};
    case Shape::red_square: return {Footprint::square(60), 0.0};
    case Shape::yellow_hexagon: return {Footprint::regular_polygon(6, 45), 30.0};
  }
  throw std::invalid_argument("unknown shape");
}

struct TrackingLeader {
  Vector6d amplitude = gains::v6(75, 75, 75, 25, 25, 25);  // mm, deg
  Vector6d phase = gains::v6(kPi / 2, 0, 0, 0, 0, 0);       // rad
  double period = 30.0;                                       // s

  /// Leader plate pose at time t (position integral of the velocity profile).
  Pose pose(double t) const {
    Vector6d q;
    for (int j = 0; j < 6; ++j) {
      q(j) = amplitude(j) * (std::sin(2 * kPi * t / period + phase(j)) - std::sin(phase(j)));
    }
    return pose_from_euler6_deg(q);
  }
};

struct TaskConfig {
  Task task = Task::follow_ramp;
  double dt = 1.0 / 30.0;            // s
  long step_budget = 10000;
  double duration = 0.0;             // s; 0 runs until the task completes
  double sigma_phi = kDefaultSigmaPhi;  // filter dynamics noise, mm and deg per step
  SurrogateNoiseProfile noise = SurrogateNoiseProfile::calibrated();
  ShearLimits shear;
  double workspace_limit = 1000.0;   // mm from the world origin
  double initial_depth = 1.5;        // mm

  gains::ServoPreset servo;          // active arm
  gains::ServoPreset follower;       // passive arm (dual push)
  ScalarPidConfig align;
  double align_cutoff = 120.0;       // mm
  double done_radius = 20.0;         // mm

  RampSurface ramp;
  double ramp_approach = 100.0;      // mm of flat before and after the hump
  HemisphereSurface dome;
  double heading = 0.0;              // deg, radial direction on the dome
  TrackingLeader leader;

  Shape shape = Shape::blue_square;
  HeightClass height = HeightClass::short_object;
  PushModel push;
  Vector2d start{-250, 100};         // sensor (y, z), mm
  Vector2d target{0, 375};           // (y, z), mm
  double sensor_height = 45.0;       // mm above the support plane

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("dt must be positive");
    if (step_budget <= 0) throw std::invalid_argument("step budget must be positive");
    if (!(sigma_phi > 0)) throw std::invalid_argument("sigma_phi must be positive");
    if (!(initial_depth > 0 && initial_depth < kTipRadius)) throw std::invalid_argument("initial depth out of range");
    if (duration < 0) throw std::invalid_argument("duration must be >= 0");
    if (!(noise.sigma.array() > 0).all()) throw std::invalid_argument("noise sigmas must be positive");
    servo.pid.validate();
    follower.pid.validate();
    align.validate();
    if (!(push.kappa >= 0 && push.yield_depth > 0)) throw std::invalid_argument("bad push model");
    if (!(leader.period > 0)) throw std::invalid_argument("leader period must be positive");
    if (!(dome.radius > kTipRadius)) throw std::invalid_argument("dome radius must exceed tip radius");
    if (!(ramp.wavelength > 0)) throw std::invalid_argument("ramp wavelength must be positive");
  }
};

/// `heading` (deg) selects the radial path for follow_hemisphere.
inline TaskConfig default_config(Task task, double heading = 0.0) {
  TaskConfig c;
  c.task = task;
  c.heading = heading;
  switch (task) {
    case Task::track:
      c.servo = gains::tracking();
      c.initial_depth = 6.0;
      c.duration = 60.0;
      break;
    case Task::follow_ramp: c.servo = gains::ramp_following(); break;
    case Task::follow_hemisphere: c.servo = gains::hemisphere_following(heading); break;
    case Task::push_single:
    case Task::push_dual: {
      c.servo = gains::pushing();
      c.follower = gains::stabiliser();
      c.align = gains::alignment(task == Task::push_dual);
      break;
    }
  }
  if (task != Task::push_dual) c.follower = gains::stabiliser();
  if (task != Task::push_single && task != Task::push_dual) c.align = gains::alignment(false);
  return c;
}

/// Tall objects: same dynamics, references shifted per the dual-arm tables.
inline TaskConfig with_tall_object(TaskConfig c) {
  c.height = HeightClass::tall_object;
  gains::apply_tall_offsets(c.servo, c.follower);
  return c;
}

struct LogRow {
  double t = 0;
  Vector6d arm = Vector6d::Zero();        // active sensor pose: xyz mm, extrinsic xyz deg
  Vector6d aux = Vector6d::Zero();        // leader plate, or passive sensor pose
  Eigen::Vector3d object = Eigen::Vector3d::Zero();  // y, z mm, heading deg
  bool contact = false;
  Vector6d true_contact = Vector6d::Zero();  // mm, deg
  Vector6d observed = Vector6d::Zero();      // twist mm, rad
  Vector6d filtered = Vector6d::Zero();      // twist mm, rad
  Vector6d cov_diag = Vector6d::Zero();
  Vector6d control = Vector6d::Zero();       // mm/s, deg/s
  double bearing = 0;                        // deg
  double distance = 0;                       // mm
  double aux_depth = 0;                      // passive arm depth, mm
};

enum class Termination { completed, target_reached, duration, step_budget, workspace };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::target_reached: return "target_reached";
    case Termination::duration: return "duration";
    case Termination::step_budget: return "step_budget";
    case Termination::workspace: return "workspace_exceeded";
  }
  return "?";
}

struct TrajectoryLog {
  Task task = Task::follow_ramp;
  std::uint64_t seed = 0;
  std::vector<LogRow> rows;
  Termination termination = Termination::step_budget;
  std::string diagnostic;
  double final_miss = NAN;  // mm, pushing only

  bool aborted() const { return termination == Termination::workspace; }
};

namespace detail {

/// One sensing arm: contact state, filter, controller memory, noise stream.
struct Agent {
  ArmState arm;
  ShearState shear;
  std::optional<FilterState> filter;
  PidState pid;
  ScalarPidState align;
  std::mt19937_64 rng;
  std::optional<ContactReading> reading;
  std::optional<TangentGaussian> obs;

  /// Sense and filter at the current arm pose.
  void sense(const Surface& s, const TaskConfig& cfg) {
    reading = true_contact(s, arm.end_effector, shear, cfg.shear);
    obs.reset();
    std::optional<PoseBelief> belief;
    if (reading) {
      obs = surrogate_observe(reading->contact, cfg.noise, rng);
      belief = belief_from_tangent(*obs);
    }
    if (!filter) {
      if (belief) filter = filter_init(*belief, arm.end_effector);
      return;
    }
    filter = filter_step(*filter, belief, arm.end_effector, DynamicsNoise::isotropic(cfg.sigma_phi));
  }
};

inline Pose sensor_pose(const Eigen::Matrix3d& r, const Vector3d& p) { return Pose::unchecked(r, p); }

/// Sensor pointing down (-z world), sensor y along world +y.
inline Eigen::Matrix3d facing_down() {
  Eigen::Matrix3d r;
  r << -1, 0, 0, 0, 1, 0, 0, 0, -1;
  return r;
}

/// Sensor x up (world +x), pointing along the planar direction (dy, dz).
inline Eigen::Matrix3d facing_planar(const Vector2d& dir) {
  const Vector3d z(0, dir.x(), dir.y());
  const Vector3d x = Vector3d::UnitX();
  Eigen::Matrix3d r;
  r << x, z.cross(x), z;
  return r;
}

/// Extent of a footprint from its centroid along world direction d.
inline double support(const ObjectState& o, const Vector2d& d) {
  if (o.footprint.is_circle()) return o.footprint.circle_radius;
  double best = -INFINITY;
  for (const auto& v : o.footprint.vertices) best = std::max(best, (o.pose.rotation() * v).dot(d));
  return best;
}

inline void fill_agent_columns(const Agent& a, LogRow& row) {
  row.arm = euler6_deg_from_pose(a.arm.end_effector);
  row.contact = a.reading.has_value();
  if (a.reading) row.true_contact = a.reading->contact.as_vector();
  if (a.obs) row.observed = a.obs->mu;
  if (a.filter) {
    row.filtered = log_map(a.filter->filtered.mean);
    row.cov_diag = a.filter->filtered.cov.diagonal();
  }
}

/// Seek the surface along the sensor axis while no estimate exists.
inline Twist approach_twist() { return gains::v6(0, 0, 5, 0, 0, 0); }

}  // namespace detail

/// Perpendicular distance from a point to the line through `p` along `dir`.
inline double line_miss(const Vector2d& p, const Vector2d& dir, const Vector2d& target) {
  const Vector2d d = dir.normalized();
  const Vector2d r = target - p;
  return std::abs(r.x() * d.y() - r.y() * d.x());
}

inline TrajectoryLog run_task(const TaskConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  TrajectoryLog log;
  log.task = cfg.task;
  log.seed = seed;

  std::seed_seq seq{seed, std::uint64_t(0x7ac7), std::uint64_t(cfg.task)};
  std::uint64_t seeds[2];
  seq.generate(seeds, seeds + 2);
  detail::Agent active{}, passive{};
  active.rng.seed(seeds[0]);
  passive.rng.seed(seeds[1]);

  const bool pushing = cfg.task == Task::push_single || cfg.task == Task::push_dual;
  const bool dual = cfg.task == Task::push_dual;
  const double r0 = kTipRadius - cfg.initial_depth;

  Surface surface;
  ObjectState object;
  double traverse_end = INFINITY;
  switch (cfg.task) {
    case Task::track:
      surface = PlaneSurface{cfg.leader.pose(0)};
      active.arm.end_effector = detail::sensor_pose(detail::facing_down(), {0, 0, r0});
      break;
    case Task::follow_ramp: {
      surface = cfg.ramp;
      const double y0 = cfg.ramp.start_y - cfg.ramp_approach;
      active.arm.end_effector = detail::sensor_pose(detail::facing_down(), {0, y0, r0});
      traverse_end = cfg.ramp.start_y + cfg.ramp.wavelength + cfg.ramp_approach;
      break;
    }
    case Task::follow_hemisphere:
      surface = cfg.dome;
      active.arm.end_effector =
          detail::sensor_pose(detail::facing_down(), cfg.dome.center + Vector3d(0, 0, cfg.dome.radius + r0));
      traverse_end = cfg.dome.radius;
      break;
    case Task::push_single:
    case Task::push_dual: {
      const auto [fp, heading] = shape_footprint(cfg.shape);
      object.footprint = fp;
      object.height = cfg.height;
      object.pose.heading = heading;
      const Vector2d ahead(1, 0);
      object.pose.y = cfg.start.x();
      object.pose.z = cfg.start.y();
      object.pose.y += r0 + detail::support(object, -ahead);
      surface = ObjectFaceSurface{object};
      active.arm.end_effector = detail::sensor_pose(
          detail::facing_planar(ahead), {cfg.sensor_height, cfg.start.x(), cfg.start.y()});
      const Vector2d far = object.pose.position() + (detail::support(object, ahead) + r0) * ahead;
      passive.arm.end_effector =
          detail::sensor_pose(detail::facing_planar(-ahead), {cfg.sensor_height, far.x(), far.y()});
      break;
    }
  }

  PushConfig push_cfg;
  push_cfg.servo = cfg.servo.servo();
  push_cfg.servo_pid = cfg.servo.pid;
  push_cfg.align_pid = cfg.align;
  push_cfg.align_cutoff = cfg.align_cutoff;
  push_cfg.done_radius = cfg.done_radius;
  const ServoConfig servo_cfg = cfg.servo.servo();
  const ServoConfig follower_cfg = cfg.follower.servo();
  const Pose target_pose = Pose::from_translation({cfg.sensor_height, cfg.target.x(), cfg.target.y()});

  log.termination = Termination::step_budget;
  for (long k = 0; k < cfg.step_budget; ++k) {
    const double t = double(k) * cfg.dt;
    if (cfg.duration > 0 && t >= cfg.duration) {
      log.termination = Termination::duration;
      break;
    }
    LogRow row;
    row.t = t;
    if (cfg.task == Task::track) {
      const Pose plate = cfg.leader.pose(t);
      surface = PlaneSurface{plate};
      row.aux = euler6_deg_from_pose(plate);
    }
    if (pushing) {
      surface = ObjectFaceSurface{object};
      row.object = {object.pose.y, object.pose.z, object.pose.heading};
    }

    active.sense(surface, cfg);
    detail::fill_agent_columns(active, row);

    Twist u = detail::approach_twist();
    bool done = false;
    if (active.filter) {
      if (pushing) {
        const PushResult r = push_control(push_cfg, {active.pid, active.align}, active.filter->filtered.mean,
                                          active.arm.end_effector, target_pose, cfg.dt);
        u = r.u;
        active.pid = r.state.servo;
        active.align = r.state.align;
        row.bearing = r.target.bearing;
        row.distance = r.target.distance;
        done = r.done;
      } else {
        const ServoResult r =
            servo_control(servo_cfg, cfg.servo.pid, active.pid, active.filter->filtered.mean, cfg.dt);
        u = r.u;
        active.pid = r.state;
      }
    }
    row.control = twist_rad_to_deg(u);

    Twist u_passive = detail::approach_twist();
    if (dual) {
      passive.sense(surface, cfg);
      row.aux = euler6_deg_from_pose(passive.arm.end_effector);
      row.aux_depth = passive.reading ? passive.reading->contact.z : 0.0;
      if (passive.filter) {
        const ServoResult r =
            servo_control(follower_cfg, cfg.follower.pid, passive.pid, passive.filter->filtered.mean, cfg.dt);
        u_passive = r.u;
        passive.pid = r.state;
      }
    }
    log.rows.push_back(row);

    if (done) {
      log.termination = Termination::target_reached;
      if (active.reading) {
        const SurfacePoint& sp = active.reading->surface;
        log.final_miss = line_miss({sp.point.y(), sp.point.z()}, {-sp.normal.y(), -sp.normal.z()}, cfg.target);
      }
      break;
    }

    active.arm = integrate_arm(active.arm, u, cfg.dt);
    if (dual) passive.arm = integrate_arm(passive.arm, u_passive, cfg.dt);

    if (pushing) {
      const Vector3d c = active.arm.end_effector.translation();
      const SurfacePoint sp = closest_point(ObjectFaceSurface{object}, c);
      const double excess = kTipRadius - sp.height(c) - cfg.push.yield_depth;
      if (excess > 0) {
        object = step_pushed_object(object, {sp.point.y(), sp.point.z()},
                                    Vector2d(-sp.normal.y(), -sp.normal.z()).normalized(), excess, cfg.push);
      }
    }

    const Vector3d p = active.arm.end_effector.translation();
    if (p.norm() > cfg.workspace_limit ||
        (dual && passive.arm.end_effector.translation().norm() > cfg.workspace_limit)) {
      log.termination = Termination::workspace;
      log.diagnostic = "arm left the workspace at t=" + std::to_string(t + cfg.dt) + " s";
      break;
    }
    if (cfg.task == Task::follow_ramp && p.y() > traverse_end) {
      log.termination = Termination::completed;
      break;
    }
    if (cfg.task == Task::follow_hemisphere && Eigen::Vector2d(p.x(), p.y()).norm() > traverse_end) {
      log.termination = Termination::completed;
      break;
    }
  }
  return log;
}

}  // namespace tactile::sim
