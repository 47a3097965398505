// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>

#include "oracles.hpp"
#include "tactile/io/output.hpp"

using namespace tactile;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome lie_core() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  double round_trip = 0;
  for (int i = 0; i < 100000; ++i) {
    const Twist t = oracle::random_twist(rng, 10.0, 3.0);
    round_trip = std::max(round_trip, (log_map(exp_map(t)) - t).norm());
  }
  double homomorphism = 0;
  int bijection_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const Pose a = exp_map(oracle::random_twist(rng, 10.0, 3.0));
    const Pose b = exp_map(oracle::random_twist(rng, 10.0, 3.0));
    homomorphism = std::max(homomorphism, (adjoint(a * b) - adjoint(a) * adjoint(b)).cwiseAbs().maxCoeff());
    const Twist t = oracle::random_twist(rng, 50.0, 3.0);
    const Eigen::Matrix4d m = oracle::hat4(t);
    bijection_failures += !(vee(hat(t)) == t && hat(vee(m)) == m);
  }
  const double secs = seconds_since(t0);
  return {round_trip < 1e-9 && homomorphism < 1e-9 && bijection_failures == 0 && secs < 10,
          fmt::format("round trip max {:.2e} over 1e5, Ad(ab)-Ad(a)Ad(b) max {:.2e}, hat/vee failures {}, {:.2f} s",
                      round_trip, homomorphism, bijection_failures, secs)};
}

Outcome bch_accuracy() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> u01;
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    Twist other = oracle::random_twist(rng, 1.0, 1.0);
    Twist small = oracle::random_twist(rng, 1.0, 1.0);
    other *= 0.3 * u01(rng) / other.norm();
    small *= 0.05 * u01(rng) / small.norm();
    const bool first = i % 2 == 0;
    const Twist exact = first ? log_map(exp_map(small) * exp_map(other)) : log_map(exp_map(other) * exp_map(small));
    const Twist approx = first ? bch_compose(small, other, SmallArgument::first)
                               : bch_compose(other, small, SmallArgument::second);
    worst = std::max(worst, (approx - exact).norm());
  }
  return {worst < 1e-4, fmt::format("max error {:.2e} over 1e4 pairs (small <= 0.05, other <= 0.3)", worst)};
}

Outcome fusion() {
  std::mt19937_64 rng(103);
  // (a) identical factors
  double a_mean = 0, a_cov = 0;
  for (int i = 0; i < 100; ++i) {
    const PoseBelief b{exp_map(oracle::random_twist(rng, 20, 2)), oracle::random_spd(rng, 1)};
    const FusionResult r = fuse(b, b);
    a_mean = std::max(a_mean, (r.belief.mean.matrix() - b.mean.matrix()).cwiseAbs().maxCoeff());
    a_cov = std::max(a_cov, (r.belief.cov - 0.5 * b.cov).cwiseAbs().maxCoeff() / b.cov.cwiseAbs().maxCoeff());
  }
  // (b) Euclidean limit against the vector-space Gaussian product
  double b_mean = 0;
  for (int i = 0; i < 100; ++i) {
    Twist x = oracle::random_twist(rng, 1, 1), y = oracle::random_twist(rng, 1, 1);
    x *= 1e-3 / x.norm();
    y *= 1e-3 / y.norm();
    const Matrix6d sx = oracle::random_spd(rng, 1), sy = oracle::random_spd(rng, 1);
    const auto [m, c] = oracle::gaussian_product(x, sx, y, sy);
    b_mean = std::max(b_mean, (log_map(fuse({exp_map(x), sx}, {exp_map(y), sy}).belief.mean) - m).norm());
  }
  const Twist off = (Twist() << 1e-3, 0, 0, 0, 0, 0).finished();
  const FusionResult iso = fuse({Pose::identity(), Matrix6d::Identity()}, {exp_map(off), Matrix6d::Identity()});
  const double b_iso = std::max((log_map(iso.belief.mean) - 0.5 * off).norm(),
                                (iso.belief.cov - 0.5 * Matrix6d::Identity()).norm());
  // (c) iterations for offsets up to 0.1
  int worst_iter = 0, unconverged = 0;
  for (int i = 0; i < 1000; ++i) {
    const Pose base = exp_map(oracle::random_twist(rng, 20, 2));
    Twist o = oracle::random_twist(rng, 1, 1);
    o *= 0.1 * std::uniform_real_distribution<double>(0, 1)(rng) / o.norm();
    const FusionResult r = fuse({base, oracle::random_spd(rng, 1)}, {exp_map(o) * base, oracle::random_spd(rng, 1)});
    worst_iter = std::max(worst_iter, r.iterations);
    unconverged += !r.converged;
  }
  const bool pass = a_mean == 0 && a_cov < 1e-14 && b_mean < 1e-6 && b_iso < 1e-6 && worst_iter <= 4 && unconverged == 0;
  return {pass, fmt::format("(a) mean diff {:.1e}, cov rel diff {:.1e}; (b) Gaussian-product gap {:.1e}, "
                            "isotropic gap {:.1e}; (c) max iterations {} over 1000, unconverged {}",
                            a_mean, a_cov, b_mean, b_iso, worst_iter, unconverged)};
}

Outcome filter_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  bool monotone = true;
  double worst_ratio = INFINITY;
  Vector6d mean_raw = Vector6d::Zero(), mean_filt = Vector6d::Zero();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SweepOptions o;
    o.seed = seed;
    const auto levels = run_filter_sweep(o);
    for (std::size_t i = 1; i < levels.size(); ++i) {
      monotone = monotone && (levels[i].filtered_mae.array() < levels[i - 1].filtered_mae.array()).all();
    }
    const auto& last = levels.back();
    worst_ratio = std::min(worst_ratio, (last.raw_mae.array() / last.filtered_mae.array()).minCoeff());
    mean_raw += last.raw_mae / 5;
    mean_filt += last.filtered_mae / 5;
  }
  const double secs = seconds_since(t0);
  return {monotone && worst_ratio >= 3 && secs < 60,
          fmt::format("monotone over 10,1,0.1,0.01: {}; min raw/filtered at 0.01 = {:.2f}x; v_x {:.3f} -> {:.3f} mm; "
                      "5 seeds x 2000 steps in {:.1f} s",
                      monotone ? "yes" : "no", worst_ratio, mean_raw(0), mean_filt(0), secs)};
}

Outcome surrogate_calibration() {
  std::mt19937_64 rng(105);
  const auto profile = SurrogateNoiseProfile::calibrated().without_aliasing();
  Vector6d sum = Vector6d::Zero();
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const ContactPose c = sample_contact(rng);
    sum += twist_rad_to_deg(surrogate_observe(c, profile, rng).mu - pose_to_inverted_tangent(c)).cwiseAbs();
  }
  const Vector6d ratio = (sum / n).cwiseQuotient(SurrogateNoiseProfile::target_mae());
  const double worst = (ratio.array() - 1).abs().maxCoeff();
  return {worst <= 0.05, fmt::format("MAE {:.3f} {:.3f} {:.3f} mm, {:.3f} {:.3f} {:.3f} deg; worst deviation {:.1f}%",
                                     sum(0) / n, sum(1) / n, sum(2) / n, sum(3) / n, sum(4) / n, sum(5) / n, 100 * worst)};
}

Outcome ramp_steady_state() {
  const io::RunConfig rc = io::load_run_config(fs::path(TACTILE_SOURCE_DIR) / "config" / "follow_ramp.yaml");
  double worst_depth = 0, worst_tilt = 0;
  bool completed = true, deterministic = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto log = sim::run_task(rc.task, seed);
    const auto again = sim::run_task(rc.task, seed);
    completed = completed && log.termination == sim::Termination::completed;
    deterministic = deterministic && log.rows.size() == again.rows.size();
    for (std::size_t i = 0; deterministic && i < log.rows.size(); ++i) {
      deterministic = log.rows[i].arm == again.rows[i].arm && log.rows[i].control == again.rows[i].control;
    }
    double depth = 0, tilt = 0;
    int n = 0;
    for (const auto& r : log.rows) {
      if (r.t < 5.0 || !r.contact) continue;
      depth += r.true_contact(2);
      tilt += std::hypot(r.true_contact(3), r.true_contact(4));
      ++n;
    }
    worst_depth = std::max(worst_depth, std::abs(depth / n - 3.0));
    worst_tilt = std::max(worst_tilt, tilt / n);
  }
  return {completed && deterministic && worst_depth <= 0.2 && worst_tilt < 1.0,
          fmt::format("5 seeds: worst |mean depth - 3| {:.3f} mm, worst mean tilt {:.2f} deg, full traverse {}, "
                      "deterministic {}",
                      worst_depth, worst_tilt, completed ? "yes" : "no", deterministic ? "yes" : "no")};
}

Outcome pushing() {
  int reached = 0, total = 0;
  double worst_miss = 0;
  long worst_steps = 0;
  std::string failures;
  for (sim::Task task : {sim::Task::push_single, sim::Task::push_dual}) {
    for (sim::Shape shape : {sim::Shape::blue_square, sim::Shape::blue_circle, sim::Shape::red_square,
                             sim::Shape::yellow_hexagon}) {
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        sim::TaskConfig c = sim::default_config(task);
        c.shape = shape;
        const auto log = sim::run_task(c, seed);
        ++total;
        const bool ok = log.termination == sim::Termination::target_reached && log.final_miss < 20.0;
        reached += ok;
        if (!ok) failures += fmt::format(" {}/{}/{}", sim::task_name(task), sim::shape_name(shape), seed);
        if (std::isfinite(log.final_miss)) worst_miss = std::max(worst_miss, log.final_miss);
        worst_steps = std::max(worst_steps, long(log.rows.size()));
      }
    }
  }
  return {reached == total, fmt::format("{}/{} runs reached the target (4 shapes x single/dual x 5 seeds); worst miss "
                                        "{:.1f} mm; max steps {} of 10000{}",
                                        reached, total, worst_miss, worst_steps,
                                        failures.empty() ? "" : "; failed:" + failures)};
}

Outcome formula_units() {
  double worst = 0;
  // softbound: identity inside the bounds' linear region, limits outside
  worst = std::max(worst, std::abs(softbound(5, 0, 10) - 5.0));
  worst = std::max(worst, std::abs(softbound(100, 0, 10) - 10.0));
  worst = std::max(worst, std::abs(softbound(-100, 0, 10)));
  worst = std::max(worst, std::abs(softplus(40.0) - (40.0 + softplus(-40.0))));
  // weighted MSE vs NLL with fixed precision
  std::mt19937_64 rng(108);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.2, 5);
  Vector6d inv_sigma;
  for (int j = 0; j < 6; ++j) inv_sigma(j) = u(rng);
  std::vector<Vector6d> mu, labels, inv;
  for (int i = 0; i < 100; ++i) {
    Vector6d m, l;
    for (int j = 0; j < 6; ++j) m(j) = n01(rng), l(j) = n01(rng);
    mu.push_back(m);
    labels.push_back(l);
    inv.push_back(inv_sigma);
  }
  const double nll = gdn_nll(mu, inv, labels);
  const double mse = weighted_mse(mu, labels, inv_sigma.cwiseAbs2());
  worst = std::max(worst, std::abs(nll - (0.5 * mse - inv_sigma.array().log().sum())));
  // NLL is the negative log of the product of univariate normal densities
  double pdf_gap = 0;
  for (int i = 0; i < 100; ++i) {
    double pdf = 1;
    for (int j = 0; j < 6; ++j) {
      const double r = inv[i](j) * (labels[i](j) - mu[i](j));
      pdf *= inv[i](j) / std::sqrt(2 * kPi) * std::exp(-0.5 * r * r);
    }
    const double one = gdn_nll(std::vector{mu[i]}, std::vector{inv[i]}, std::vector{labels[i]});
    pdf_gap = std::max(pdf_gap, std::abs(std::exp(-one - 3 * std::log(2 * kPi)) - pdf) / pdf);
  }
  worst = std::max(worst, pdf_gap);
  return {worst <= 1e-12, fmt::format("max identity residual {:.1e}", worst)};
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / fmt::format("tactile_accept_{}", ::getpid());
  fs::remove_all(dir);
  const auto cli = [&](const std::string& args) {
    const std::string cmd = fmt::format("'{}' {} >/dev/null 2>&1", TACTILE_CLI, args);
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  const auto read = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  bool ok = true;
  int files = 0;
  for (const char* side : {"a", "b"}) {
    const fs::path out = dir / side;
    fs::create_directories(out);
    for (const char* f : {"track", "follow_ramp", "follow_hemisphere", "push_single", "push_dual"}) {
      const auto cfg = fs::path(TACTILE_SOURCE_DIR) / "config" / (std::string(f) + ".yaml");
      ok = ok && cli(fmt::format("run '{}' --seed 11 --out-dir '{}'", cfg.string(), out.string())) == 0;
    }
    ok = ok && cli(fmt::format("filter-sweep --seed 11 --out '{}'", (out / "sweep.csv").string())) == 0;
    ok = ok && cli(fmt::format("gen-dataset --n 6000 --seed 11 --out '{}'", (out / "data.csv").string())) == 0;
  }
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    ++files;
    ok = ok && read(e.path()) == read(dir / "b" / e.path().filename());
  }
  ok = ok && files == 13;
  fs::remove_all(dir);
  return {ok, fmt::format("{} output files from run x5, filter-sweep, gen-dataset compared byte for byte", files)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> checks[] = {
      {"Lie-core correctness", lie_core},
      {"BCH accuracy", bch_accuracy},
      {"Fusion", fusion},
      {"Filter trend", filter_trend},
      {"Surrogate calibration", surrogate_calibration},
      {"Servoing steady state", ramp_steady_state},
      {"Pushing", pushing},
      {"Formula units", formula_units},
      {"Determinism", cli_determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : checks) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("criterion {} {}: {} ({})\n", k, name, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", k - failed, k);
  return failed == 0 ? 0 : 1;
}
