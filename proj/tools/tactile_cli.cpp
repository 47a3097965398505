// tactile: run simulated tasks, sweep filter noise, generate contact datasets.
//
// Exit codes: 0 success, 1 bad input or I/O failure, 2 aborted run.

#include <random>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "tactile/io/output.hpp"

using namespace tactile;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kBadInput = 1, kAborted = 2;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool validate_only = false;
};

struct SweepArgs {
  std::vector<double> levels{10.0, 1.0, 0.1, 0.01};
  std::uint64_t seed = 1;
  std::size_t steps = 2000;
  std::string out = "filter_sweep.csv";
  bool validate_only = false;
};

struct DatasetArgs {
  std::size_t n = 0;
  std::string out;
  std::uint64_t seed = 1;
  bool validate_only = false;
};

int cmd_run(const RunArgs& a) {
  io::RunConfig rc = io::load_run_config(a.config);
  if (a.seed) rc.seed = *a.seed;
  if (a.out_dir) rc.output_dir = *a.out_dir;
  if (a.validate_only) {
    fmt::print("{}: ok ({}, seed {})\n", a.config, sim::task_name(rc.task.task), rc.seed);
    return kOk;
  }
  const auto log = sim::run_task(rc.task, rc.seed);
  fs::create_directories(rc.output_dir);
  const std::string stem = fmt::format("{}_seed{}", sim::task_name(rc.task.task), rc.seed);
  io::write_atomic(rc.output_dir / (stem + ".csv"), io::trajectory_csv(log));
  io::write_atomic(rc.output_dir / (stem + ".json"), io::run_metadata_json(rc, log, stem + ".csv"));
  fmt::print("{}: {} after {} steps", stem, sim::termination_name(log.termination), log.rows.size());
  if (std::isfinite(log.final_miss)) fmt::print(", miss {:.2f} mm", log.final_miss);
  fmt::print("\n");
  if (log.aborted()) {
    fmt::print(stderr, "run aborted: {}\n", log.diagnostic);
    return kAborted;
  }
  return kOk;
}

int cmd_filter_sweep(const SweepArgs& a) {
  SweepOptions o;
  o.levels = a.levels;
  o.seed = a.seed;
  o.steps = a.steps;
  for (double l : o.levels) {
    if (!(l > 0)) throw std::invalid_argument(fmt::format("--levels: {} is not positive", l));
  }
  if (o.steps < 2) throw std::invalid_argument("--steps must be at least 2");
  if (a.validate_only) {
    fmt::print("filter-sweep: ok ({} levels, {} steps)\n", o.levels.size(), o.steps);
    return kOk;
  }
  const auto levels = run_filter_sweep(o);
  io::write_atomic(a.out, io::sweep_csv(levels));
  fmt::print("{:>10} {:>34} {:>34}\n", "sigma_psi", "raw MAE (mm x3, deg x3)", "filtered MAE");
  for (const auto& l : levels) {
    fmt::print("{:>10g}", l.sigma_psi);
    for (const auto* v : {&l.raw_mae, &l.filtered_mae}) {
      fmt::print("  ");
      for (int i = 0; i < 6; ++i) fmt::print("{:6.3f}", (*v)(i));
    }
    fmt::print("\n");
  }
  return kOk;
}

int cmd_gen_dataset(const DatasetArgs& a) {
  if (a.n == 0) throw std::invalid_argument("--n must be positive");
  if (a.validate_only) {
    fmt::print("gen-dataset: ok ({} rows)\n", a.n);
    return kOk;
  }
  std::mt19937_64 rng(a.seed);
  const auto data = generate_dataset(rng, a.n);
  const fs::path out = a.out;
  io::write_atomic(out, io::dataset_csv(data));
  fs::path meta = out;
  meta.replace_extension(".json");
  io::write_atomic(meta, io::dataset_metadata_json(a.n, a.seed, DatasetRanges{}));
  fmt::print("wrote {} rows to {}\n", a.n, out.string());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile servoing and filtering toolkit"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a simulated task from a YAML run file");
  run_cmd->add_option("config", run.config, "Run file")->required();
  run_cmd->add_option("--seed", run.seed, "Override the run file's seed");
  run_cmd->add_option("--out-dir", run.out_dir, "Override the output directory");
  run_cmd->add_flag("--validate-only", run.validate_only, "Parse and check the config, then exit");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("filter-sweep", "Raw vs filtered MAE across dynamics noise levels");
  sweep_cmd->add_option("--levels", sweep.levels, "sigma_psi levels (mm, deg)")->capture_default_str();
  sweep_cmd->add_option("--seed", sweep.seed)->capture_default_str();
  sweep_cmd->add_option("--steps", sweep.steps, "Observation sequence length")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Summary CSV")->capture_default_str();
  sweep_cmd->add_flag("--validate-only", sweep.validate_only);

  DatasetArgs dataset;
  auto* dataset_cmd = app.add_subcommand("gen-dataset", "Sample labelled contact poses to CSV");
  dataset_cmd->add_option("--n", dataset.n, "Number of samples")->required();
  dataset_cmd->add_option("--out", dataset.out, "Output CSV")->required();
  dataset_cmd->add_option("--seed", dataset.seed)->capture_default_str();
  dataset_cmd->add_flag("--validate-only", dataset.validate_only);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_filter_sweep(sweep);
    if (*dataset_cmd) return cmd_gen_dataset(dataset);
  } catch (const io::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
  } catch (const io::WriteError& e) {
    fmt::print(stderr, "write error: {}\n", e.what());
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "filesystem error: {}\n", e.what());
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "invalid argument: {}\n", e.what());
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
  }
  return kBadInput;
}
