// Slide the sensor over the ramp at 3 mm depth and print a trace.

#include <fmt/format.h>

#include "tactile/sim/tasks.hpp"

using namespace tactile;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 1;
  const sim::TaskConfig cfg = sim::default_config(sim::Task::follow_ramp);
  const sim::TrajectoryLog log = sim::run_task(cfg, seed);
  fmt::print("{:>6} {:>9} {:>9} {:>8} {:>8} {:>8}\n", "t s", "y mm", "z mm", "depth", "alpha", "beta");
  for (std::size_t i = 0; i < log.rows.size(); i += 60) {
    const auto& r = log.rows[i];
    fmt::print("{:6.1f} {:9.2f} {:9.2f} {:8.3f} {:8.3f} {:8.3f}\n", r.t, r.arm(1), r.arm(2), r.true_contact(2),
               r.true_contact(3), r.true_contact(4));
  }
  fmt::print("{} after {} steps\n", sim::termination_name(log.termination), log.rows.size());
}
