// Push each object toward the target with one or two arms.

#include <fmt/format.h>

#include "tactile/sim/tasks.hpp"

using namespace tactile;

int main() {
  for (sim::Task task : {sim::Task::push_single, sim::Task::push_dual}) {
    for (sim::Shape shape : {sim::Shape::blue_square, sim::Shape::blue_circle, sim::Shape::red_square,
                             sim::Shape::yellow_hexagon}) {
      sim::TaskConfig cfg = sim::default_config(task);
      cfg.shape = shape;
      const auto log = sim::run_task(cfg, 1);
      const auto& end = log.rows.back();
      fmt::print("{:12} {:15} {:15} {:5} steps, object at ({:7.1f}, {:6.1f}) heading {:6.1f} deg, miss {:5.2f} mm\n",
                 sim::task_name(task), sim::shape_name(shape), sim::termination_name(log.termination),
                 log.rows.size(), end.object(0), end.object(1), end.object(2), log.final_miss);
    }
  }
}
