#pragma once

#include <random>
#include <string>

#include "roadbench/builders.hpp"
#include "roadbench/scenario.hpp"

namespace testutil {

inline std::string fixture(const std::string& name) {
  return std::string(ROADBENCH_FIXTURE_DIR) + "/" + name;
}

inline std::string corpus_dir() { return ROADBENCH_CORPUS_DIR; }

// One wide straight lanelet along +x; the workhorse road for unit tests.
inline roadbench::Scenario straight_road(double length = 200.0, double width = 3.5,
                                         double speed_limit = 13.9) {
  roadbench::Scenario sc;
  sc.id = "test_straight";
  sc.cluster = "test";
  auto l = roadbench::build::straight_lanelet(1, {0, 0}, {length, 0}, width);
  l.speed_limit = speed_limit;
  sc.lanelets.push_back(l);
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region =
      roadbench::build::goal_box({length - 20, 0}, 10, 3, 0, 500);
  sc.planning_problem.max_time_steps = 500;
  sc.planning_problem.time_step = 0.1;
  return sc;
}

}  // namespace testutil
