// Regenerates the bundled scenario fixtures and the closed-loop corpus.
// Usage: roadbench_gen <fixtures_dir> <corpus_dir>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "roadbench/builders.hpp"
#include "roadbench/scenario.hpp"

using namespace roadbench;
namespace fs = std::filesystem;

namespace {

Scenario base_scenario(const std::string& id, const std::string& cluster) {
  Scenario sc;
  sc.id = id;
  sc.cluster = cluster;
  sc.planning_problem.time_step = 0.1;
  return sc;
}

void write(const Scenario& sc, const fs::path& dir) {
  validate_scenario(sc);
  save_scenario(sc, (dir / (sc.id + ".rbs")).string());
  std::cout << "wrote " << (dir / (sc.id + ".rbs")).string() << "\n";
}

// --- unit-test fixtures ----------------------------------------------------

Scenario minimal_straight() {
  Scenario sc = base_scenario("minimal_straight", "fixtures");
  auto l = build::straight_lanelet(1, {0, 0}, {100, 0}, 3.5);
  l.speed_limit = 13.9;
  sc.lanelets.push_back(l);
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({90, 0}, 10, 3, 0, 200);
  sc.planning_problem.max_time_steps = 200;
  return sc;
}

Scenario fig1_like() {
  // small urban map: a two-lane road bending into a side street, three
  // recorded vehicles, goal at the far end
  Scenario sc = base_scenario("fig1_like", "urban");
  Polyline main1 = {{0, 0}, {30, 0}, {60, 2}, {90, 6}};
  Polyline main2 = {{90, 6}, {110, 10}, {130, 16}};
  sc.lanelets.push_back(build::lanelet_from_centerline(1, main1, 3.5));
  sc.lanelets.push_back(build::lanelet_from_centerline(2, main2, 3.5));
  Polyline side = {{90, 6}, {95, -10}, {96, -30}};
  sc.lanelets.push_back(build::lanelet_from_centerline(3, side, 3.5));
  Polyline walk = {{0, 4.0}, {30, 4.0}, {60, 6.0}};
  sc.lanelets.push_back(build::lanelet_from_centerline(4, walk, 1.5, LaneType::walkway));
  sc.lanelets[0].successors = {2, 3};
  sc.lanelets[1].predecessors = {1};
  sc.lanelets[2].predecessors = {1};
  sc.obstacles.push_back(build::recorded_constant_velocity(10, {40, 0.7}, 0.05, 7.0, 4.4, 1.8, 300, 0.1));
  sc.obstacles.push_back(build::recorded_constant_velocity(11, {70, 3.2}, 0.15, 6.0, 4.4, 1.8, 300, 0.1));
  sc.obstacles.push_back(build::recorded_parked(12, {95, -12}, -1.5, 4.4, 1.8, 300));
  sc.planning_problem.initial_state = {5, 0, 8, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({125, 14.5}, 10, 4, 0, 300);
  sc.planning_problem.max_time_steps = 300;
  return sc;
}

Scenario two_parallel() {
  Scenario sc = base_scenario("two_parallel", "fixtures");
  auto right = build::straight_lanelet(1, {0, 0}, {160, 0}, 3.5);
  auto left = build::straight_lanelet(2, {0, 3.5}, {160, 3.5}, 3.5);
  right.adjacent_left = AdjacentRef{2, true};
  left.adjacent_right = AdjacentRef{1, true};
  right.speed_limit = 13.9;
  left.speed_limit = 13.9;
  sc.lanelets = {right, left};
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({145, 3.5}, 12, 3, 0, 300);
  sc.planning_problem.max_time_steps = 300;
  return sc;
}

Scenario crossing_overlap() {
  Scenario sc = base_scenario("crossing_overlap", "fixtures");
  auto ew = build::straight_lanelet(1, {-30, 0}, {30, 0}, 3.5);
  auto ns = build::straight_lanelet(2, {0, -30}, {0, 30}, 3.5);
  sc.lanelets = {ew, ns};
  sc.planning_problem.initial_state = {-25, 0, 5, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({25, 0}, 8, 3, 0, 200);
  sc.planning_problem.max_time_steps = 200;
  return sc;
}

Scenario disconnected() {
  Scenario sc = base_scenario("disconnected", "fixtures");
  sc.lanelets.push_back(build::straight_lanelet(1, {0, 0}, {60, 0}, 3.5));
  sc.lanelets.push_back(build::straight_lanelet(2, {0, 50}, {60, 50}, 3.5));
  sc.planning_problem.initial_state = {5, 0, 8, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({50, 50}, 10, 3, 0, 200);
  sc.planning_problem.max_time_steps = 200;
  return sc;
}

void dangling_successor(const fs::path& dir) {
  // invalid by construction: successor 99 does not exist
  std::ofstream out(dir / "dangling_successor.rbs");
  out << R"({
  "meta": {"id": "dangling_successor", "cluster": "fixtures"},
  "lanelets": [
    {
      "id": 1,
      "left_bound": [[0.0, 1.75], [50.0, 1.75]],
      "right_bound": [[0.0, -1.75], [50.0, -1.75]],
      "lane_type": "driving",
      "successors": [99],
      "predecessors": [],
      "adjacent_left": null,
      "adjacent_right": null,
      "speed_limit": null
    }
  ],
  "obstacles": [],
  "planning_problem": {
    "initial_state": {"x": 5.0, "y": 0.0, "v": 8.0, "phi": 0.0, "delta": 0.0},
    "goal_region": {
      "polygon": [[40.0, -1.5], [48.0, -1.5], [48.0, 1.5], [40.0, 1.5]],
      "velocity_interval": null,
      "time_step_interval": [0, 100]
    },
    "time_step": 0.1,
    "max_time_steps": 100
  }
}
)";
  std::cout << "wrote " << (dir / "dangling_successor.rbs").string() << "\n";
}

// --- closed-loop corpus ----------------------------------------------------

Scenario corpus_straight() {
  Scenario sc = base_scenario("corpus_01_straight", "open_road");
  auto l = build::straight_lanelet(1, {0, 0}, {170, 0}, 3.5);
  l.speed_limit = 13.9;
  sc.lanelets.push_back(l);
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({145, 0}, 14, 3, 0, 250);
  sc.planning_problem.max_time_steps = 250;
  return sc;
}

Scenario corpus_lane_change() {
  Scenario sc = base_scenario("corpus_02_lane_change", "open_road");
  auto right = build::straight_lanelet(1, {0, 0}, {180, 0}, 3.5);
  auto left = build::straight_lanelet(2, {0, 3.5}, {180, 3.5}, 3.5);
  right.adjacent_left = AdjacentRef{2, true};
  left.adjacent_right = AdjacentRef{1, true};
  right.speed_limit = 13.9;
  left.speed_limit = 13.9;
  sc.lanelets = {right, left};
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({155, 3.5}, 14, 3, 0, 300);
  sc.planning_problem.max_time_steps = 300;
  return sc;
}

Scenario corpus_following() {
  Scenario sc = base_scenario("corpus_03_following", "traffic");
  auto l = build::straight_lanelet(1, {0, 0}, {220, 0}, 3.5);
  l.speed_limit = 13.9;
  sc.lanelets.push_back(l);
  sc.obstacles.push_back(build::recorded_constant_velocity(10, {45, 0}, 0.0, 8.0, 4.3, 1.7, 320, 0.1));
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({180, 0}, 14, 3, 0, 320);
  sc.planning_problem.max_time_steps = 320;
  return sc;
}

// unsignalized crossing: ego drives east, a reactive agent crosses from the
// north; the short pre-box lanelet forks (straight / right turn) so the
// intersection guard engages on approach
Scenario crossing_base(const std::string& id, double agent_y, double agent_v, double ego_v) {
  Scenario sc = base_scenario(id, "intersection");
  auto a1 = build::straight_lanelet(1, {0, 0}, {70, 0}, 3.5);
  auto a2 = build::straight_lanelet(2, {70, 0}, {79.25, 0}, 3.5);
  auto box_straight = build::straight_lanelet(3, {79.25, 0}, {82.75, 0}, 3.5);
  Polyline turn = {{79.25, 0}, {80.3, -0.4}, {81, -1.0}, {81.45, -1.75}};
  auto box_turn = build::lanelet_from_centerline(4, turn, 3.3);
  auto d1 = build::straight_lanelet(5, {82.75, 0}, {150, 0}, 3.5);
  auto s_exit = build::straight_lanelet(6, {81.45, -1.75}, {81.45, -40}, 3.3);
  auto x1 = build::straight_lanelet(7, {81, 45}, {81, 1.75}, 3.5);
  auto xbox = build::straight_lanelet(8, {81, 1.75}, {81, -1.75}, 3.5);
  auto x2 = build::straight_lanelet(9, {81, -1.75}, {81, -45}, 3.5);
  a1.successors = {2};
  a2.successors = {3, 4};
  box_straight.successors = {5};
  box_turn.successors = {6};
  x1.successors = {8};
  xbox.successors = {9};
  a2.predecessors = {1};
  box_straight.predecessors = {2};
  box_turn.predecessors = {2};
  d1.predecessors = {3};
  s_exit.predecessors = {4};
  xbox.predecessors = {7};
  x2.predecessors = {8};
  for (auto* l : {&a1, &a2, &box_straight, &d1}) l->speed_limit = 11.0;
  for (auto* l : {&box_turn, &s_exit, &x1, &xbox, &x2}) l->speed_limit = 11.0;
  sc.lanelets = {a1, a2, box_straight, box_turn, d1, s_exit, x1, xbox, x2};
  sc.obstacles.push_back(build::reactive_obstacle(20, {81, agent_y}, -M_PI / 2.0, agent_v, 4.3, 1.7));
  sc.planning_problem.initial_state = {5, 0, ego_v, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({135, 0}, 14, 3, 0, 400);
  sc.planning_problem.max_time_steps = 400;
  return sc;
}

Scenario corpus_blocked() {
  Scenario sc = base_scenario("corpus_06_blocked", "traffic");
  auto l = build::straight_lanelet(1, {0, 0}, {130, 0}, 3.5);
  l.speed_limit = 13.9;
  sc.lanelets.push_back(l);
  sc.obstacles.push_back(build::recorded_parked(10, {70, 0}, M_PI / 2.0, 3.4, 1.8, 250));
  sc.planning_problem.initial_state = {5, 0, 10, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({105, 0}, 12, 3, 0, 250);
  sc.planning_problem.max_time_steps = 250;
  return sc;
}

Scenario curve_scenario(const std::string& id, double radius, double sweep_deg, double limit,
                        double ego_v) {
  Scenario sc = base_scenario(id, "open_road");
  double sweep = sweep_deg * M_PI / 180.0;
  Polyline cl = {{0, 0}, {15, 0}, {30, 0}};
  Vec2 center{30, radius};
  Polyline arc = build::arc_centerline(center, radius, -M_PI / 2.0, -M_PI / 2.0 + sweep, 30);
  for (size_t i = 1; i < arc.size(); ++i) cl.push_back(arc[i]);
  Vec2 end_dir{std::cos(sweep), std::sin(sweep)};
  Vec2 end = cl.back();
  cl.push_back(end + end_dir * 15.0);
  cl.push_back(end + end_dir * 30.0);
  auto l = build::lanelet_from_centerline(1, cl, 3.5);
  l.speed_limit = limit;
  sc.lanelets.push_back(l);
  sc.planning_problem.initial_state = {3, 0, ego_v, 0, 0};
  Vec2 goal = end + end_dir * 22.0;
  sc.planning_problem.goal_region = build::goal_box(goal, 12, 3.2, 0, 350);
  // axis-aligned box near the end of the curve: rotate it to the exit heading
  GoalRegion g;
  double hl = 6.0, hw = 1.6;
  Vec2 nrm = left_normal(end_dir);
  g.polygon = {goal - end_dir * hl - nrm * hw, goal + end_dir * hl - nrm * hw,
               goal + end_dir * hl + nrm * hw, goal - end_dir * hl + nrm * hw};
  g.time_step_interval = {0, 350};
  sc.planning_problem.goal_region = g;
  sc.planning_problem.max_time_steps = 350;
  return sc;
}

Scenario corpus_merge() {
  Scenario sc = base_scenario("corpus_08_merge", "merge");
  auto main_lane = build::straight_lanelet(1, {0, 0}, {170, 0}, 3.5);
  Polyline ramp_cl = {{0, 7.0}, {20, 5.0}, {40, 3.7}, {75, 3.5}};
  auto ramp = build::lanelet_from_centerline(2, ramp_cl, 3.5);
  main_lane.adjacent_left = AdjacentRef{2, true};
  ramp.adjacent_right = AdjacentRef{1, true};
  main_lane.speed_limit = 12.0;
  ramp.speed_limit = 12.0;
  sc.lanelets = {main_lane, ramp};
  sc.obstacles.push_back(build::recorded_constant_velocity(10, {5, 0}, 0.0, 9.0, 4.3, 1.7, 320, 0.1));
  sc.planning_problem.initial_state = {3, 7.0, 9, wrap_angle(std::atan2(-2.0, 20.0)), 0};
  sc.planning_problem.goal_region = build::goal_box({150, 0}, 14, 3, 0, 320);
  sc.planning_problem.max_time_steps = 320;
  return sc;
}

Scenario corpus_straight_fast() {
  Scenario sc = base_scenario("corpus_09_straight_fast", "open_road");
  auto l = build::straight_lanelet(1, {0, 0}, {240, 0}, 3.5);
  l.speed_limit = 20.0;
  sc.lanelets.push_back(l);
  sc.planning_problem.initial_state = {5, 0, 15, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({210, 0}, 16, 3, 0, 250);
  sc.planning_problem.max_time_steps = 250;
  return sc;
}

Scenario corpus_lane_change_obstacle() {
  Scenario sc = base_scenario("corpus_10_swerve", "traffic");
  auto right = build::straight_lanelet(1, {0, 0}, {180, 0}, 3.5);
  auto left = build::straight_lanelet(2, {0, 3.5}, {180, 3.5}, 3.5);
  right.adjacent_left = AdjacentRef{2, true};
  left.adjacent_right = AdjacentRef{1, true};
  right.speed_limit = 11.0;
  left.speed_limit = 11.0;
  sc.lanelets = {right, left};
  sc.obstacles.push_back(build::recorded_parked(10, {70, -0.8}, 0.0, 4.0, 1.4, 320));
  sc.planning_problem.initial_state = {5, 0, 9, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({155, 0}, 14, 3, 0, 320);
  sc.planning_problem.max_time_steps = 320;
  return sc;
}

Scenario corpus_following_slow() {
  Scenario sc = base_scenario("corpus_11_follow_slow", "traffic");
  auto l = build::straight_lanelet(1, {0, 0}, {200, 0}, 3.5);
  l.speed_limit = 13.9;
  sc.lanelets.push_back(l);
  sc.obstacles.push_back(build::recorded_constant_velocity(10, {50, 0}, 0.0, 5.0, 4.3, 1.7, 380, 0.1));
  sc.planning_problem.initial_state = {5, 0, 12, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({165, 0}, 14, 3, 0, 380);
  sc.planning_problem.max_time_steps = 380;
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: roadbench_gen <fixtures_dir> <corpus_dir>\n";
    return 1;
  }
  fs::path fixtures(argv[1]), corpus(argv[2]);
  fs::create_directories(fixtures);
  fs::create_directories(corpus);

  write(minimal_straight(), fixtures);
  write(fig1_like(), fixtures);
  write(two_parallel(), fixtures);
  write(crossing_overlap(), fixtures);
  write(disconnected(), fixtures);
  dangling_successor(fixtures);

  write(corpus_straight(), corpus);
  write(corpus_lane_change(), corpus);
  write(corpus_following(), corpus);
  write(crossing_base("corpus_04_crossing_a", 30.0, 7.0, 10.0), corpus);
  write(crossing_base("corpus_05_crossing_b", 18.0, 8.0, 8.0), corpus);
  write(corpus_blocked(), corpus);
  write(curve_scenario("corpus_07_curve", 60.0, 60.0, 8.0, 8.0), corpus);
  write(corpus_merge(), corpus);
  write(corpus_straight_fast(), corpus);
  write(corpus_lane_change_obstacle(), corpus);
  write(corpus_following_slow(), corpus);
  write(curve_scenario("corpus_12_curve_gentle", 100.0, 40.0, 10.0, 10.0), corpus);
  return 0;
}
