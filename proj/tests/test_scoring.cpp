#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "roadbench/frenet.hpp"
#include "roadbench/scoring.hpp"
#include "support/helpers.hpp"
#include "support/synthetic.hpp"

using namespace roadbench;

namespace {

Trajectory constant_speed_traj(double x0, double v, int n_states, double dt = 0.1) {
  Trajectory traj;
  traj.t0_step = 0;
  for (int k = 0; k < n_states; ++k) traj.states.push_back({x0 + v * dt * k, 0, v, 0, 0});
  return traj;
}

}  // namespace

TEST_CASE("published weights") {
  CHECK(kTr1Weights[0] == 0.01);
  CHECK(kTr1Weights[1] == 22.0);
  CHECK(kTr1Weights[2] == 8.0);
  CHECK(kTr1Weights[3] == 5.0);
  CHECK(kTr1DistanceWeight == 0.2);
}

TEST_CASE("zero-cost trajectory scores exactly zero") {
  Scenario sc = testutil::straight_road();
  Trajectory traj = constant_speed_traj(5, 10, 31);
  CostReport r = tr1_cost(traj, sc, 0.1);
  CHECK(r.J_jerk == 0.0);
  CHECK(r.J_SR == 0.0);
  CHECK(r.J_D == 0.0);
  CHECK(r.J_LC == 0.0);
  CHECK(r.J_ego == 0.0);
}

TEST_CASE("frontal obstacle at zero gap contributes dt per step") {
  Scenario sc = testutil::straight_road();
  // bumper gap exactly 0: centers (4.3 + 4.3)/2 apart
  sc.obstacles.push_back(build::static_obstacle(10, {9.3, 0}, 0, 4.3, 1.7));
  Trajectory traj;
  traj.t0_step = 0;
  for (int k = 0; k < 4; ++k) traj.states.push_back({5, 0, 0, 0, 0});
  CostReport r = tr1_cost(traj, sc, 0.1);
  CHECK(r.J_D == Catch::Approx(4 * 0.1).margin(1e-12));
}

TEST_CASE("obstacle 5 m ahead uses exp(-0.2 * 5)") {
  Scenario sc = testutil::straight_road();
  sc.obstacles.push_back(build::static_obstacle(10, {5 + 5 + 4.3, 0}, 0, 4.3, 1.7));
  Trajectory traj;
  traj.t0_step = 0;
  for (int k = 0; k < 4; ++k) traj.states.push_back({5, 0, 0, 0, 0});
  CostReport r = tr1_cost(traj, sc, 0.1);
  CHECK(r.J_D == Catch::Approx(4 * 0.1 * std::exp(-1.0)).margin(1e-12));
}

TEST_CASE("obstacles behind the ego do not contribute") {
  Scenario sc = testutil::straight_road();
  sc.obstacles.push_back(build::static_obstacle(10, {1, 0}, 0, 4.3, 1.7));
  Trajectory traj = constant_speed_traj(20, 10, 10);
  CostReport r = tr1_cost(traj, sc, 0.1);
  CHECK(r.J_D == 0.0);
}

TEST_CASE("too-short trajectories are rejected") {
  Scenario sc = testutil::straight_road();
  Trajectory traj = constant_speed_traj(5, 10, 3);
  CHECK_THROWS_AS(tr1_cost(traj, sc, 0.1), TrajectoryTooShort);
}

TEST_CASE("J_D is monotone non-increasing in frontal obstacle distance") {
  Scenario sc = testutil::straight_road();
  double prev = std::numeric_limits<double>::infinity();
  for (double gap : {0.0, 2.0, 5.0, 10.0, 30.0}) {
    Scenario s2 = sc;
    s2.obstacles.push_back(build::static_obstacle(10, {5 + 4.3 + gap, 0}, 0, 4.3, 1.7));
    Trajectory traj;
    for (int k = 0; k < 4; ++k) traj.states.push_back({5, 0, 0, 0, 0});
    double jd = tr1_cost(traj, s2, 0.1).J_D;
    CHECK(jd <= prev + 1e-12);
    prev = jd;
  }
}

TEST_CASE("J_ego is invariant under rigid transformation") {
  Scenario sc = testutil::straight_road();
  sc.obstacles.push_back(build::static_obstacle(10, {40, 0.5}, 0.2, 4.0, 1.8));
  // a mildly dynamic trajectory
  Trajectory traj;
  traj.t0_step = 0;
  double dt = 0.1;
  for (int k = 0; k < 31; ++k) {
    double t = k * dt;
    double v = 10 + std::sin(t);
    traj.states.push_back({5 + 10 * t, 0.3 * std::sin(0.5 * t), v, 0.015 * std::cos(t),
                           0.05 * std::sin(0.8 * t)});
  }
  CostReport base = tr1_cost(traj, sc, dt);

  double angle = 0.7;
  Vec2 shift{123.0, -47.0};
  auto xform_pt = [&](Vec2 p) { return rotate(p, angle) + shift; };
  Scenario moved = sc;
  for (auto& l : moved.lanelets) {
    for (auto& p : l.left_bound) p = xform_pt(p);
    for (auto& p : l.right_bound) p = xform_pt(p);
    for (auto& p : l.centerline) p = xform_pt(p);
  }
  for (auto& p : moved.planning_problem.goal_region.polygon) p = xform_pt(p);
  for (auto& o : moved.obstacles) {
    if (o.initial_state) {
      Vec2 p = xform_pt({o.initial_state->x, o.initial_state->y});
      o.initial_state->x = p.x;
      o.initial_state->y = p.y;
      o.initial_state->theta += angle;
    }
  }
  Trajectory moved_traj = traj;
  for (auto& s : moved_traj.states) {
    Vec2 p = xform_pt({s.x, s.y});
    s.x = p.x;
    s.y = p.y;
    s.phi += angle;
  }
  CostReport rig = tr1_cost(moved_traj, moved, dt);
  CHECK(rig.J_jerk == Catch::Approx(base.J_jerk).margin(1e-9));
  CHECK(rig.J_SR == Catch::Approx(base.J_SR).margin(1e-9));
  CHECK(rig.J_D == Catch::Approx(base.J_D).margin(1e-9));
  CHECK(rig.J_LC == Catch::Approx(base.J_LC).margin(1e-9));
  CHECK(rig.J_ego == Catch::Approx(base.J_ego).margin(1e-8));
}

TEST_CASE("discrete terms match a fine-resolution oracle on a synthetic swerve") {
  Scenario sc = testutil::straight_road(400.0, 8.0);
  sc.obstacles.push_back(build::static_obstacle(10, {150, 0}, 0, 4.3, 1.7));
  testutil::SyntheticTrajectory synth;
  synth.init();
  const double dt = 0.1;
  const int n_states = 31;
  Trajectory traj = synth.sample(dt, n_states);
  CostReport discrete = tr1_cost(traj, sc, dt);
  auto oracle = synth.oracle(dt, n_states, 0.5 * (4.3 + 4.3));
  CHECK(discrete.J_jerk == Catch::Approx(oracle.jerk).epsilon(0.05));
  CHECK(discrete.J_SR == Catch::Approx(oracle.sr).epsilon(0.05));
  CHECK(discrete.J_LC == Catch::Approx(oracle.lc).epsilon(0.05));
  CHECK(discrete.J_D == Catch::Approx(oracle.d).epsilon(0.05));
}
