#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "roadbench/dynamics.hpp"

using namespace roadbench;

namespace {
VehicleParameters params;  // defaults
}

TEST_CASE("straight-line constant velocity step") {
  VehicleState s{0, 0, 10, 0, 0};
  VehicleState n = step_single_track(s, {0, 0}, 0.1, params);
  CHECK(n.x == Catch::Approx(1.0).margin(1e-15));
  CHECK(n.y == 0.0);
  CHECK(n.v == 10.0);
  CHECK(n.phi == 0.0);
  CHECK(n.delta == 0.0);
}

TEST_CASE("rest is a fixed point") {
  VehicleState s{3, 4, 0, 0.7, 0.2};
  VehicleState n = step_single_track(s, {0, 0}, 0.1, params);
  CHECK(n.x == s.x);
  CHECK(n.y == s.y);
  CHECK(n.v == s.v);
  CHECK(n.phi == s.phi);
  CHECK(n.delta == s.delta);
}

TEST_CASE("heading increment matches tan(delta) * v / wheelbase * dt") {
  VehicleState s{0, 0, 10, 0, 0.1};
  VehicleState n = step_single_track(s, {0, 0}, 0.1, params);
  double expected = 0.1 * (10.0 / 2.9) * std::tan(0.1);
  CHECK(n.phi == Catch::Approx(expected).margin(1e-12));
}

TEST_CASE("v and delta are clamped to the vehicle bounds") {
  VehicleState s{0, 0, 45.7, 0, 0.905};
  VehicleState n = step_single_track(s, {100.0, 10.0}, 0.1, params);
  CHECK(n.v == params.v_max);
  CHECK(n.delta == params.delta_max);
}

TEST_CASE("input reconstruction round-trips a rollout") {
  std::vector<ControlInput> inputs;
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ud(-0.3, 0.3);
  for (int i = 0; i < 30; ++i) inputs.push_back({ua(rng), ud(rng)});
  Trajectory traj = rollout({0, 0, 10, 0, 0}, inputs, 0.1, params);
  auto rec = reconstruct_inputs(traj, 0.1, params);
  REQUIRE(rec.size() == inputs.size());
  for (size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i].a == Catch::Approx(inputs[i].a).margin(1e-9));
    CHECK(rec[i].v_delta == Catch::Approx(inputs[i].v_delta).margin(1e-9));
    CHECK(rec[i].residual <= 1e-9);
  }
}

TEST_CASE("two identical states reconstruct to zero input, zero residual") {
  Trajectory traj;
  traj.states = {{1, 2, 0, 0.3, 0.1}, {1, 2, 0, 0.3, 0.1}};
  auto rec = reconstruct_inputs(traj, 0.1, params);
  REQUIRE(rec.size() == 1);
  CHECK(rec[0].a == 0.0);
  CHECK(rec[0].v_delta == 0.0);
  CHECK(rec[0].residual == 0.0);
}

TEST_CASE("a teleport shows up as a large residual") {
  Trajectory traj;
  traj.states = {{0, 0, 10, 0, 0}, {1, 0, 10, 0, 0}, {6, 0, 10, 0, 0}};  // 5 m jump
  auto rec = reconstruct_inputs(traj, 0.1, params);
  REQUIRE(rec.size() == 2);
  CHECK(rec[0].residual <= 1e-9);
  CHECK(rec[1].residual >= 4.0);
}

TEST_CASE("positions grow at most v_max*dt per step and heading stays finite") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> ua(-11.0, 11.0), ud(-0.4, 0.4);
  VehicleState s{0, 0, 20, 0.5, 0};
  for (int i = 0; i < 500; ++i) {
    VehicleState n = step_single_track(s, {ua(rng), ud(rng)}, 0.1, params);
    CHECK(std::hypot(n.x - s.x, n.y - s.y) <= params.v_max * 0.1 + 1e-12);
    CHECK(std::isfinite(n.phi));
    s = n;
  }
}

TEST_CASE("step is deterministic") {
  VehicleState s{1, 2, 8, 0.3, 0.05};
  ControlInput u{1.5, -0.1};
  VehicleState a = step_single_track(s, u, 0.1, params);
  VehicleState b = step_single_track(s, u, 0.1, params);
  CHECK(a == b);
}
