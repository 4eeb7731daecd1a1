#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "roadbench/builders.hpp"
#include "roadbench/prediction.hpp"

using namespace roadbench;

TEST_CASE("constant-velocity recursion") {
  PredState s{0, 0, 10, 0};
  PredState n = predict_state(s, {0, 0}, 0.1);
  CHECK(n.x == Catch::Approx(1.0).margin(1e-15));
  CHECK(n.y == 0.0);
  CHECK(n.v == 10.0);
  CHECK(n.theta == 0.0);
}

TEST_CASE("position uses the pre-step velocity") {
  PredState s{0, 0, 10, 0};
  PredState n = predict_state(s, {1.5, 0}, 0.1);
  CHECK(n.v == Catch::Approx(10.15));
  CHECK(n.x == Catch::Approx(1.0));  // not 1.0015
}

TEST_CASE("velocity clamps at zero and never reverses") {
  PredState s{0, 0, 0, 0};
  PredState n = predict_state(s, {-5.0, 0}, 0.1);
  CHECK(n.v == 0.0);
  // a braking rollout never reverses
  PredState cur{0, 0, 3, 0.4};
  double prev_x = cur.x;
  double heading_x = std::cos(cur.theta);
  for (int i = 0; i < 100; ++i) {
    cur = predict_state(cur, {-4.0, 0}, 0.1);
    CHECK(cur.v >= 0.0);
    CHECK((cur.x - prev_x) * heading_x >= -1e-12);  // no backward motion
    prev_x = cur.x;
  }
}

TEST_CASE("zero input is a translation along the heading") {
  PredState s{2, 3, 7, 0.6};
  PredState cur = s;
  int n = 25;
  for (int i = 0; i < n; ++i) cur = predict_state(cur, {0, 0}, 0.1);
  CHECK(cur.v == s.v);
  CHECK(cur.theta == s.theta);
  CHECK(cur.x - s.x == Catch::Approx(n * 0.1 * s.v * std::cos(s.theta)).margin(1e-9));
  CHECK(cur.y - s.y == Catch::Approx(n * 0.1 * s.v * std::sin(s.theta)).margin(1e-9));
}

TEST_CASE("rotational symmetry within 1e-9") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uv(0.0, 15.0), uth(-3.0, 3.0), ua(-2.0, 2.0),
      uo(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    double rot = uth(rng);
    PredState s{0, 0, uv(rng), uth(rng)};
    PredInput u{ua(rng), uo(rng)};
    PredState rotated{0, 0, s.v, s.theta + rot};
    PredState a = s, b = rotated;
    for (int i = 0; i < 20; ++i) {
      a = predict_state(a, u, 0.1);
      b = predict_state(b, u, 0.1);
    }
    Vec2 a_rotated = rotate({a.x, a.y}, rot);
    CHECK(a_rotated.x == Catch::Approx(b.x).margin(1e-9));
    CHECK(a_rotated.y == Catch::Approx(b.y).margin(1e-9));
    CHECK(b.theta == Catch::Approx(a.theta + rot).margin(1e-9));
  }
}

TEST_CASE("stationary history predicts identical rectangles") {
  Obstacle ob = build::reactive_obstacle(1, {5, 5}, 0, 0, 4.0, 2.0);
  std::vector<PredState> history = {{5, 5, 0, 0}, {5, 5, 0, 0}};
  auto pred = predict_obstacle(ob, history, 0, 3.0, 0.1);
  REQUIRE(pred.steps.size() == 30);
  for (const auto& st : pred.steps) {
    CHECK(st.rect.center.x == Catch::Approx(5.0));
    CHECK(st.rect.center.y == Catch::Approx(5.0));
  }
}

TEST_CASE("finite-difference estimator from two observations") {
  // v 10 -> 11 over dt=0.1 gives a = 10; after 0.3 s more, v = 14
  Obstacle ob = build::reactive_obstacle(1, {0, 0}, 0, 11, 4.0, 2.0);
  std::vector<PredState> history = {{0, 0, 10, 0}, {1, 0, 11, 0}};
  auto u = estimate_input_finite_difference(history, 0.1);
  CHECK(u.a == Catch::Approx(10.0));
  auto pred = predict_obstacle(ob, history, 0, 3.0, 0.1);
  CHECK(pred.steps[2].state.v == Catch::Approx(14.0));
}

TEST_CASE("single observation falls back to zero input") {
  std::vector<PredState> history = {{0, 0, 10, 0.2}};
  auto u = estimate_input_finite_difference(history, 0.1);
  CHECK(u.a == 0.0);
  CHECK(u.omega == 0.0);
}

TEST_CASE("horizon length and step count agree for all dt dividing the horizon") {
  Obstacle ob = build::reactive_obstacle(1, {0, 0}, 0, 5, 4.0, 2.0);
  std::vector<PredState> history = {{0, 0, 5, 0}, {0.5, 0, 5, 0}};
  for (double dt : {0.1, 0.05, 0.2, 0.5}) {
    auto pred = predict_obstacle(ob, history, 0, 3.0, dt);
    CHECK(pred.steps.size() == static_cast<size_t>(std::llround(3.0 / dt)));
  }
}
