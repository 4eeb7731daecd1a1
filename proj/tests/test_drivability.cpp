#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "roadbench/drivability.hpp"
#include "support/helpers.hpp"

using namespace roadbench;

namespace {

VehicleParameters params;

// Test-side overlap oracle: dense edge sampling plus center containment.
bool rects_overlap_sampled(const OrientedRect& a, const OrientedRect& b, double pitch = 0.001) {
  const OrientedRect* rects[2] = {&a, &b};
  for (int r = 0; r < 2; ++r) {
    const OrientedRect& p = *rects[r];
    const OrientedRect& q = *rects[1 - r];
    if (point_in_rect(q, p.center)) return true;
    auto cs = p.corners();
    for (int e = 0; e < 4; ++e) {
      Vec2 from = cs[static_cast<size_t>(e)], to = cs[static_cast<size_t>((e + 1) % 4)];
      double len = distance(from, to);
      int n = std::max(2, static_cast<int>(std::ceil(len / pitch)));
      for (int i = 0; i <= n; ++i) {
        Vec2 pt = from + (to - from) * (static_cast<double>(i) / n);
        if (point_in_rect(q, pt)) return true;
      }
    }
  }
  return false;
}

double segment_distance(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  if (segments_intersect(a, b, c, d)) return 0.0;
  auto point_seg = [](const Vec2& p, const Vec2& u, const Vec2& v) {
    Vec2 uv = v - u;
    double len2 = dot(uv, uv);
    double t = len2 > 0 ? std::clamp(dot(p - u, uv) / len2, 0.0, 1.0) : 0.0;
    return distance(p, u + uv * t);
  };
  return std::min(std::min(point_seg(a, c, d), point_seg(b, c, d)),
                  std::min(point_seg(c, a, b), point_seg(d, a, b)));
}

// exact clearance between disjoint rectangles
double rect_clearance(const OrientedRect& a, const OrientedRect& b) {
  auto ca = a.corners(), cb = b.corners();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      best = std::min(best, segment_distance(ca[static_cast<size_t>(i)],
                                             ca[static_cast<size_t>((i + 1) % 4)],
                                             cb[static_cast<size_t>(j)],
                                             cb[static_cast<size_t>((j + 1) % 4)]));
  return best;
}

Trajectory straight_traj(double x0, double y0, double v, int n, double dt = 0.1) {
  Trajectory traj;
  traj.t0_step = 0;
  for (int k = 0; k < n; ++k) traj.states.push_back({x0 + v * dt * k, y0, v, 0, 0});
  return traj;
}

}  // namespace

TEST_CASE("parallel lanes with 2 m clearance are collision free") {
  Trajectory traj = straight_traj(0, 0, 10, 31);
  std::vector<ObstacleTrack> tracks(1);
  tracks[0].obstacle_id = 9;
  tracks[0].t0_step = 0;
  for (int k = 0; k < 31; ++k)
    tracks[0].rects.push_back(OrientedRect{{1.0 * k, 0.85 + 2.0 + 0.85}, 0, 4.3, 1.7});
  auto v = check_collision(traj, tracks, params);
  CHECK(v.collision_free);
}

TEST_CASE("identical rectangles collide at step 0") {
  Trajectory traj = straight_traj(0, 0, 10, 5);
  std::vector<ObstacleTrack> tracks(1);
  tracks[0].obstacle_id = 4;
  tracks[0].t0_step = 0;
  tracks[0].rects.assign(5, OrientedRect{{0, 0}, 0, params.length, params.width});
  auto v = check_collision(traj, tracks, params);
  CHECK_FALSE(v.collision_free);
  CHECK(v.first_collision_step == 0);
  CHECK(v.first_collision_obstacle == 4);
}

TEST_CASE("1 cm corner near-miss at 45 degrees agrees with the sampling oracle") {
  OrientedRect ego{{0, 0}, 0, 4.3, 1.7};
  // rotated rectangle whose nearest corner sits 1 cm beyond the ego edge
  double corner_reach = 0.5 * std::hypot(2.0, 2.0);  // 2x2 box at 45 deg
  OrientedRect miss{{2.15 + corner_reach + 0.01, 0}, M_PI / 4.0, 2.0, 2.0};
  OrientedRect hit{{2.15 + corner_reach - 0.01, 0}, M_PI / 4.0, 2.0, 2.0};
  CHECK(rects_overlap(ego, miss) == rects_overlap_sampled(ego, miss));
  CHECK(rects_overlap(ego, hit) == rects_overlap_sampled(ego, hit));
  CHECK_FALSE(rects_overlap(ego, miss));
  CHECK(rects_overlap(ego, hit));
}

TEST_CASE("separating axis agrees with the sampling oracle on random pairs") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> upos(-6.0, 6.0), uang(0.0, 2 * M_PI), usz(0.8, 5.0);
  int tested = 0;
  for (int i = 0; i < 300; ++i) {
    OrientedRect a{{upos(rng), upos(rng)}, uang(rng), usz(rng), usz(rng)};
    OrientedRect b{{upos(rng), upos(rng)}, uang(rng), usz(rng), usz(rng)};
    bool sat = rects_overlap(a, b);
    if (!sat && rect_clearance(a, b) <= 1e-3) continue;  // borderline
    if (sat) {
      OrientedRect sa = a, sb = b;
      sa.length -= 2e-3;
      sa.width -= 2e-3;
      sb.length -= 2e-3;
      sb.width -= 2e-3;
      if (!rects_overlap(sa, sb)) continue;  // penetration below 1 mm
    }
    ++tested;
    CHECK(rects_overlap_sampled(a, b) == sat);
  }
  CHECK(tested > 150);
}

TEST_CASE("kinematics: admissible rollout is feasible") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ua(-5.0, 5.0), ud(-0.35, 0.35);
  std::vector<ControlInput> inputs;
  for (int i = 0; i < 30; ++i) inputs.push_back({ua(rng), ud(rng)});
  Trajectory traj = rollout({0, 0, 10, 0, 0}, inputs, 0.1, params);
  auto v = check_kinematics(traj, params, 0.1);
  CHECK(v.kinematically_feasible);
}

TEST_CASE("kinematics: 3 m/s jump in one step violates bound a") {
  Trajectory traj = straight_traj(0, 0, 10, 4);
  traj.states[2].v = 13.0;  // a = 30 > 11.5
  auto v = check_kinematics(traj, params, 0.1);
  CHECK_FALSE(v.kinematically_feasible);
  CHECK(v.violated_bound == "a");
}

TEST_CASE("kinematics: teleports violate the residual bound") {
  Trajectory traj = straight_traj(0, 0, 10, 4);
  traj.states[2].x += 5.0;
  auto v = check_kinematics(traj, params, 0.1);
  CHECK_FALSE(v.kinematically_feasible);
  CHECK(v.violated_bound == "residual");
}

TEST_CASE("road compliance along the lane center") {
  Scenario sc = testutil::straight_road();
  Trajectory traj = straight_traj(10, 0, 10, 31);
  auto v = check_road_compliance(traj, sc, params);
  CHECK(v.road_compliant);
}

TEST_CASE("footprint corner beyond the outer bound is non-compliant") {
  Scenario sc = testutil::straight_road();  // half-width 1.75
  // footprint half-width 0.85: center at y = 1.4 puts the left corners at 2.25
  Trajectory traj = straight_traj(10, 1.4, 10, 5);
  auto v = check_road_compliance(traj, sc, params);
  CHECK_FALSE(v.road_compliant);
  CHECK(v.first_offroad_step == 0);
  // oracle: that corner is outside the lanelet polygon
  OrientedRect fp = ego_footprint(traj.states[0], params);
  bool some_corner_out = false;
  for (const auto& c : fp.corners())
    if (!point_in_polygon(sc.lanelets[0].polygon(), c)) some_corner_out = true;
  CHECK(some_corner_out);
}

TEST_CASE("footprint straddling two adjacent driving lanelets is compliant") {
  Scenario sc = load_scenario(testutil::fixture("two_parallel.rbs"));
  Trajectory traj = straight_traj(10, 1.75, 10, 5);  // on the shared boundary
  auto v = check_road_compliance(traj, sc, params);
  CHECK(v.road_compliant);
}

TEST_CASE("walkway overlap is non-compliant") {
  Scenario sc = testutil::straight_road();
  sc.lanelets.push_back(
      build::lanelet_from_centerline(2, {{0, 2.5}, {200, 2.5}}, 1.5, LaneType::walkway));
  // wide driving area so corner containment alone passes
  sc.lanelets[0] = build::lanelet_from_centerline(1, {{0, 0}, {200, 0}}, 10.0);
  Trajectory traj = straight_traj(10, 1.2, 10, 5);  // footprint reaches y=2.05 > 1.75
  auto v = check_road_compliance(traj, sc, params);
  CHECK_FALSE(v.road_compliant);
}

TEST_CASE("check_feasibility composes the three verdicts") {
  Scenario sc = testutil::straight_road();
  SECTION("all pass") {
    Trajectory traj = straight_traj(10, 0, 10, 31);
    auto v = check_feasibility(traj, sc, params);
    CHECK(v.feasible());
  }
  SECTION("collision only") {
    Scenario s2 = sc;
    s2.obstacles.push_back(build::static_obstacle(5, {20, 0}, 0, 4.0, 1.7));
    Trajectory traj = straight_traj(10, 0, 10, 31);
    auto v = check_feasibility(traj, s2, s2.vehicle_parameters);
    CHECK_FALSE(v.collision_free);
    CHECK(v.kinematically_feasible);
    CHECK(v.road_compliant);
    CHECK_FALSE(v.feasible());
  }
  SECTION("kinematics only") {
    Trajectory traj = straight_traj(10, 0, 10, 31);
    traj.states[5].v = 14.0;
    auto v = check_feasibility(traj, sc, params);
    CHECK(v.collision_free);
    CHECK_FALSE(v.kinematically_feasible);
    CHECK(v.road_compliant);
  }
  SECTION("road only") {
    Trajectory traj = straight_traj(10, 1.4, 10, 31);
    auto v = check_feasibility(traj, sc, params);
    CHECK(v.collision_free);
    CHECK(v.kinematically_feasible);
    CHECK_FALSE(v.road_compliant);
  }
}

TEST_CASE("random admissible rollouts on a wide empty road are always feasible") {
  Scenario sc;
  sc.id = "wide";
  sc.lanelets.push_back(build::lanelet_from_centerline(1, {{-50, 0}, {250, 0}}, 80.0));
  sc.planning_problem.initial_state = {0, 0, 8, 0, 0};
  sc.planning_problem.goal_region = build::goal_box({200, 0}, 10, 10, 0, 400);
  sc.planning_problem.max_time_steps = 400;
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> ua(-3.0, 3.0), ud(-0.3, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ControlInput> inputs;
    for (int i = 0; i < 30; ++i) inputs.push_back({ua(rng), ud(rng)});
    Trajectory traj = rollout({0, 0, 8, 0, 0}, inputs, 0.1, sc.vehicle_parameters);
    auto v = check_feasibility(traj, sc, sc.vehicle_parameters);
    CHECK(v.feasible());
  }
}

TEST_CASE("verdict is independent of obstacle ordering") {
  Scenario sc = testutil::straight_road();
  sc.obstacles.push_back(build::static_obstacle(5, {30, 0}, 0, 4.0, 1.7));
  sc.obstacles.push_back(build::static_obstacle(6, {60, 0.5}, 0.3, 4.0, 1.7));
  Trajectory traj = straight_traj(10, 0, 10, 31);
  auto v1 = check_feasibility(traj, sc, params);
  std::swap(sc.obstacles[0], sc.obstacles[1]);
  auto v2 = check_feasibility(traj, sc, params);
  CHECK(v1.collision_free == v2.collision_free);
  CHECK(v1.feasible() == v2.feasible());
}
