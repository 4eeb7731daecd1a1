#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "roadbench/frenet.hpp"
#include "support/helpers.hpp"

using namespace roadbench;

namespace {

VehicleParameters params;

// independent 6x6 linear solve for the quintic boundary system
std::array<double, 6> quintic_by_gauss(double x0, double v0, double a0, double x1, double v1,
                                       double a1, double T) {
  double A[6][7] = {};
  auto set_row = [&](int r, double t, int deriv, double rhs) {
    for (int j = 0; j < 6; ++j) {
      double coef = 1.0;
      int p = j;
      for (int d = 0; d < deriv; ++d) coef *= p--;
      A[r][j] = p >= 0 ? coef * std::pow(t, p) : 0.0;
      if (j < deriv) A[r][j] = 0.0;
    }
    A[r][6] = rhs;
  };
  set_row(0, 0, 0, x0);
  set_row(1, 0, 1, v0);
  set_row(2, 0, 2, a0);
  set_row(3, T, 0, x1);
  set_row(4, T, 1, v1);
  set_row(5, T, 2, a1);
  for (int col = 0; col < 6; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 6; ++r)
      if (std::abs(A[r][col]) > std::abs(A[pivot][col])) pivot = r;
    std::swap(A[col], A[pivot]);
    for (int r = 0; r < 6; ++r) {
      if (r == col || A[r][col] == 0.0) continue;
      double f = A[r][col] / A[col][col];
      for (int j = col; j < 7; ++j) A[r][j] -= f * A[col][j];
    }
  }
  std::array<double, 6> c{};
  for (int i = 0; i < 6; ++i) c[static_cast<size_t>(i)] = A[i][6] / A[i][i];
  return c;
}

ReferencePath straight_path(double length = 200.0) {
  Polyline pl = {{0, 0}, {length, 0}};
  return detail::make_reference_path(pl, {1});
}

ReferencePath arc_path(double R = 50.0, double sweep = 2.0) {
  Polyline pl = build::arc_centerline({0, R}, R, -M_PI / 2.0, -M_PI / 2.0 + sweep, 200);
  return detail::make_reference_path(pl, {1});
}

}  // namespace

TEST_CASE("to_frenet on-path aligned state") {
  ReferencePath path = straight_path();
  VehicleState st{40, 0, 12, 0, 0};
  FrenetState fs = to_frenet(path, st, params);
  CHECK(fs.d == Catch::Approx(0.0).margin(1e-9));
  CHECK(fs.d_dot == Catch::Approx(0.0).margin(1e-9));
  CHECK(fs.s_dot == Catch::Approx(12.0).margin(1e-9));
  CHECK(fs.s == Catch::Approx(40.0).margin(1e-6));
}

TEST_CASE("left of the path is positive d") {
  ReferencePath path = straight_path();
  VehicleState st{40, 2, 10, 0, 0};
  FrenetState fs = to_frenet(path, st, params);
  CHECK(fs.d == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("round-trip through the frenet chart on straight and arc paths") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> us(5.0, 90.0), ud(-5.0, 5.0);
  for (const ReferencePath& path : {straight_path(100.0), arc_path()}) {
    for (int i = 0; i < 300; ++i) {
      double s = us(rng), d = ud(rng);
      Vec2 p = from_frenet(path, s, d);
      auto proj = path.project(p);
      Vec2 back = from_frenet(path, proj.s, proj.d);
      CHECK(distance(p, back) <= 1e-6);
    }
  }
}

TEST_CASE("projection beyond the path ends raises ProjectionError") {
  ReferencePath path = straight_path(50.0);
  VehicleState beyond{60, 0, 5, 0, 0};
  CHECK_THROWS_AS(to_frenet(path, beyond, params), ProjectionError);
}

TEST_CASE("quintic coefficients match an independent linear solve") {
  QuinticPolynomial q(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0);
  auto oracle = quintic_by_gauss(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0);
  for (int i = 0; i < 6; ++i)
    CHECK(q.c[static_cast<size_t>(i)] == Catch::Approx(oracle[static_cast<size_t>(i)]).margin(1e-9));
}

TEST_CASE("quintic boundary conditions hold to 1e-9") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ut(0.8, 4.0);
  for (int i = 0; i < 200; ++i) {
    double x0 = u(rng), v0 = u(rng), a0 = u(rng), x1 = u(rng), v1 = u(rng), a1 = u(rng);
    double T = ut(rng);
    QuinticPolynomial q(x0, v0, a0, x1, v1, a1, T);
    CHECK(q.value(0) == Catch::Approx(x0).margin(1e-9));
    CHECK(q.d1(0) == Catch::Approx(v0).margin(1e-9));
    CHECK(q.d2(0) == Catch::Approx(a0).margin(1e-9));
    CHECK(q.value(T) == Catch::Approx(x1).margin(1e-9));
    CHECK(q.d1(T) == Catch::Approx(v1).margin(1e-9));
    CHECK(q.d2(T) == Catch::Approx(a1).margin(1e-9));
  }
}

TEST_CASE("quartic velocity keeping hits the end velocity with zero end accel") {
  QuarticPolynomial q(10.0, 8.0, 0.5, 12.0, 3.0);
  CHECK(q.value(0) == Catch::Approx(10.0));
  CHECK(q.d1(0) == Catch::Approx(8.0));
  CHECK(q.d2(0) == Catch::Approx(0.5));
  CHECK(q.d1(3.0) == Catch::Approx(12.0).margin(1e-9));
  CHECK(q.d2(3.0) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("default grids produce 105 candidates") {
  PlannerConfig config;
  FrenetState fs0{20, 10, 0, 0, 0, 0};
  auto cands = generate_candidates(fs0, config, 13.9);
  CHECK(cands.size() == 105);
  for (size_t i = 0; i < cands.size(); ++i) CHECK(cands[i].index == static_cast<int>(i));
}

TEST_CASE("steady state with singleton grids gives the constant candidate") {
  PlannerConfig config;
  config.lateral_end_offsets = {0.0};
  config.end_velocity_deltas = {0.0};
  config.end_times = {3.0};
  FrenetState fs0{20, 10, 0, 0, 0, 0};
  auto cands = generate_candidates(fs0, config, 13.9);
  REQUIRE(cands.size() == 1);
  const auto& c = cands[0];
  for (double t : {0.0, 1.0, 2.0, 3.0}) {
    CHECK(c.lateral.value(t) == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.lateral.d1(t) == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.lateral.d2(t) == Catch::Approx(0.0).margin(1e-12));
    CHECK(c.longitudinal.d1(t) == Catch::Approx(10.0).margin(1e-12));
    CHECK(c.longitudinal.d2(t) == Catch::Approx(0.0).margin(1e-12));
  }
}

namespace {

SelectionContext make_context(const Scenario& sc, const ReferencePath& path,
                              const std::vector<OccupancyPrediction>& preds,
                              const VehicleState& ego) {
  SelectionContext ctx;
  ctx.scenario = &sc;
  ctx.path = &path;
  ctx.predictions = &preds;
  ctx.t0_step = 0;
  ctx.current = ego;
  return ctx;
}

}  // namespace

TEST_CASE("single feasible candidate is returned regardless of cost") {
  Scenario sc = testutil::straight_road();
  ReferencePath path = plan_route(sc);
  VehicleState ego{10, 0, 10, 0, 0};
  FrenetState fs0 = to_frenet(path, ego, params);
  PlannerConfig config;
  config.lateral_end_offsets = {0.0};
  config.end_velocity_deltas = {0.0};
  config.end_times = {3.0};
  auto cands = generate_candidates(fs0, config, 13.9);
  std::vector<OccupancyPrediction> preds;
  auto ctx = make_context(sc, path, preds, ego);
  auto sel = select_trajectory(cands, ctx, config, params);
  CHECK(sel.index == 0);
  CHECK(sel.feasible);
}

TEST_CASE("straight beats the identical-but-swerving candidate (TR1 oracle)") {
  Scenario sc = testutil::straight_road();
  ReferencePath path = plan_route(sc);
  VehicleState ego{10, 0, 10, 0, 0};
  FrenetState fs0 = to_frenet(path, ego, params);
  PlannerConfig config;
  config.lateral_end_offsets = {0.0, 1.5};
  config.end_velocity_deltas = {0.0};
  config.end_times = {3.0};
  auto cands = generate_candidates(fs0, config, 13.9);
  REQUIRE(cands.size() == 2);
  std::vector<OccupancyPrediction> preds;
  auto ctx = make_context(sc, path, preds, ego);
  auto sel = select_trajectory(cands, ctx, config, params);
  CHECK(sel.index == 0);
  // oracle: evaluate both TR1 costs directly
  CostReport straight = tr1_cost(cands[0].trajectory, sc, 0.1);
  CostReport swerve = tr1_cost(cands[1].trajectory, sc, 0.1);
  CHECK(straight.J_ego < swerve.J_ego);
  CHECK(straight.J_LC < swerve.J_LC);
}

TEST_CASE("candidate crossing a predicted obstacle is rejected with reason collision") {
  Scenario sc = testutil::straight_road();
  sc.obstacles.push_back(build::static_obstacle(7, {40, 0}, 0, 4.0, 2.0));
  ReferencePath path = plan_route(sc);
  VehicleState ego{30, 0, 10, 0, 0};
  FrenetState fs0 = to_frenet(path, ego, params);
  PlannerConfig config;
  config.lateral_end_offsets = {0.0};
  config.end_velocity_deltas = {0.0};
  config.end_times = {3.0};
  auto cands = generate_candidates(fs0, config, 13.9);
  std::vector<OccupancyPrediction> preds;
  auto ctx = make_context(sc, path, preds, ego);
  ctx.tracks = tracks_from_scenario(sc, 0, 31);
  CHECK_THROWS_AS(select_trajectory(cands, ctx, config, params), NoFeasibleCandidate);
  CHECK(cands[0].rejection_reason == "collision");
}

TEST_CASE("selection returns the cost-minimal surviving candidate deterministically") {
  Scenario sc = testutil::straight_road();
  ReferencePath path = plan_route(sc);
  VehicleState ego{10, 0, 10, 0, 0};
  FrenetState fs0 = to_frenet(path, ego, params);
  PlannerConfig config;
  auto cands = generate_candidates(fs0, config, 13.9);
  std::vector<OccupancyPrediction> preds;
  auto ctx = make_context(sc, path, preds, ego);
  auto sel = select_trajectory(cands, ctx, config, params);
  for (const auto& c : cands) {
    if (c.feasible) CHECK(sel.cost <= c.cost + 1e-12);
  }
  auto cands2 = generate_candidates(fs0, config, 13.9);
  auto sel2 = select_trajectory(cands2, ctx, config, params);
  CHECK(sel2.index == sel.index);
}

TEST_CASE("every selected trajectory passes the drivability checks") {
  Scenario sc = testutil::straight_road();
  ReferencePath path = plan_route(sc);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> ux(10.0, 120.0), uv(3.0, 13.0), uy(-0.8, 0.8);
  for (int i = 0; i < 20; ++i) {
    VehicleState ego{ux(rng), uy(rng), uv(rng), 0, 0};
    FrenetState fs0 = to_frenet(path, ego, params);
    PlannerConfig config;
    auto cands = generate_candidates(fs0, config, 13.9);
    std::vector<OccupancyPrediction> preds;
    auto ctx = make_context(sc, path, preds, ego);
    auto sel = select_trajectory(cands, ctx, config, params);
    FeasibilityVerdict v = check_feasibility(sel.trajectory, sc, params);
    CHECK(v.feasible());
  }
}

TEST_CASE("replanning interval drops to 0.1 s in high-risk situations") {
  Scenario sc = testutil::straight_road();
  ReferencePath path = plan_route(sc);
  PlannerConfig config;
  VehicleState ego{20, 0, 10, 0, 0};
  CHECK(next_replan_interval(ego, sc, path, {}, config) == Catch::Approx(0.3));
  // obstacle 5 m ahead
  CHECK(next_replan_interval(ego, sc, path, {{25, 0}}, config) == Catch::Approx(0.1));
  // sharp curvature at the ego position (R = 12.5 -> kappa = 0.08)
  ReferencePath sharp;
  {
    Polyline pl = build::arc_centerline({0, 12.5}, 12.5, -M_PI / 2.0, M_PI / 2.0, 120);
    sharp = detail::make_reference_path(pl, {1});
  }
  VehicleState on_arc{sharp.points[30].x, sharp.points[30].y, 5, 0, 0};
  CHECK(next_replan_interval(on_arc, sc, sharp, {}, config) == Catch::Approx(0.1));
}
