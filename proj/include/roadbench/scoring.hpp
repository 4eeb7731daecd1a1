#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "roadbench/dynamics.hpp"
#include "roadbench/errors.hpp"
#include "roadbench/scenario.hpp"

namespace roadbench {

// TR1 cost weights.
inline constexpr std::array<double, 4> kTr1Weights = {0.01, 22.0, 8.0, 5.0};
inline constexpr double kTr1DistanceWeight = 0.2;

struct CostReport {
  double J_jerk{0.0};  // longitudinal jerk integral
  double J_SR{0.0};    // steering-rate integral
  double J_D{0.0};     // frontal obstacle proximity integral
  double J_LC{0.0};    // lane-center offset integral
  double J_ego{0.0};   // weighted total

  void total() {
    J_ego = kTr1Weights[0] * J_jerk + kTr1Weights[1] * J_SR + kTr1Weights[2] * J_D +
            kTr1Weights[3] * J_LC;
  }
};

// Distance from a point to the centerline of its current lanelet. Among
// containing driving lanelets the nearest centerline wins; off-road points
// fall back to the nearest driving centerline overall.
inline double lane_center_offset(const Scenario& sc, const Vec2& p) {
  double best_contained = std::numeric_limits<double>::infinity();
  double best_any = std::numeric_limits<double>::infinity();
  for (const auto& l : sc.lanelets) {
    if (l.lane_type != LaneType::driving) continue;
    double d = distance_to_polyline(l.centerline, p);
    best_any = std::min(best_any, d);
    if (point_in_polygon(l.polygon(), p)) best_contained = std::min(best_contained, d);
  }
  if (best_contained < std::numeric_limits<double>::infinity()) return best_contained;
  if (best_any < std::numeric_limits<double>::infinity()) return best_any;
  return 0.0;
}

// TR1 cost of a discrete trajectory. Derivatives by finite differences,
// integrals by the rectangle rule at dt, so the zero-cost cases are exact.
// Obstacle poses come from the scenario's replay at the aligned global step.
inline CostReport tr1_cost(const Trajectory& traj, const Scenario& sc, double dt) {
  const size_t n = traj.states.size();
  if (n < 4) throw TrajectoryTooShort("tr1_cost needs at least 4 states");
  CostReport r;

  // jerk: third difference of integrated arc position == second difference of v
  for (size_t k = 0; k + 2 < n - 1; ++k) {
    double jerk = (traj.states[k + 2].v - 2.0 * traj.states[k + 1].v + traj.states[k].v) / (dt * dt);
    r.J_jerk += jerk * jerk * dt;
  }

  for (size_t k = 0; k + 1 < n; ++k) {
    double sr = (traj.states[k + 1].delta - traj.states[k].delta) / dt;
    r.J_SR += sr * sr * dt;
  }

  const double half_ego = 0.5 * sc.vehicle_parameters.length;
  for (size_t k = 0; k < n; ++k) {
    const VehicleState& st = traj.states[k];
    Vec2 pos = st.position();

    double d_lc = lane_center_offset(sc, pos);
    r.J_LC += d_lc * d_lc * dt;

    Vec2 heading{std::cos(st.phi), std::sin(st.phi)};
    double xi_max = 0.0;
    bool any_frontal = false;
    int step = traj.t0_step + static_cast<int>(k);
    for (const auto& o : sc.obstacles) {
      RecordedState os = o.state_at_step(step);
      Vec2 rel = Vec2{os.x, os.y} - pos;
      if (dot(rel, heading) <= 0.0) continue;  // only obstacles in front
      double gap = std::max(0.0, norm(rel) - half_ego - 0.5 * o.length);
      xi_max = std::max(xi_max, std::exp(-kTr1DistanceWeight * gap));
      any_frontal = true;
    }
    if (any_frontal) r.J_D += xi_max * dt;
  }

  r.total();
  return r;
}

}  // namespace roadbench
