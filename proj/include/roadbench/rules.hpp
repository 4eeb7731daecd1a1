#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "roadbench/dynamics.hpp"
#include "roadbench/prediction.hpp"
#include "roadbench/scenario.hpp"

namespace roadbench {

struct RuleRobustness {
  double rho_g1{std::numeric_limits<double>::infinity()};
  double rho_g4{std::numeric_limits<double>::infinity()};
  int cut_in_grace_steps{0};  // steps exempted by the cut-in window
};

struct RuleParameters {
  double t_react{0.3};   // reaction time in the safe-distance formula
  double t_c{3.0};       // grace window after a cut-in
  double lateral_gate{2.0};
};

namespace detail {

struct LeaderInfo {
  int obstacle_id{-1};
  double gap{0.0};
  double v{0.0};
};

// Leading vehicle at one step: an obstacle on the ego trajectory's lanelet
// corridor, ahead along the ego heading and laterally within the gate. The
// gap is bumper-to-bumper along the heading axis.
inline std::optional<LeaderInfo> find_leader(const VehicleState& ego,
                                             const std::set<int>& corridor,
                                             const std::vector<OccupancyPrediction>& predictions,
                                             const Scenario& sc, int global_step,
                                             const RuleParameters& rp) {
  Vec2 heading{std::cos(ego.phi), std::sin(ego.phi)};
  std::optional<LeaderInfo> best;
  for (const auto& pred : predictions) {
    int i = global_step - pred.t0_step - 1;
    if (i < 0 || i >= static_cast<int>(pred.steps.size())) continue;
    const PredState& os = pred.steps[static_cast<size_t>(i)].state;
    const Obstacle* ob = sc.find_obstacle(pred.obstacle_id);
    if (!ob) continue;
    Vec2 rel = Vec2{os.x, os.y} - ego.position();
    double along = dot(rel, heading);
    if (along <= 0.0) continue;
    if (std::abs(cross(heading, rel)) > rp.lateral_gate) continue;
    auto obstacle_lanes = lanelet_containing(sc, {os.x, os.y});
    bool shared = false;
    for (int id : obstacle_lanes)
      if (corridor.count(id)) { shared = true; break; }
    if (!shared) continue;
    double gap = along - 0.5 * sc.vehicle_parameters.length - 0.5 * ob->length;
    if (!best || gap < best->gap) best = LeaderInfo{pred.obstacle_id, gap, os.v};
  }
  return best;
}

inline std::set<int> trajectory_corridor(const Trajectory& traj, const Scenario& sc) {
  std::set<int> corridor;
  for (const auto& st : traj.states) {
    auto ids = lanelet_containing(sc, st.position());
    corridor.insert(ids.begin(), ids.end());
  }
  return corridor;
}

}  // namespace detail

// R_G1 safe distance: reaction-time gap plus the braking-distance difference
// at equal braking capability. Robustness is the minimum over monitored
// steps of (gap - safe gap); steps inside the cut-in grace window t_c are
// exempt. +inf when no leading vehicle appears anywhere on the horizon.
inline RuleRobustness robustness_g1(const Trajectory& ego_traj,
                                    const std::vector<OccupancyPrediction>& predictions,
                                    const Scenario& sc, const VehicleParameters& params,
                                    double dt, const RuleParameters& rp = {}) {
  RuleRobustness out;
  out.rho_g1 = std::numeric_limits<double>::infinity();
  auto corridor = detail::trajectory_corridor(ego_traj, sc);
  const double a_brake = params.a_max;
  int grace_window = static_cast<int>(std::lround(rp.t_c / dt));
  int grace_until = -1;
  int prev_leader = -1;
  bool prev_known = false;
  for (size_t k = 0; k < ego_traj.states.size(); ++k) {
    int step = ego_traj.t0_step + static_cast<int>(k);
    const VehicleState& ego = ego_traj.states[k];
    auto leader = detail::find_leader(ego, corridor, predictions, sc, step, rp);
    if (!leader) {
      prev_known = true;
      prev_leader = -1;
      continue;
    }
    double safe_gap = ego.v * rp.t_react + ego.v * ego.v / (2.0 * a_brake) -
                      leader->v * leader->v / (2.0 * a_brake);
    double margin = leader->gap - safe_gap;
    bool changed = prev_known && leader->obstacle_id != prev_leader;
    if (changed && margin < 0.0) grace_until = static_cast<int>(k) + grace_window;
    prev_known = true;
    prev_leader = leader->obstacle_id;
    if (static_cast<int>(k) <= grace_until) {
      ++out.cut_in_grace_steps;
      continue;
    }
    out.rho_g1 = std::min(out.rho_g1, margin);
  }
  return out;
}

// R_G4 traffic flow: on steps with no leading vehicle the ego should hold
// the permitted speed; robustness is min over those steps of (v - v_limit).
// +inf (vacuous) when a leader is present throughout.
inline double robustness_g4(const Trajectory& ego_traj,
                            const std::vector<OccupancyPrediction>& predictions,
                            const Scenario& sc, double v_limit, double /*dt*/,
                            const RuleParameters& rp = {}) {
  double rho = std::numeric_limits<double>::infinity();
  auto corridor = detail::trajectory_corridor(ego_traj, sc);
  for (size_t k = 0; k < ego_traj.states.size(); ++k) {
    int step = ego_traj.t0_step + static_cast<int>(k);
    const VehicleState& ego = ego_traj.states[k];
    auto leader = detail::find_leader(ego, corridor, predictions, sc, step, rp);
    if (leader) continue;
    rho = std::min(rho, ego.v - v_limit);
  }
  return rho;
}

}  // namespace roadbench
