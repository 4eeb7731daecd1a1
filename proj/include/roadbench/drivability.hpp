#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "roadbench/dynamics.hpp"
#include "roadbench/prediction.hpp"
#include "roadbench/scenario.hpp"

namespace roadbench {

// Per-obstacle occupancy over a step range. Steps outside the stored range
// clamp to the nearest endpoint (parked before/after the track).
struct ObstacleTrack {
  int obstacle_id{-1};
  int t0_step{0};
  std::vector<OrientedRect> rects;

  const OrientedRect* at_step(int global_step) const {
    if (rects.empty()) return nullptr;
    int i = global_step - t0_step;
    i = std::clamp(i, 0, static_cast<int>(rects.size()) - 1);
    return &rects[static_cast<size_t>(i)];
  }
};

// Scenario replay occupancies (statics fixed, recorded obstacles replayed,
// reactive obstacles held at their initial pose).
inline std::vector<ObstacleTrack> tracks_from_scenario(const Scenario& sc, int t0_step,
                                                       int n_steps) {
  std::vector<ObstacleTrack> tracks;
  tracks.reserve(sc.obstacles.size());
  for (const auto& o : sc.obstacles) {
    ObstacleTrack tr;
    tr.obstacle_id = o.id;
    tr.t0_step = t0_step;
    tr.rects.reserve(static_cast<size_t>(n_steps));
    for (int k = 0; k < n_steps; ++k) tr.rects.push_back(o.footprint(o.state_at_step(t0_step + k)));
    tracks.push_back(std::move(tr));
  }
  return tracks;
}

// Candidate-horizon occupancies: the current pose followed by the prediction.
inline std::vector<ObstacleTrack> tracks_from_predictions(
    const std::vector<OccupancyPrediction>& preds,
    const std::vector<std::pair<int, OrientedRect>>& current_rects) {
  std::vector<ObstacleTrack> tracks;
  for (const auto& [id, rect] : current_rects) {
    ObstacleTrack tr;
    tr.obstacle_id = id;
    tr.rects.push_back(rect);
    for (const auto& p : preds) {
      if (p.obstacle_id != id) continue;
      tr.t0_step = p.t0_step;
      for (const auto& st : p.steps) tr.rects.push_back(st.rect);
      break;
    }
    tracks.push_back(std::move(tr));
  }
  return tracks;
}

struct FeasibilityVerdict {
  bool collision_free{true};
  int first_collision_step{-1};
  int first_collision_obstacle{-1};

  bool kinematically_feasible{true};
  int first_kinematic_step{-1};
  std::string violated_bound;  // "a", "v_delta", "v", "delta" or "residual"

  bool road_compliant{true};
  int first_offroad_step{-1};

  bool feasible() const { return collision_free && kinematically_feasible && road_compliant; }
};

inline constexpr double kResidualTolerance = 0.05;  // m, one-step model gap
inline constexpr double kBoundEps = 1e-9;

// Per-step separating-axis overlap between the ego footprint and every
// obstacle occupancy; touching counts as collision.
inline FeasibilityVerdict check_collision(const Trajectory& traj,
                                          std::span<const ObstacleTrack> tracks,
                                          const VehicleParameters& params) {
  FeasibilityVerdict v;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    OrientedRect ego = ego_footprint(traj.states[k], params);
    int step = traj.t0_step + static_cast<int>(k);
    for (const auto& tr : tracks) {
      const OrientedRect* r = tr.at_step(step);
      if (r && rects_overlap(ego, *r)) {
        v.collision_free = false;
        v.first_collision_step = step;
        v.first_collision_obstacle = tr.obstacle_id;
        return v;
      }
    }
  }
  return v;
}

// Input reconstruction against the vehicle bounds plus the one-step position
// residual of the single-track model.
inline FeasibilityVerdict check_kinematics(const Trajectory& traj, const VehicleParameters& params,
                                           double dt) {
  FeasibilityVerdict v;
  auto fail = [&](size_t k, const char* bound) {
    v.kinematically_feasible = false;
    v.first_kinematic_step = traj.t0_step + static_cast<int>(k);
    v.violated_bound = bound;
  };
  for (size_t k = 0; k < traj.states.size(); ++k) {
    const VehicleState& s = traj.states[k];
    if (s.v < params.v_min - kBoundEps || s.v > params.v_max + kBoundEps) {
      fail(k, "v");
      return v;
    }
    if (std::abs(s.delta) > params.delta_max + kBoundEps) {
      fail(k, "delta");
      return v;
    }
  }
  auto inputs = reconstruct_inputs(traj, dt, params);
  for (size_t k = 0; k < inputs.size(); ++k) {
    if (std::abs(inputs[k].a) > params.a_max + kBoundEps) {
      fail(k, "a");
      return v;
    }
    if (std::abs(inputs[k].v_delta) > params.v_delta_max + kBoundEps) {
      fail(k, "v_delta");
      return v;
    }
    if (inputs[k].residual > kResidualTolerance) {
      fail(k, "residual");
      return v;
    }
  }
  return v;
}

// All four footprint corners inside the union of driving lanelets and no
// overlap with walkway or bicycle lanelets.
inline FeasibilityVerdict check_road_compliance(const Trajectory& traj, const Scenario& sc,
                                                const VehicleParameters& params) {
  FeasibilityVerdict v;
  std::vector<Polygon> driving, forbidden;
  for (const auto& l : sc.lanelets) {
    if (l.lane_type == LaneType::driving)
      driving.push_back(l.polygon());
    else
      forbidden.push_back(l.polygon());
  }
  for (size_t k = 0; k < traj.states.size(); ++k) {
    OrientedRect ego = ego_footprint(traj.states[k], params);
    bool ok = true;
    for (const auto& corner : ego.corners()) {
      bool inside = false;
      for (const auto& poly : driving) {
        if (point_in_polygon(poly, corner)) {
          inside = true;
          break;
        }
      }
      if (!inside) {
        ok = false;
        break;
      }
    }
    if (ok) {
      for (const auto& poly : forbidden) {
        if (rect_intersects_polygon(ego, poly)) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      v.road_compliant = false;
      v.first_offroad_step = traj.t0_step + static_cast<int>(k);
      return v;
    }
  }
  return v;
}

inline FeasibilityVerdict check_feasibility(const Trajectory& traj, const Scenario& sc,
                                            std::span<const ObstacleTrack> tracks,
                                            const VehicleParameters& params) {
  FeasibilityVerdict v;
  FeasibilityVerdict c = check_collision(traj, tracks, params);
  v.collision_free = c.collision_free;
  v.first_collision_step = c.first_collision_step;
  v.first_collision_obstacle = c.first_collision_obstacle;
  FeasibilityVerdict k = check_kinematics(traj, params, sc.planning_problem.time_step);
  v.kinematically_feasible = k.kinematically_feasible;
  v.first_kinematic_step = k.first_kinematic_step;
  v.violated_bound = k.violated_bound;
  FeasibilityVerdict r = check_road_compliance(traj, sc, params);
  v.road_compliant = r.road_compliant;
  v.first_offroad_step = r.first_offroad_step;
  return v;
}

// Replay variant: occupancies straight from the scenario.
inline FeasibilityVerdict check_feasibility(const Trajectory& traj, const Scenario& sc,
                                            const VehicleParameters& params) {
  auto tracks = tracks_from_scenario(sc, traj.t0_step, static_cast<int>(traj.states.size()));
  return check_feasibility(traj, sc, tracks, params);
}

}  // namespace roadbench
