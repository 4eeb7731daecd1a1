#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "roadbench/drivability.hpp"
#include "roadbench/dynamics.hpp"
#include "roadbench/errors.hpp"
#include "roadbench/route.hpp"
#include "roadbench/rules.hpp"
#include "roadbench/scoring.hpp"

namespace roadbench {

struct FrenetState {
  double s{0.0};
  double s_dot{0.0};
  double s_ddot{0.0};
  double d{0.0};
  double d_dot{0.0};
  double d_ddot{0.0};
};

// d(t) with full position/velocity/acceleration boundary conditions.
struct QuinticPolynomial {
  std::array<double, 6> c{};

  QuinticPolynomial() = default;
  QuinticPolynomial(double x0, double v0, double a0, double x1, double v1, double a1, double T) {
    c[0] = x0;
    c[1] = v0;
    c[2] = 0.5 * a0;
    double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
    c[3] = (20.0 * (x1 - x0) - (8.0 * v1 + 12.0 * v0) * T - (3.0 * a0 - a1) * T2) / (2.0 * T3);
    c[4] = (30.0 * (x0 - x1) + (14.0 * v1 + 16.0 * v0) * T + (3.0 * a0 - 2.0 * a1) * T2) / (2.0 * T4);
    c[5] = (12.0 * (x1 - x0) - 6.0 * (v1 + v0) * T - (a0 - a1) * T2) / (2.0 * T5);
  }

  double value(double t) const {
    return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  }
  double d1(double t) const {
    return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
  }
  double d2(double t) const {
    return 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
  }
  double d3(double t) const { return 6.0 * c[3] + t * (24.0 * c[4] + t * 60.0 * c[5]); }
};

// s(t) velocity-keeping polynomial: end velocity fixed, end position free,
// end acceleration zero.
struct QuarticPolynomial {
  std::array<double, 5> c{};

  QuarticPolynomial() = default;
  QuarticPolynomial(double s0, double v0, double a0, double v1, double T) {
    c[0] = s0;
    c[1] = v0;
    c[2] = 0.5 * a0;
    double T3 = T * T * T;
    c[4] = -(v1 - v0 - 0.5 * a0 * T) / (2.0 * T3);
    c[3] = -a0 / (6.0 * T) - 2.0 * T * c[4];
  }

  double value(double t) const {
    return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
  }
  double d1(double t) const {
    return c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * 4.0 * c[4]));
  }
  double d2(double t) const { return 2.0 * c[2] + t * (6.0 * c[3] + t * 12.0 * c[4]); }
  double d3(double t) const { return 6.0 * c[3] + t * 24.0 * c[4]; }
};

struct PlannerConfig {
  double horizon_s{3.0};              // equals the prediction horizon
  double replan_interval_s{0.3};
  double replan_interval_high_risk_s{0.1};
  std::vector<double> lateral_end_offsets{-2.0, -4.0 / 3.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, 4.0 / 3.0, 2.0};
  std::vector<double> end_velocity_deltas{-2.5, -1.25, 0.0, 1.25, 2.5};
  std::vector<double> end_times{1.5, 2.25, 3.0};
  double kappa_high_risk{0.05};       // 1/m
  double proximity_high_risk{10.0};   // m
  double intersection_near_dist{20.0};
  double a_lat_max{2.0};              // curvature-based velocity bound
  double w_rule{10.0};                // robustness deficit -> cost
};

struct CandidateTrajectory {
  QuinticPolynomial lateral;
  QuarticPolynomial longitudinal;
  double T_c{0.0};
  int index{0};
  Trajectory trajectory;            // sampled Cartesian states
  std::vector<double> s_samples;    // longitudinal position per sample
  std::vector<double> s_dot_samples;
  double cost{0.0};
  bool feasible{true};
  std::string rejection_reason;
};

// Cartesian -> Frenet. s_ddot is unknown from a single state and set to 0;
// d_ddot is seeded from the current steering angle so a fresh candidate
// starts with the vehicle's actual path curvature.
inline FrenetState to_frenet(const ReferencePath& path, const VehicleState& state,
                             const VehicleParameters& params) {
  auto proj = path.project(state.position());
  if (proj.beyond_start || proj.beyond_end)
    throw ProjectionError("state projects beyond the reference path");
  FrenetState fs;
  fs.s = proj.s;
  fs.d = proj.d;
  double theta_r = path.heading_at(proj.s);
  double kappa_r = path.curvature_at(proj.s);
  double dtheta = wrap_angle(state.phi - theta_r);
  double denom = 1.0 - kappa_r * proj.d;
  if (std::abs(denom) < 1e-6) denom = denom < 0 ? -1e-6 : 1e-6;
  fs.s_dot = state.v * std::cos(dtheta) / denom;
  fs.d_dot = state.v * std::sin(dtheta);
  double kappa_body = std::tan(state.delta) / params.wheelbase;
  fs.d_ddot = state.v * std::cos(dtheta) * (state.v * kappa_body - fs.s_dot * kappa_r);
  fs.s_ddot = 0.0;
  return fs;
}

// Frenet -> Cartesian position mapping.
inline Vec2 from_frenet(const ReferencePath& path, double s, double d) {
  auto e = path.eval(s);
  Vec2 tang = normalized(e.d1);
  return e.p + left_normal(tang) * d;
}

// Sample a candidate into Cartesian states. Speed and heading come from the
// position chords, and delta inverts the single-track heading update, so the
// one-step position residual of the sampled trajectory is exactly zero.
inline void sample_candidate(CandidateTrajectory& cand, const ReferencePath& path, double dt,
                             const VehicleParameters& params, int t0_step,
                             const VehicleState& current) {
  int n = static_cast<int>(std::floor(cand.T_c / dt + 1e-9));
  std::vector<Vec2> pts;
  pts.reserve(static_cast<size_t>(n) + 1);
  cand.s_samples.clear();
  cand.s_dot_samples.clear();
  for (int k = 0; k <= n; ++k) {
    double t = k * dt;
    double s = cand.longitudinal.value(t);
    if (s > path.total_length() - 1e-9) break;  // truncate at the path end
    double d = cand.lateral.value(t);
    pts.push_back(from_frenet(path, s, d));
    cand.s_samples.push_back(s);
    cand.s_dot_samples.push_back(cand.longitudinal.d1(t));
  }
  Trajectory& traj = cand.trajectory;
  traj.t0_step = t0_step;
  traj.states.assign(pts.size(), VehicleState{});
  if (pts.empty()) return;
  const size_t m = pts.size();
  for (size_t k = 0; k < m; ++k) {
    traj.states[k].x = pts[k].x;
    traj.states[k].y = pts[k].y;
    if (k + 1 < m) {
      Vec2 chord = pts[k + 1] - pts[k];
      double len = norm(chord);
      traj.states[k].v = len / dt;
      traj.states[k].phi = len > 1e-9 ? std::atan2(chord.y, chord.x)
                                      : (k > 0 ? traj.states[k - 1].phi : current.phi);
    } else {
      traj.states[k].v = k > 0 ? traj.states[k - 1].v : current.v;
      traj.states[k].phi = k > 0 ? traj.states[k - 1].phi : current.phi;
    }
  }
  // delta inverts the heading update; values beyond delta_max are kept so the
  // bound check rejects over-curved candidates.
  for (size_t k = 0; k + 1 < m; ++k) {
    double v = traj.states[k].v;
    if (v > 0.1) {
      double dphi = wrap_angle(traj.states[k + 1].phi - traj.states[k].phi);
      traj.states[k].delta = std::atan(dphi * params.wheelbase / (v * dt));
    } else {
      traj.states[k].delta = k > 0 ? traj.states[k - 1].delta : current.delta;
    }
  }
  if (m >= 2) traj.states[m - 1].delta = traj.states[m - 2].delta;
}

// Temporal-spatial lattice: lateral quintics to each sampled end offset,
// velocity-keeping quartics to each sampled end velocity, crossed with the
// end-time grid. Enumeration order fixes the tie-break index.
inline std::vector<CandidateTrajectory> generate_candidates(const FrenetState& fs0,
                                                            const PlannerConfig& config,
                                                            double v_limit) {
  std::vector<CandidateTrajectory> cands;
  cands.reserve(config.end_times.size() * config.lateral_end_offsets.size() *
                config.end_velocity_deltas.size());
  int index = 0;
  for (double T : config.end_times) {
    for (double d_end : config.lateral_end_offsets) {
      for (double dv : config.end_velocity_deltas) {
        CandidateTrajectory c;
        c.T_c = T;
        c.index = index++;
        double v_end = std::clamp(fs0.s_dot + dv, 0.0, v_limit);
        c.lateral = QuinticPolynomial(fs0.d, fs0.d_dot, fs0.d_ddot, d_end, 0.0, 0.0, T);
        c.longitudinal = QuarticPolynomial(fs0.s, fs0.s_dot, fs0.s_ddot, v_end, T);
        cands.push_back(c);
      }
    }
  }
  return cands;
}

struct SelectionContext {
  const Scenario* scenario{nullptr};
  const ReferencePath* path{nullptr};
  const std::vector<OccupancyPrediction>* predictions{nullptr};
  std::vector<ObstacleTrack> tracks;  // aligned occupancies incl. current poses
  int t0_step{0};
  VehicleState current;
  RuleParameters rule_params;
};

// TR1 with obstacle poses taken from explicit tracks instead of the
// scenario replay (candidate costing against live predictions).
inline CostReport tr1_cost_with_tracks(const Trajectory& traj, const Scenario& sc, double dt,
                                       std::span<const ObstacleTrack> tracks) {
  const size_t n = traj.states.size();
  if (n < 4) throw TrajectoryTooShort("tr1_cost needs at least 4 states");
  CostReport r;
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
    for (const auto& tr : tracks) {
      const OrientedRect* rect = tr.at_step(step);
      if (!rect) continue;
      Vec2 rel = rect->center - pos;
      if (dot(rel, heading) <= 0.0) continue;
      double gap = std::max(0.0, norm(rel) - half_ego - 0.5 * rect->length);
      xi_max = std::max(xi_max, std::exp(-kTr1DistanceWeight * gap));
      any_frontal = true;
    }
    if (any_frontal) r.J_D += xi_max * dt;
  }
  r.total();
  return r;
}

// Feasibility filter + cost selection. Feasibility reuses the drivability
// checks verbatim so whatever the planner returns also passes the final
// verdict. Cost is the TR1 total plus the rule-violation penalty; ties go to
// the lowest candidate index.
inline CandidateTrajectory select_trajectory(std::vector<CandidateTrajectory>& candidates,
                                             const SelectionContext& ctx,
                                             const PlannerConfig& config,
                                             const VehicleParameters& params) {
  const Scenario& sc = *ctx.scenario;
  const double dt = sc.planning_problem.time_step;
  const CandidateTrajectory* best = nullptr;
  for (auto& cand : candidates) {
    sample_candidate(cand, *ctx.path, dt, params, ctx.t0_step, ctx.current);
    if (cand.trajectory.states.size() < 4) {
      cand.feasible = false;
      cand.rejection_reason = "too_short";
      continue;
    }
    FeasibilityVerdict kin = check_kinematics(cand.trajectory, params, dt);
    if (!kin.kinematically_feasible) {
      cand.feasible = false;
      cand.rejection_reason = "kinematics:" + kin.violated_bound;
      continue;
    }
    FeasibilityVerdict col = check_collision(cand.trajectory, ctx.tracks, params);
    if (!col.collision_free) {
      cand.feasible = false;
      cand.rejection_reason = "collision";
      continue;
    }
    FeasibilityVerdict road = check_road_compliance(cand.trajectory, sc, params);
    if (!road.road_compliant) {
      cand.feasible = false;
      cand.rejection_reason = "road";
      continue;
    }
    bool constraint_ok = true;
    for (size_t k = 0; k < cand.trajectory.states.size() && constraint_ok; ++k) {
      double limit = speed_limit_at(sc, cand.trajectory.states[k].position());
      if (cand.s_dot_samples[k] > limit + 1e-6) {
        cand.feasible = false;
        cand.rejection_reason = "speed_limit";
        constraint_ok = false;
      } else {
        double kap = std::abs(ctx.path->curvature_at(cand.s_samples[k]));
        if (cand.s_dot_samples[k] * cand.s_dot_samples[k] * kap > config.a_lat_max + 1e-9) {
          cand.feasible = false;
          cand.rejection_reason = "curvature";
          constraint_ok = false;
        }
      }
    }
    if (!constraint_ok) continue;

    CostReport tr1 = tr1_cost_with_tracks(cand.trajectory, sc, dt, ctx.tracks);
    double cost = tr1.J_ego;
    if (ctx.predictions) {
      RuleRobustness g1 =
          robustness_g1(cand.trajectory, *ctx.predictions, sc, params, dt, ctx.rule_params);
      double v_limit = speed_limit_at(sc, ctx.current.position());
      double g4 = robustness_g4(cand.trajectory, *ctx.predictions, sc, v_limit, dt, ctx.rule_params);
      if (std::isfinite(g1.rho_g1)) cost += config.w_rule * std::max(0.0, -g1.rho_g1);
      if (std::isfinite(g4)) cost += config.w_rule * std::max(0.0, -g4);
    }
    cand.cost = cost;
    cand.feasible = true;
    if (!best || cand.cost < best->cost) best = &cand;
  }
  if (!best) throw NoFeasibleCandidate("all candidates rejected");
  return *best;
}

// Replanning schedule: the nominal interval, shortened in high-risk
// situations (sharp path curvature, close traffic, intersection guard).
inline double next_replan_interval(const VehicleState& state, const Scenario& sc,
                                   const ReferencePath& path,
                                   const std::vector<Vec2>& obstacle_positions,
                                   const PlannerConfig& config) {
  auto proj = path.project(state.position());
  if (std::abs(path.curvature_at(proj.s)) > config.kappa_high_risk)
    return config.replan_interval_high_risk_s;
  for (const auto& p : obstacle_positions) {
    if (distance(p, state.position()) < config.proximity_high_risk)
      return config.replan_interval_high_risk_s;
  }
  if (in_intersection_guard(sc, state.position(), config.intersection_near_dist))
    return config.replan_interval_high_risk_s;
  return config.replan_interval_s;
}

}  // namespace roadbench
