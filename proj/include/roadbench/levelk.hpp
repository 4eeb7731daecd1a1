#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "roadbench/drivability.hpp"
#include "roadbench/dynamics.hpp"
#include "roadbench/prediction.hpp"
#include "roadbench/route.hpp"
#include "roadbench/scenario.hpp"

namespace roadbench {

struct Maneuver {
  int index{1};  // 1-based, matching the published table
  double a{0.0};
  double omega{0.0};
};

// The 14-maneuver action space.
inline const std::array<Maneuver, 14>& maneuver_table() {
  static const std::array<Maneuver, 14> table = {{
      {1, 0.0, 0.0},           // maintain
      {2, -1.5, 0.0},          // small deceleration
      {3, 1.5, 0.0},           // small acceleration
      {4, -3.5, 0.0},          // medium deceleration
      {5, 2.5, 0.0},           // large acceleration
      {6, -5.0, 0.0},          // large deceleration
      {7, 0.0, M_PI / 4.0},    // small steering left
      {8, 0.0, -M_PI / 4.0},   // small steering right
      {9, 0.0, M_PI / 2.0},    // large steering left
      {10, 0.0, -M_PI / 2.0},  // large steering right
      {11, 1.5, M_PI / 4.0},   // acceleration + left
      {12, 1.5, -M_PI / 4.0},  // acceleration + right
      {13, -1.5, M_PI / 4.0},  // braking + left
      {14, -1.5, -M_PI / 4.0}, // braking + right
  }};
  return table;
}

struct ActionSequence {
  std::vector<Maneuver> maneuvers;

  bool operator==(const ActionSequence& o) const {
    if (maneuvers.size() != o.maneuvers.size()) return false;
    for (size_t i = 0; i < maneuvers.size(); ++i)
      if (maneuvers[i].index != o.maneuvers[i].index) return false;
    return true;
  }
};

// Lexicographic enumeration of all 14^T sequences, position 0 most
// significant. Sequence number n decodes most-significant-digit first.
inline ActionSequence decode_sequence(std::uint64_t n, int T) {
  const auto& table = maneuver_table();
  ActionSequence seq;
  seq.maneuvers.resize(static_cast<size_t>(T));
  for (int pos = T - 1; pos >= 0; --pos) {
    seq.maneuvers[static_cast<size_t>(pos)] = table[n % 14];
    n /= 14;
  }
  return seq;
}

inline std::uint64_t sequence_count(int T) {
  std::uint64_t c = 1;
  for (int i = 0; i < T; ++i) c *= 14;
  return c;
}

struct Belief {
  std::array<double, 3> p{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  void normalize() {
    double sum = p[0] + p[1] + p[2];
    if (sum > 0.0)
      for (auto& v : p) v /= sum;
  }
};

struct RewardWeights {
  double w1{1000.0};  // collision risk
  double w2{50.0};    // safe distance
  double w3{200.0};   // off-road
  double w4{100.0};   // lane keeping / driving direction
  double w5{10.0};    // progress toward the target lane
};

struct LevelKConfig {
  int T_g{3};                 // decision steps over the 3 s horizon
  double dt_action{1.0};      // one decision step
  RewardWeights weights;
  double belief_retain{0.8};  // exponential smoothing toward one_hot(k*)
};

// One participant of the intersection game.
struct GameAgent {
  int id{-1};  // obstacle id, -1 for the ego
  PredState state;
  double length{4.3};
  double width{1.7};
  PredInput frozen_input;     // observed current inputs, level-0 opponents
  Polyline progress_path;     // centerline chain toward the agent's target
  std::vector<double> progress_cum;
};

// Apply each maneuver for one decision step, sub-stepped at the scenario dt.
// Returns T+1 states including the initial one.
inline std::vector<PredState> rollout_sequence(const PredState& initial, const ActionSequence& seq,
                                               double dt_action, double dt) {
  int n_sub = std::max(1, static_cast<int>(std::lround(dt_action / dt)));
  std::vector<PredState> out;
  out.reserve(seq.maneuvers.size() + 1);
  out.push_back(initial);
  PredState cur = initial;
  for (const auto& m : seq.maneuvers) {
    PredInput u{m.a, m.omega};
    for (int i = 0; i < n_sub; ++i) cur = predict_state(cur, u, dt);
    out.push_back(cur);
  }
  return out;
}

inline std::vector<PredState> rollout_constant(const PredState& initial, const PredInput& u, int T,
                                               double dt_action, double dt) {
  int n_sub = std::max(1, static_cast<int>(std::lround(dt_action / dt)));
  std::vector<PredState> out;
  out.reserve(static_cast<size_t>(T) + 1);
  out.push_back(initial);
  PredState cur = initial;
  for (int k = 0; k < T; ++k) {
    for (int i = 0; i < n_sub; ++i) cur = predict_state(cur, u, dt);
    out.push_back(cur);
  }
  return out;
}

namespace detail {

inline bool in_driving_lanelet(const Scenario& sc, const Vec2& p) {
  for (const auto& l : sc.lanelets)
    if (l.lane_type == LaneType::driving && point_in_polygon(l.polygon(), p)) return true;
  return false;
}

// Smallest heading deviation from the local centerline direction over the
// driving lanelets containing the point; pi when the point is off-road.
inline double lane_direction_deviation(const Scenario& sc, const Vec2& p, double heading) {
  double best = M_PI;
  bool contained = false;
  for (const auto& l : sc.lanelets) {
    if (l.lane_type != LaneType::driving) continue;
    if (!point_in_polygon(l.polygon(), p)) continue;
    contained = true;
    const Polyline& cl = l.centerline;
    double best_d = std::numeric_limits<double>::infinity();
    double dir = heading;
    for (size_t i = 0; i + 1 < cl.size(); ++i) {
      Vec2 a = cl[i], ab = cl[i + 1] - a;
      double len2 = dot(ab, ab);
      double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
      double d = distance(p, a + ab * t);
      if (d < best_d) {
        best_d = d;
        dir = std::atan2(ab.y, ab.x);
      }
    }
    best = std::min(best, std::abs(wrap_angle(heading - dir)));
  }
  return contained ? best : M_PI;
}

inline double remaining_progress(const GameAgent& agent, const Vec2& p) {
  if (agent.progress_path.size() < 2) return 0.0;
  auto proj = project_to_polyline(agent.progress_path, agent.progress_cum, p);
  return std::max(0.0, agent.progress_cum.back() - proj.s);
}

}  // namespace detail

// Cumulative reward of a rollout against fixed opponent rollouts. All terms
// are summed over the post-action decision steps.
inline double reward(const std::vector<PredState>& ego_rollout, const GameAgent& ego,
                     const std::vector<std::vector<PredState>>& other_rollouts,
                     const std::vector<const GameAgent*>& others, const Scenario& sc,
                     const RewardWeights& w) {
  double c_term = 0.0, s_term = 0.0, o_term = 0.0, l_term = 0.0, d_term = 0.0;
  double initial_remaining =
      std::max(1e-6, detail::remaining_progress(ego, {ego_rollout[0].x, ego_rollout[0].y}));
  for (size_t k = 1; k < ego_rollout.size(); ++k) {
    const PredState& es = ego_rollout[k];
    Vec2 pos{es.x, es.y};
    OrientedRect ego_rect{pos, es.theta, ego.length, ego.width};

    double d_min = std::numeric_limits<double>::infinity();
    bool collided = false;
    for (size_t j = 0; j < others.size(); ++j) {
      if (k >= other_rollouts[j].size()) continue;
      const PredState& os = other_rollouts[j][k];
      OrientedRect other_rect{{os.x, os.y}, os.theta, others[j]->length, others[j]->width};
      if (rects_overlap(ego_rect, other_rect)) collided = true;
      d_min = std::min(d_min, distance(pos, {os.x, os.y}));
    }
    if (collided) c_term -= 1.0;
    if (std::isfinite(d_min)) s_term -= std::exp(-0.5 * d_min);

    if (!detail::in_driving_lanelet(sc, pos)) o_term -= 1.0;
    if (detail::lane_direction_deviation(sc, pos, es.theta) > M_PI / 2.0) l_term -= 1.0;

    d_term -= detail::remaining_progress(ego, pos) / initial_remaining;
  }
  return w.w1 * c_term + w.w2 * s_term + w.w3 * o_term + w.w4 * l_term + w.w5 * d_term;
}

using ResponseMemo = std::map<std::pair<int, size_t>, ActionSequence>;

// Recursive level-k best response for agents[target]. Level 0 freezes the
// opponents at their observed constant inputs; level k>=1 lets them play
// their level-(k-1) responses. Ties return the sequence computed last in
// enumeration order.
inline ActionSequence best_response(int level, size_t target, const std::vector<GameAgent>& agents,
                                    const Scenario& sc, const RewardWeights& weights,
                                    const LevelKConfig& cfg, double dt, ResponseMemo* memo = nullptr) {
  ResponseMemo local;
  ResponseMemo& m = memo ? *memo : local;
  auto key = std::make_pair(level, target);
  auto it = m.find(key);
  if (it != m.end()) return it->second;

  std::vector<std::vector<PredState>> other_rollouts;
  std::vector<const GameAgent*> others;
  for (size_t j = 0; j < agents.size(); ++j) {
    if (j == target) continue;
    others.push_back(&agents[j]);
    if (level == 0) {
      other_rollouts.push_back(
          rollout_constant(agents[j].state, agents[j].frozen_input, cfg.T_g, cfg.dt_action, dt));
    } else {
      ActionSequence gj = best_response(level - 1, j, agents, sc, weights, cfg, dt, &m);
      other_rollouts.push_back(rollout_sequence(agents[j].state, gj, cfg.dt_action, dt));
    }
  }

  const std::uint64_t count = sequence_count(cfg.T_g);
  ActionSequence best_seq;
  double best_r = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 0; n < count; ++n) {
    ActionSequence seq = decode_sequence(n, cfg.T_g);
    auto ego_rollout = rollout_sequence(agents[target].state, seq, cfg.dt_action, dt);
    double r = reward(ego_rollout, agents[target], other_rollouts, others, sc, weights);
    if (r >= best_r) {
      best_r = r;
      best_seq = seq;
    }
  }
  m[key] = best_seq;
  return best_seq;
}

struct SelectActionResult {
  ActionSequence sequence;
  double expected_reward{0.0};
  // first-action inputs predicted per opponent and reasoning level,
  // consumed by the belief update after execution
  std::map<int, std::array<PredInput, 3>> level_first_inputs;
};

// Belief-weighted action selection: each opponent plays its level-k response,
// the expectation runs over the joint independent belief product, and ties
// return the sequence computed last.
inline SelectActionResult select_action(const std::vector<GameAgent>& agents,
                                        const std::map<int, Belief>& beliefs, const Scenario& sc,
                                        const LevelKConfig& cfg, double dt) {
  SelectActionResult result;
  const RewardWeights& weights = cfg.weights;
  ResponseMemo memo;

  std::vector<const GameAgent*> others;
  std::vector<std::array<std::vector<PredState>, 3>> level_rollouts;
  std::vector<const Belief*> other_beliefs;
  static const Belief uniform_belief{};
  for (size_t j = 1; j < agents.size(); ++j) {
    others.push_back(&agents[j]);
    std::array<std::vector<PredState>, 3> lr;
    std::array<PredInput, 3> finputs{};
    for (int k = 0; k < 3; ++k) {
      ActionSequence gk = best_response(k, j, agents, sc, weights, cfg, dt, &memo);
      lr[static_cast<size_t>(k)] = rollout_sequence(agents[j].state, gk, cfg.dt_action, dt);
      finputs[static_cast<size_t>(k)] = {gk.maneuvers[0].a, gk.maneuvers[0].omega};
    }
    level_rollouts.push_back(std::move(lr));
    result.level_first_inputs[agents[j].id] = finputs;
    auto bit = beliefs.find(agents[j].id);
    other_beliefs.push_back(bit != beliefs.end() ? &bit->second : &uniform_belief);
  }

  // joint belief combinations over the opponents
  struct Combo {
    double weight;
    std::vector<int> levels;
  };
  std::vector<Combo> combos;
  std::vector<int> levels(others.size(), 0);
  auto build = [&](auto&& self, size_t j, double wgt) -> void {
    if (wgt <= 0.0) return;
    if (j == others.size()) {
      combos.push_back({wgt, levels});
      return;
    }
    for (int k = 0; k < 3; ++k) {
      levels[j] = k;
      self(self, j + 1, wgt * other_beliefs[j]->p[static_cast<size_t>(k)]);
    }
  };
  build(build, 0, 1.0);
  if (combos.empty()) combos.push_back({1.0, std::vector<int>(others.size(), 0)});

  const std::uint64_t count = sequence_count(cfg.T_g);
  double best_r = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<PredState>> combo_rollouts(others.size());
  for (std::uint64_t n = 0; n < count; ++n) {
    ActionSequence seq = decode_sequence(n, cfg.T_g);
    auto ego_rollout = rollout_sequence(agents[0].state, seq, cfg.dt_action, dt);
    double rp = 0.0;
    for (const auto& combo : combos) {
      for (size_t j = 0; j < others.size(); ++j)
        combo_rollouts[j] = level_rollouts[j][static_cast<size_t>(combo.levels[j])];
      rp += combo.weight * reward(ego_rollout, agents[0], combo_rollouts, others, sc, weights);
    }
    if (rp >= best_r) {
      best_r = rp;
      result.sequence = seq;
    }
  }
  result.expected_reward = best_r;
  return result;
}

// Blend the belief toward the level that best explains the observed inputs
// (1-norm on the input vector, ties toward the smallest k).
inline Belief update_belief(const Belief& belief, const PredInput& observed,
                            const std::array<PredInput, 3>& level_predictions,
                            double retain = 0.8) {
  int k_star = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const PredInput& pred = level_predictions[static_cast<size_t>(k)];
    double d = std::abs(observed.a - pred.a) + std::abs(observed.omega - pred.omega);
    if (d < best) {
      best = d;
      k_star = k;
    }
  }
  Belief out;
  for (int i = 0; i < 3; ++i)
    out.p[static_cast<size_t>(i)] =
        retain * belief.p[static_cast<size_t>(i)] + (i == k_star ? 1.0 - retain : 0.0);
  out.normalize();
  return out;
}

// Maximal deceleration to standstill while unwinding the steering angle.
inline Trajectory emergency_braking_trajectory(const VehicleState& ego, int n_steps, double dt,
                                               const VehicleParameters& params, int t0_step) {
  Trajectory traj;
  traj.t0_step = t0_step;
  traj.states.push_back(ego);
  VehicleState cur = ego;
  for (int i = 0; i < n_steps; ++i) {
    double a = cur.v > 0.0 ? -std::min(params.a_max, cur.v / dt)
                           : std::min(params.a_max, -cur.v / dt);
    double v_delta = std::clamp(-cur.delta / dt, -params.v_delta_max, params.v_delta_max);
    cur = step_single_track(cur, {a, v_delta}, dt, params);
    traj.states.push_back(cur);
  }
  return traj;
}

struct IntersectionPlan {
  Trajectory trajectory;
  SelectActionResult decision;
  bool emergency{false};
};

// Game-theoretic intersection planning: select an action sequence, convert
// the first maneuver into single-track states (steering tracked toward
// tan(delta) = omega * wheelbase / v at the bounded rate), and fall back to
// emergency braking when the conversion is not drivable.
inline IntersectionPlan plan_intersection(const VehicleState& ego,
                                          const std::vector<GameAgent>& agents,
                                          const std::map<int, Belief>& beliefs, const Scenario& sc,
                                          const LevelKConfig& cfg,
                                          std::span<const ObstacleTrack> tracks,
                                          const VehicleParameters& params, int t0_step) {
  const double dt = sc.planning_problem.time_step;
  IntersectionPlan plan;
  plan.decision = select_action(agents, beliefs, sc, cfg, dt);
  const Maneuver& m0 = plan.decision.sequence.maneuvers[0];

  int n_steps = std::max(1, static_cast<int>(std::lround(cfg.dt_action / dt)));
  Trajectory traj;
  traj.t0_step = t0_step;
  traj.states.push_back(ego);
  VehicleState cur = ego;
  for (int i = 0; i < n_steps; ++i) {
    double delta_target =
        cur.v > 0.1 ? std::atan(m0.omega * params.wheelbase / cur.v) : 0.0;
    delta_target = std::clamp(delta_target, -params.delta_max, params.delta_max);
    double v_delta = std::clamp((delta_target - cur.delta) / dt, -params.v_delta_max,
                                params.v_delta_max);
    double a = std::clamp(m0.a, -params.a_max, params.a_max);
    if (cur.v + a * dt < 0.0) a = -cur.v / dt;  // hold at standstill
    cur = step_single_track(cur, {a, v_delta}, dt, params);
    traj.states.push_back(cur);
  }

  FeasibilityVerdict verdict = check_feasibility(traj, sc, tracks, params);
  if (verdict.feasible()) {
    plan.trajectory = std::move(traj);
  } else {
    plan.trajectory = emergency_braking_trajectory(ego, n_steps, dt, params, t0_step);
    plan.emergency = true;
  }
  return plan;
}

}  // namespace roadbench
