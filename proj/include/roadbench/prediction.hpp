#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "roadbench/scenario.hpp"

namespace roadbench {

struct PredState {
  double x{0.0};
  double y{0.0};
  double v{0.0};
  double theta{0.0};
};

struct PredInput {
  double a{0.0};      // longitudinal acceleration
  double omega{0.0};  // yaw rate
};

// Discrete kinematic recursion for traffic prediction. Position advances
// with the pre-step velocity and heading; velocity is clamped at 0 so a
// braking forecast never reverses.
inline PredState predict_state(const PredState& s, const PredInput& u, double dt) {
  PredState n;
  n.x = s.x + s.v * std::cos(s.theta) * dt;
  n.y = s.y + s.v * std::sin(s.theta) * dt;
  n.v = s.v + u.a * dt;
  n.theta = s.theta + u.omega * dt;
  if (n.v < 0.0) n.v = 0.0;
  return n;
}

struct OccupancyStep {
  PredState state;
  OrientedRect rect;
};

struct OccupancyPrediction {
  int obstacle_id{0};
  int t0_step{0};                   // step at which the prediction was made
  std::vector<OccupancyStep> steps; // entry i covers step t0_step + 1 + i

  const OrientedRect* rect_at_step(int global_step) const {
    int i = global_step - t0_step - 1;
    if (i < 0 || i >= static_cast<int>(steps.size())) return nullptr;
    return &steps[static_cast<size_t>(i)].rect;
  }
};

using InputEstimator = std::function<PredInput(std::span<const PredState> history, double dt)>;

// Two-point finite differences of the most recent observations; (0, 0)
// when fewer than two states are available.
inline PredInput estimate_input_finite_difference(std::span<const PredState> history, double dt) {
  if (history.size() < 2 || dt <= 0.0) return {0.0, 0.0};
  const PredState& prev = history[history.size() - 2];
  const PredState& cur = history[history.size() - 1];
  return {(cur.v - prev.v) / dt, wrap_angle(cur.theta - prev.theta) / dt};
}

// Constant-input forward simulation of one dynamic obstacle over the
// horizon, emitting an oriented-rectangle occupancy per future step.
inline OccupancyPrediction predict_obstacle(const Obstacle& obstacle,
                                            std::span<const PredState> history, int t0_step,
                                            double horizon_s, double dt,
                                            const InputEstimator& estimator = estimate_input_finite_difference) {
  OccupancyPrediction pred;
  pred.obstacle_id = obstacle.id;
  pred.t0_step = t0_step;
  if (history.empty()) return pred;
  PredInput u = estimator(history, dt);
  PredState s = history.back();
  int n_steps = static_cast<int>(std::ceil(horizon_s / dt - 1e-9));
  pred.steps.reserve(static_cast<size_t>(n_steps));
  for (int k = 0; k < n_steps; ++k) {
    s = predict_state(s, u, dt);
    pred.steps.push_back(
        {s, OrientedRect{{s.x, s.y}, s.theta, obstacle.length, obstacle.width}});
  }
  return pred;
}

}  // namespace roadbench
