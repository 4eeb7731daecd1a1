#pragma once

#include <cmath>
#include <vector>

#include "roadbench/scenario.hpp"

namespace roadbench {

struct ControlInput {
  double a{0.0};        // longitudinal acceleration
  double v_delta{0.0};  // steering velocity
};

struct Trajectory {
  std::vector<VehicleState> states;  // uniform time_step spacing
  int t0_step{0};

  size_t size() const { return states.size(); }
  const VehicleState& at(size_t i) const { return states[i]; }
};

// Forward-Euler step of the kinematic single-track model. All right-hand
// sides use the pre-step state; v and delta are clamped to the vehicle
// bounds afterwards.
inline VehicleState step_single_track(const VehicleState& s, const ControlInput& u, double dt,
                                      const VehicleParameters& p) {
  VehicleState n;
  n.x = s.x + s.v * std::cos(s.phi) * dt;
  n.y = s.y + s.v * std::sin(s.phi) * dt;
  n.phi = s.phi + s.v / p.wheelbase * std::tan(s.delta) * dt;
  n.v = std::clamp(s.v + u.a * dt, p.v_min, p.v_max);
  n.delta = std::clamp(s.delta + u.v_delta * dt, -p.delta_max, p.delta_max);
  return n;
}

inline Trajectory rollout(const VehicleState& s0, const std::vector<ControlInput>& inputs,
                          double dt, const VehicleParameters& p, int t0_step = 0) {
  Trajectory traj;
  traj.t0_step = t0_step;
  traj.states.reserve(inputs.size() + 1);
  traj.states.push_back(s0);
  for (const auto& u : inputs) traj.states.push_back(step_single_track(traj.states.back(), u, dt, p));
  return traj;
}

struct ReconstructedInput {
  double a{0.0};
  double v_delta{0.0};
  double residual{0.0};  // position gap of the one-step model prediction
};

// Finite-difference input reconstruction per consecutive state pair. The
// residual measures how far the actual next state is from the single-track
// prediction under the reconstructed inputs; teleports show up here.
inline std::vector<ReconstructedInput> reconstruct_inputs(const Trajectory& traj, double dt,
                                                          const VehicleParameters& p) {
  std::vector<ReconstructedInput> out;
  if (traj.states.size() < 2) return out;
  out.reserve(traj.states.size() - 1);
  for (size_t i = 0; i + 1 < traj.states.size(); ++i) {
    const VehicleState& s1 = traj.states[i];
    const VehicleState& s2 = traj.states[i + 1];
    ReconstructedInput r;
    r.a = (s2.v - s1.v) / dt;
    r.v_delta = (s2.delta - s1.delta) / dt;
    VehicleState pred = step_single_track(s1, {r.a, r.v_delta}, dt, p);
    r.residual = std::hypot(s2.x - pred.x, s2.y - pred.y);
    out.push_back(r);
  }
  return out;
}

}  // namespace roadbench
