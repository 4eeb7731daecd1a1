#pragma once

#include <cmath>
#include <vector>

#include "roadbench/scenario.hpp"

namespace roadbench::build {

// Lanelet from a centerline and constant width. Bounds are offset along the
// averaged vertex normals, so the midpoint invariant holds exactly.
inline Lanelet lanelet_from_centerline(int id, const Polyline& centerline, double width,
                                       LaneType type = LaneType::driving) {
  Lanelet l;
  l.id = id;
  l.lane_type = type;
  l.centerline = centerline;
  const size_t n = centerline.size();
  l.left_bound.resize(n);
  l.right_bound.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Vec2 dir;
    if (i == 0)
      dir = centerline[1] - centerline[0];
    else if (i + 1 == n)
      dir = centerline[n - 1] - centerline[n - 2];
    else
      dir = normalized(centerline[i] - centerline[i - 1]) +
            normalized(centerline[i + 1] - centerline[i]);
    Vec2 nrm = left_normal(normalized(dir));
    l.left_bound[i] = centerline[i] + nrm * (0.5 * width);
    l.right_bound[i] = centerline[i] - nrm * (0.5 * width);
  }
  return l;
}

inline Lanelet straight_lanelet(int id, const Vec2& from, const Vec2& to, double width,
                                LaneType type = LaneType::driving) {
  return lanelet_from_centerline(id, {from, to}, width, type);
}

// Arc centerline around a center point; angles in radians, counterclockwise
// when a1 > a0.
inline Polyline arc_centerline(const Vec2& center, double radius, double a0, double a1,
                               int n_points) {
  Polyline pl;
  pl.reserve(static_cast<size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    double a = a0 + (a1 - a0) * static_cast<double>(i) / static_cast<double>(n_points - 1);
    pl.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return pl;
}

inline GoalRegion goal_box(const Vec2& center, double length, double width, int t_from, int t_to) {
  GoalRegion g;
  double hl = 0.5 * length, hw = 0.5 * width;
  g.polygon = {{center.x - hl, center.y - hw},
               {center.x + hl, center.y - hw},
               {center.x + hl, center.y + hw},
               {center.x - hl, center.y + hw}};
  g.time_step_interval = {t_from, t_to};
  return g;
}

inline Obstacle static_obstacle(int id, const Vec2& pos, double theta, double length,
                                double width) {
  Obstacle o;
  o.id = id;
  o.kind = ObstacleKind::static_;
  o.length = length;
  o.width = width;
  o.initial_state = RecordedState{0, pos.x, pos.y, theta, 0.0};
  return o;
}

// Constant-velocity recorded obstacle driving along the heading.
inline Obstacle recorded_constant_velocity(int id, const Vec2& start, double theta, double v,
                                           double length, double width, int n_steps, double dt) {
  Obstacle o;
  o.id = id;
  o.kind = ObstacleKind::dynamic_recorded;
  o.length = length;
  o.width = width;
  for (int t = 0; t <= n_steps; ++t) {
    o.recorded_trajectory.push_back(RecordedState{t, start.x + v * std::cos(theta) * dt * t,
                                                  start.y + v * std::sin(theta) * dt * t, theta,
                                                  v});
  }
  o.initial_state = o.recorded_trajectory.front();
  return o;
}

// Recorded obstacle parked at a fixed pose for the whole horizon.
inline Obstacle recorded_parked(int id, const Vec2& pos, double theta, double length, double width,
                                int n_steps) {
  Obstacle o;
  o.id = id;
  o.kind = ObstacleKind::dynamic_recorded;
  o.length = length;
  o.width = width;
  for (int t = 0; t <= n_steps; ++t)
    o.recorded_trajectory.push_back(RecordedState{t, pos.x, pos.y, theta, 0.0});
  o.initial_state = o.recorded_trajectory.front();
  return o;
}

inline Obstacle reactive_obstacle(int id, const Vec2& pos, double theta, double v,
                                  double length = 4.3, double width = 1.7) {
  Obstacle o;
  o.id = id;
  o.kind = ObstacleKind::dynamic_reactive;
  o.length = length;
  o.width = width;
  o.initial_state = RecordedState{0, pos.x, pos.y, theta, v};
  return o;
}

}  // namespace roadbench::build
