#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <vector>

#include "roadbench/errors.hpp"
#include "roadbench/geometry.hpp"
#include "roadbench/scenario.hpp"

namespace roadbench {

// Reference path: resampled centerline chain with a C1 Catmull-Rom chart on
// top. The chart is what the Frenet transforms use; projections invert the
// chart exactly, which keeps round-trips at solver precision.
struct ReferencePath {
  Polyline points;                 // uniform spacing
  std::vector<double> s;           // cumulative arc length per point
  std::vector<double> kappa;       // three-point circumcircle curvature per point
  std::vector<int> lanelet_sequence;
  double spacing{1.0};

  double total_length() const { return s.empty() ? 0.0 : s.back(); }

  // Catmull-Rom control point with reflected virtual endpoints.
  Vec2 ctrl(int i) const {
    int n = static_cast<int>(points.size());
    if (i < 0) return points[0] * 2.0 - points[1];
    if (i >= n) return points[n - 1] * 2.0 - points[n - 2];
    return points[static_cast<size_t>(i)];
  }

  struct SplineEval {
    Vec2 p;
    Vec2 d1;  // derivative w.r.t. arc parameter
    Vec2 d2;
  };

  SplineEval eval(double at_s) const {
    int n = static_cast<int>(points.size());
    double h = spacing;
    double sc = std::clamp(at_s, 0.0, s.back());
    int i = std::min(static_cast<int>(sc / h), n - 2);
    double u = (sc - s[static_cast<size_t>(i)]) / h;
    Vec2 p0 = ctrl(i - 1), p1 = ctrl(i), p2 = ctrl(i + 1), p3 = ctrl(i + 2);
    Vec2 a = p1 * 2.0;
    Vec2 b = p2 - p0;
    Vec2 c = p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3;
    Vec2 d = p1 * 3.0 - p0 - p2 * 3.0 + p3;
    SplineEval e;
    e.p = (a + b * u + c * (u * u) + d * (u * u * u)) * 0.5;
    e.d1 = (b + c * (2.0 * u) + d * (3.0 * u * u)) * (0.5 / h);
    e.d2 = (c * 2.0 + d * (6.0 * u)) * (0.5 / (h * h));
    return e;
  }

  Vec2 point_at(double at_s) const { return eval(at_s).p; }
  Vec2 tangent_at(double at_s) const { return normalized(eval(at_s).d1); }
  double heading_at(double at_s) const {
    Vec2 t = eval(at_s).d1;
    return std::atan2(t.y, t.x);
  }

  // Linear interpolation of the stored per-point curvature.
  double curvature_at(double at_s) const {
    if (kappa.empty()) return 0.0;
    double sc = std::clamp(at_s, 0.0, s.back());
    size_t i = std::min(static_cast<size_t>(sc / spacing), kappa.size() - 2);
    double t = (sc - s[i]) / spacing;
    return kappa[i] * (1.0 - t) + kappa[i + 1] * t;
  }

  struct Projection {
    double s{0.0};
    double d{0.0};  // left of the path positive
    bool beyond_start{false};
    bool beyond_end{false};
  };

  // Nearest-point projection onto the chart: Newton iterations on
  // g(s) = (p - gamma(s)) . gamma'(s), seeded at the nearest sample.
  Projection project(const Vec2& p) const {
    size_t best_i = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < points.size(); ++i) {
      double d = distance(points[i], p);
      if (d < best_d) {
        best_d = d;
        best_i = i;
      }
    }
    double cur = s[best_i];
    double lo = s[best_i > 0 ? best_i - 1 : 0];
    double hi = s[std::min(best_i + 1, s.size() - 1)];
    for (int iter = 0; iter < 60; ++iter) {
      SplineEval e = eval(cur);
      Vec2 r = p - e.p;
      double g = dot(r, e.d1);
      double dg = -dot(e.d1, e.d1) + dot(r, e.d2);
      if (std::abs(g) < 1e-13 * (1.0 + norm(e.d1))) break;
      double step;
      if (std::abs(dg) > 1e-15) {
        step = -g / dg;
      } else {
        step = g > 0 ? 0.25 * spacing : -0.25 * spacing;
      }
      // keep the iterate near the seed; fall back to bisection-sized moves
      step = std::clamp(step, -(hi - lo), hi - lo);
      double next = std::clamp(cur + step, 0.0, s.back());
      if (next == cur) break;
      cur = next;
    }
    SplineEval e = eval(cur);
    Vec2 r = p - e.p;
    Vec2 tang = normalized(e.d1);
    Projection proj;
    proj.s = cur;
    proj.d = dot(r, left_normal(tang));
    double along = dot(r, tang);
    proj.beyond_start = (cur <= 0.0 && along < -1e-9);
    proj.beyond_end = (cur >= s.back() && along > 1e-9);
    return proj;
  }
};

namespace detail {

inline Polyline moving_average3(const Polyline& pl) {
  if (pl.size() < 3) return pl;
  Polyline out = pl;
  for (size_t i = 1; i + 1 < pl.size(); ++i)
    out[i] = (pl[i - 1] + pl[i] + pl[i + 1]) * (1.0 / 3.0);
  return out;
}

inline ReferencePath make_reference_path(const Polyline& raw, std::vector<int> lanelet_seq,
                                         double target_spacing = 1.0) {
  Polyline smoothed = moving_average3(raw);
  double len = polyline_length(smoothed);
  size_t n_seg = std::max<size_t>(2, static_cast<size_t>(std::llround(len / target_spacing)));
  ReferencePath path;
  path.points = resample_uniform(smoothed, n_seg + 1);
  path.spacing = len / static_cast<double>(n_seg);
  path.s.resize(path.points.size());
  for (size_t i = 0; i < path.s.size(); ++i) path.s[i] = path.spacing * static_cast<double>(i);
  path.kappa.assign(path.points.size(), 0.0);
  for (size_t i = 1; i + 1 < path.points.size(); ++i)
    path.kappa[i] = circumcircle_curvature(path.points[i - 1], path.points[i], path.points[i + 1]);
  path.lanelet_sequence = std::move(lanelet_seq);
  return path;
}

inline bool polygons_intersect(const Polygon& a, const Polygon& b) {
  for (const auto& p : a)
    if (point_in_polygon(b, p)) return true;
  for (const auto& p : b)
    if (point_in_polygon(a, p)) return true;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]))
        return true;
  return false;
}

}  // namespace detail

// Intersection guard region: near a branching lanelet or inside physically
// overlapping lanes, where nearest-lane association is unreliable.
inline bool in_intersection_guard(const Scenario& sc, const Vec2& p, double near_dist = 20.0) {
  if (lanelet_containing(sc, p).size() > 1) return true;
  for (const auto& l : sc.lanelets) {
    if (l.lane_type != LaneType::driving) continue;
    if (l.successors.size() >= 2 && distance_to_polygon(l.polygon(), p) <= near_dist) return true;
  }
  return false;
}

// Shortest lanelet sequence by centerline length; same-direction adjacent
// lanes are traversable as lane changes with a fixed 5 m penalty.
inline std::vector<int> shortest_lanelet_sequence(const Scenario& sc,
                                                  const std::vector<int>& start_ids,
                                                  const std::vector<int>& goal_ids) {
  constexpr double kLaneChangePenalty = 5.0;
  std::map<int, double> dist;
  std::map<int, int> parent;
  using QItem = std::pair<double, int>;
  std::priority_queue<QItem, std::vector<QItem>, std::greater<>> q;
  for (int sid : start_ids) {
    const Lanelet* l = sc.find_lanelet(sid);
    if (!l || l->lane_type != LaneType::driving) continue;
    double d0 = l->centerline_length();
    if (!dist.count(sid) || d0 < dist[sid]) {
      dist[sid] = d0;
      parent[sid] = -1;
      q.push({d0, sid});
    }
  }
  std::set<int> goals(goal_ids.begin(), goal_ids.end());
  std::set<int> done;
  while (!q.empty()) {
    auto [d, id] = q.top();
    q.pop();
    if (done.count(id)) continue;
    done.insert(id);
    const Lanelet* l = sc.find_lanelet(id);
    if (!l) continue;
    auto relax = [&](int next_id, double extra) {
      const Lanelet* nl = sc.find_lanelet(next_id);
      if (!nl || nl->lane_type != LaneType::driving) return;
      double nd = d + extra + nl->centerline_length();
      if (!dist.count(next_id) || nd < dist[next_id] - 1e-12) {
        dist[next_id] = nd;
        parent[next_id] = id;
        q.push({nd, next_id});
      }
    };
    for (int nid : l->successors) relax(nid, 0.0);
    if (l->adjacent_left && l->adjacent_left->same_direction)
      relax(l->adjacent_left->id, kLaneChangePenalty);
    if (l->adjacent_right && l->adjacent_right->same_direction)
      relax(l->adjacent_right->id, kLaneChangePenalty);
  }
  int best_goal = -1;
  double best = std::numeric_limits<double>::infinity();
  for (int g : goals) {
    auto it = dist.find(g);
    if (it != dist.end() && it->second < best) {
      best = it->second;
      best_goal = g;
    }
  }
  if (best_goal < 0) throw NoRouteError("goal region unreachable in the lanelet graph");
  std::vector<int> seq;
  for (int cur = best_goal; cur != -1; cur = parent[cur]) seq.push_back(cur);
  std::reverse(seq.begin(), seq.end());
  return seq;
}

// Concatenate the sequence's centerlines. Successor transitions chain the
// full centerlines. A lane change leaves the current lane shortly after
// entering it and re-enters the neighbor a merge distance ahead, so the
// resampled path ramps across instead of doubling back.
inline Polyline concatenate_centerlines(const Scenario& sc, const std::vector<int>& seq) {
  constexpr double kMergeDistance = 15.0;  // ramp length of the lateral transition
  constexpr double kLeadWindow = 10.0;     // distance ridden before leaving the lane

  auto is_successor = [&](int from, int to) {
    const Lanelet* l = sc.find_lanelet(from);
    return l && std::find(l->successors.begin(), l->successors.end(), to) != l->successors.end();
  };

  Polyline raw;
  for (size_t k = 0; k < seq.size(); ++k) {
    const Lanelet* l = sc.find_lanelet(seq[k]);
    if (!l) continue;
    const Polyline& cl = l->centerline;
    auto cum = cumulative_arclength(cl);

    bool entered_by_change = k > 0 && !is_successor(seq[k - 1], seq[k]);
    bool leaves_by_change = k + 1 < seq.size() && !is_successor(seq[k], seq[k + 1]);

    double s_from = 0.0;
    if (!raw.empty()) {
      auto proj = project_to_polyline(cl, cum, raw.back());
      s_from = proj.s;
      if (entered_by_change) s_from = std::min(s_from + kMergeDistance, cum.back() - 1e-6);
    }
    double s_to = cum.back();
    if (leaves_by_change) s_to = std::min(s_to, s_from + kLeadWindow);

    Vec2 entry = point_at_arclength(cl, cum, s_from);
    if (raw.empty() || distance(raw.back(), entry) > 1e-9) raw.push_back(entry);
    for (size_t i = 0; i < cl.size(); ++i) {
      if (cum[i] > s_from + 1e-9 && cum[i] < s_to - 1e-9) raw.push_back(cl[i]);
    }
    Vec2 exit = point_at_arclength(cl, cum, s_to);
    if (distance(raw.back(), exit) > 1e-9) raw.push_back(exit);
  }
  return raw;
}

inline ReferencePath plan_route_from(const Scenario& sc, const VehicleState& start) {
  auto start_set = lanelet_containing(sc, start.position());
  std::vector<int> start_ids(start_set.begin(), start_set.end());
  if (start_ids.empty()) throw NoRouteError("start state does not intersect any lanelet");
  std::vector<int> goal_ids;
  for (const auto& l : sc.lanelets) {
    if (l.lane_type != LaneType::driving) continue;
    if (detail::polygons_intersect(l.polygon(), sc.planning_problem.goal_region.polygon))
      goal_ids.push_back(l.id);
  }
  if (goal_ids.empty()) throw NoRouteError("goal region does not intersect any lanelet");
  auto seq = shortest_lanelet_sequence(sc, start_ids, goal_ids);
  Polyline raw = concatenate_centerlines(sc, seq);
  if (raw.size() < 2) throw NoRouteError("degenerate route geometry");
  return detail::make_reference_path(raw, seq);
}

inline ReferencePath plan_route(const Scenario& sc) {
  return plan_route_from(sc, sc.planning_problem.initial_state);
}

// Lane-change update rule: re-plan when the ego's lane is not on the route,
// unless the ego is in the intersection guard region where the nearest-lane
// association is non-unique. Falls back to the previous path when no route
// exists from the new lane.
inline ReferencePath update_reference(const ReferencePath& path, const VehicleState& ego,
                                      const Scenario& sc) {
  if (in_intersection_guard(sc, ego.position())) return path;
  auto here = lanelet_containing(sc, ego.position());
  if (here.empty()) return path;
  for (int id : here) {
    if (std::find(path.lanelet_sequence.begin(), path.lanelet_sequence.end(), id) !=
        path.lanelet_sequence.end())
      return path;
  }
  try {
    return plan_route_from(sc, ego);
  } catch (const NoRouteError&) {
    return path;
  }
}

}  // namespace roadbench
