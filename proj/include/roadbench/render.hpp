#pragma once

#include <algorithm>
#include <fstream>
#include <limits>
#include <string>

#include "roadbench/dynamics.hpp"
#include "roadbench/scenario.hpp"

namespace roadbench {

// One SVG per scenario: lanelets grey, goal region yellow, obstacles blue,
// ego trajectory green.
inline void render_scenario_svg(const Scenario& sc, const Trajectory* executed,
                                const std::string& path) {
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  auto grow = [&](const Vec2& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const auto& l : sc.lanelets) {
    for (const auto& p : l.left_bound) grow(p);
    for (const auto& p : l.right_bound) grow(p);
  }
  for (const auto& p : sc.planning_problem.goal_region.polygon) grow(p);
  if (!std::isfinite(min_x)) {
    min_x = min_y = 0.0;
    max_x = max_y = 1.0;
  }
  double margin = 5.0;
  min_x -= margin;
  min_y -= margin;
  max_x += margin;
  max_y += margin;
  double scale = 900.0 / std::max(1.0, max_x - min_x);
  double w = (max_x - min_x) * scale;
  double h = (max_y - min_y) * scale;
  auto tx = [&](double x) { return (x - min_x) * scale; };
  auto ty = [&](double y) { return h - (y - min_y) * scale; };  // svg y is down

  std::ofstream out(path);
  if (!out) return;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << static_cast<int>(w)
      << "\" height=\"" << static_cast<int>(h) << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto write_polygon = [&](const Polygon& poly, const std::string& style) {
    out << "<polygon points=\"";
    for (const auto& p : poly) out << tx(p.x) << "," << ty(p.y) << " ";
    out << "\" " << style << "/>\n";
  };
  auto write_polyline = [&](const Polyline& pl, const std::string& style) {
    out << "<polyline points=\"";
    for (const auto& p : pl) out << tx(p.x) << "," << ty(p.y) << " ";
    out << "\" fill=\"none\" " << style << "/>\n";
  };
  auto write_rect = [&](const OrientedRect& r, const std::string& style) {
    Polygon poly;
    for (const auto& c : r.corners()) poly.push_back(c);
    write_polygon(poly, style);
  };

  for (const auto& l : sc.lanelets) {
    bool driving = l.lane_type == LaneType::driving;
    write_polygon(l.polygon(), driving
                                   ? "fill=\"#d9d9d9\" stroke=\"#9e9e9e\" stroke-width=\"1\""
                                   : "fill=\"#eeeeee\" stroke=\"#bdbdbd\" stroke-width=\"1\"");
  }
  write_polygon(sc.planning_problem.goal_region.polygon,
                "fill=\"#f4d03f\" stroke=\"#c9a227\" stroke-width=\"1\" fill-opacity=\"0.85\"");

  for (const auto& o : sc.obstacles) {
    if (o.kind == ObstacleKind::dynamic_recorded && o.recorded_trajectory.size() > 1) {
      Polyline track;
      for (const auto& s : o.recorded_trajectory) track.push_back({s.x, s.y});
      write_polyline(track, "stroke=\"#7da2e8\" stroke-width=\"1.5\"");
    }
    write_rect(o.footprint(o.state_at_step(0)),
               "fill=\"#3b6fd4\" stroke=\"#27498c\" stroke-width=\"1\" fill-opacity=\"0.9\"");
  }

  OrientedRect ego0 = ego_footprint(sc.planning_problem.initial_state, sc.vehicle_parameters);
  write_rect(ego0, "fill=\"#2e9e57\" stroke=\"#1d6b3a\" stroke-width=\"1\"");
  if (executed && executed->states.size() > 1) {
    Polyline track;
    for (const auto& s : executed->states) track.push_back(s.position());
    write_polyline(track, "stroke=\"#2e9e57\" stroke-width=\"2\"");
  }
  out << "</svg>\n";
}

}  // namespace roadbench
