#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "roadbench/errors.hpp"
#include "roadbench/geometry.hpp"

namespace roadbench {

enum class LaneType { driving, walkway, bicycle };

inline std::string to_string(LaneType t) {
  switch (t) {
    case LaneType::driving: return "driving";
    case LaneType::walkway: return "walkway";
    case LaneType::bicycle: return "bicycle";
  }
  return "driving";
}

inline LaneType lane_type_from_string(const std::string& s) {
  if (s == "driving") return LaneType::driving;
  if (s == "walkway") return LaneType::walkway;
  if (s == "bicycle") return LaneType::bicycle;
  throw ParseError("unknown lane_type '" + s + "'");
}

struct AdjacentRef {
  int id{0};
  bool same_direction{true};
  bool operator==(const AdjacentRef&) const = default;
};

struct Lanelet {
  int id{0};
  Polyline left_bound;
  Polyline right_bound;
  Polyline centerline;
  LaneType lane_type{LaneType::driving};
  std::vector<int> successors;
  std::vector<int> predecessors;
  std::optional<AdjacentRef> adjacent_left;
  std::optional<AdjacentRef> adjacent_right;
  std::optional<double> speed_limit;  // m/s

  // Boundary polygon: left bound followed by the reversed right bound.
  Polygon polygon() const {
    Polygon poly = left_bound;
    poly.insert(poly.end(), right_bound.rbegin(), right_bound.rend());
    return poly;
  }

  double centerline_length() const { return polyline_length(centerline); }

  bool operator==(const Lanelet&) const = default;
};

enum class ObstacleKind { static_, dynamic_recorded, dynamic_reactive };

inline std::string to_string(ObstacleKind k) {
  switch (k) {
    case ObstacleKind::static_: return "static";
    case ObstacleKind::dynamic_recorded: return "dynamic_recorded";
    case ObstacleKind::dynamic_reactive: return "dynamic_reactive";
  }
  return "static";
}

inline ObstacleKind obstacle_kind_from_string(const std::string& s) {
  if (s == "static") return ObstacleKind::static_;
  if (s == "dynamic_recorded") return ObstacleKind::dynamic_recorded;
  if (s == "dynamic_reactive") return ObstacleKind::dynamic_reactive;
  throw ParseError("unknown obstacle kind '" + s + "'");
}

struct RecordedState {
  int t{0};  // time step
  double x{0.0}, y{0.0}, theta{0.0}, v{0.0};
  bool operator==(const RecordedState&) const = default;
};

struct Obstacle {
  int id{0};
  double length{1.0};
  double width{1.0};
  ObstacleKind kind{ObstacleKind::static_};
  std::vector<RecordedState> recorded_trajectory;     // only for dynamic_recorded
  std::optional<RecordedState> initial_state;         // required for all kinds

  // Pose replay for statics and recorded obstacles; reactive obstacles are
  // advanced by the harness and should not be queried through this.
  RecordedState state_at_step(int step) const {
    if (kind == ObstacleKind::dynamic_recorded && !recorded_trajectory.empty()) {
      if (step <= recorded_trajectory.front().t) return recorded_trajectory.front();
      if (step >= recorded_trajectory.back().t) return recorded_trajectory.back();
      return recorded_trajectory[static_cast<size_t>(step - recorded_trajectory.front().t)];
    }
    return initial_state.value_or(RecordedState{});
  }

  OrientedRect footprint(const RecordedState& s) const {
    return OrientedRect{{s.x, s.y}, s.theta, length, width};
  }

  bool operator==(const Obstacle&) const = default;
};

struct VehicleParameters {
  double wheelbase{2.9};
  double length{4.3};
  double width{1.7};
  double v_max{45.8};
  double v_min{-13.9};
  double a_max{11.5};        // magnitude bound on acceleration
  double delta_max{0.91};    // steering angle bound
  double v_delta_max{0.4};   // steering rate bound
  bool operator==(const VehicleParameters&) const = default;
};

struct VehicleState {
  double x{0.0};
  double y{0.0};
  double v{0.0};
  double phi{0.0};    // heading
  double delta{0.0};  // steering angle

  Vec2 position() const { return {x, y}; }
  bool operator==(const VehicleState&) const = default;
};

inline OrientedRect ego_footprint(const VehicleState& s, const VehicleParameters& p) {
  return OrientedRect{{s.x, s.y}, s.phi, p.length, p.width};
}

struct GoalRegion {
  Polygon polygon;  // convex
  std::optional<std::pair<double, double>> velocity_interval;
  std::pair<int, int> time_step_interval{0, 0};
  bool operator==(const GoalRegion&) const = default;
};

struct PlanningProblem {
  VehicleState initial_state;
  GoalRegion goal_region;
  double time_step{0.1};
  int max_time_steps{200};
  bool operator==(const PlanningProblem&) const = default;
};

struct Scenario {
  std::string id;
  std::string cluster;
  std::vector<Lanelet> lanelets;
  std::vector<Obstacle> obstacles;
  PlanningProblem planning_problem;
  VehicleParameters vehicle_parameters;

  const Lanelet* find_lanelet(int id) const {
    for (const auto& l : lanelets)
      if (l.id == id) return &l;
    return nullptr;
  }
  const Obstacle* find_obstacle(int id) const {
    for (const auto& o : obstacles)
      if (o.id == id) return &o;
    return nullptr;
  }

  bool operator==(const Scenario&) const = default;
};

// ---------------------------------------------------------------------------
// Operations

// All lanelets whose boundary polygon contains the point (boundary-inclusive).
inline std::set<int> lanelet_containing(const std::vector<Lanelet>& network, const Vec2& p) {
  std::set<int> ids;
  for (const auto& l : network)
    if (point_in_polygon(l.polygon(), p)) ids.insert(l.id);
  return ids;
}

inline std::set<int> lanelet_containing(const Scenario& sc, const Vec2& p) {
  return lanelet_containing(sc.lanelets, p);
}

// Goal test on the vehicle reference point (footprint center).
inline bool goal_reached(const PlanningProblem& problem, const VehicleState& state, int t) {
  const GoalRegion& g = problem.goal_region;
  if (t < g.time_step_interval.first || t > g.time_step_interval.second) return false;
  if (g.velocity_interval &&
      (state.v < g.velocity_interval->first || state.v > g.velocity_interval->second))
    return false;
  return point_in_polygon(g.polygon, state.position());
}

// Effective speed limit at a point: tightest limit among containing lanelets,
// falling back to the vehicle's own bound off-road or where no limit is set.
inline double speed_limit_at(const Scenario& sc, const Vec2& p) {
  double limit = sc.vehicle_parameters.v_max;
  bool found = false;
  for (const auto& l : sc.lanelets) {
    if (!l.speed_limit) continue;
    if (point_in_polygon(l.polygon(), p)) {
      limit = found ? std::min(limit, *l.speed_limit) : *l.speed_limit;
      found = true;
    }
  }
  return limit;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace detail {

inline nlohmann::json polyline_to_json(const Polyline& pl) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : pl) j.push_back({p.x, p.y});
  return j;
}

inline Polyline polyline_from_json(const nlohmann::json& j) {
  Polyline pl;
  for (const auto& e : j) pl.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
  return pl;
}

}  // namespace detail

inline nlohmann::json to_json(const Scenario& sc) {
  using nlohmann::json;
  json j;
  j["meta"] = {{"id", sc.id}, {"cluster", sc.cluster}};

  j["lanelets"] = json::array();
  for (const auto& l : sc.lanelets) {
    json jl;
    jl["id"] = l.id;
    jl["left_bound"] = detail::polyline_to_json(l.left_bound);
    jl["right_bound"] = detail::polyline_to_json(l.right_bound);
    jl["centerline"] = detail::polyline_to_json(l.centerline);
    jl["lane_type"] = to_string(l.lane_type);
    jl["successors"] = l.successors;
    jl["predecessors"] = l.predecessors;
    jl["adjacent_left"] =
        l.adjacent_left ? json{{"id", l.adjacent_left->id}, {"same_direction", l.adjacent_left->same_direction}}
                        : json(nullptr);
    jl["adjacent_right"] =
        l.adjacent_right ? json{{"id", l.adjacent_right->id}, {"same_direction", l.adjacent_right->same_direction}}
                         : json(nullptr);
    jl["speed_limit"] = l.speed_limit ? json(*l.speed_limit) : json(nullptr);
    j["lanelets"].push_back(jl);
  }

  j["obstacles"] = json::array();
  for (const auto& o : sc.obstacles) {
    json jo;
    jo["id"] = o.id;
    jo["shape"] = {{"length", o.length}, {"width", o.width}};
    jo["kind"] = to_string(o.kind);
    if (o.kind == ObstacleKind::dynamic_recorded) {
      json jt = json::array();
      for (const auto& s : o.recorded_trajectory)
        jt.push_back({{"t", s.t}, {"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}});
      jo["recorded_trajectory"] = jt;
    }
    if (o.initial_state) {
      const auto& s = *o.initial_state;
      jo["initial_state"] = {{"x", s.x}, {"y", s.y}, {"theta", s.theta}, {"v", s.v}};
    }
    j["obstacles"].push_back(jo);
  }

  const auto& pp = sc.planning_problem;
  json jg;
  jg["polygon"] = detail::polyline_to_json(pp.goal_region.polygon);
  jg["velocity_interval"] =
      pp.goal_region.velocity_interval
          ? json{pp.goal_region.velocity_interval->first, pp.goal_region.velocity_interval->second}
          : json(nullptr);
  jg["time_step_interval"] = {pp.goal_region.time_step_interval.first,
                              pp.goal_region.time_step_interval.second};
  j["planning_problem"] = {
      {"initial_state",
       {{"x", pp.initial_state.x},
        {"y", pp.initial_state.y},
        {"v", pp.initial_state.v},
        {"phi", pp.initial_state.phi},
        {"delta", pp.initial_state.delta}}},
      {"goal_region", jg},
      {"time_step", pp.time_step},
      {"max_time_steps", pp.max_time_steps}};

  const auto& vp = sc.vehicle_parameters;
  j["vehicle_parameters"] = {{"wheelbase", vp.wheelbase}, {"length", vp.length},
                             {"width", vp.width},         {"v_max", vp.v_max},
                             {"v_min", vp.v_min},         {"a_max", vp.a_max},
                             {"delta_max", vp.delta_max}, {"v_delta_max", vp.v_delta_max}};
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  try {
    sc.id = j.at("meta").at("id").get<std::string>();
    sc.cluster = j.at("meta").value("cluster", std::string{});

    for (const auto& jl : j.at("lanelets")) {
      Lanelet l;
      l.id = jl.at("id").get<int>();
      l.left_bound = detail::polyline_from_json(jl.at("left_bound"));
      l.right_bound = detail::polyline_from_json(jl.at("right_bound"));
      if (jl.contains("centerline") && !jl.at("centerline").is_null()) {
        l.centerline = detail::polyline_from_json(jl.at("centerline"));
      } else {
        for (size_t i = 0; i < l.left_bound.size() && i < l.right_bound.size(); ++i)
          l.centerline.push_back((l.left_bound[i] + l.right_bound[i]) * 0.5);
      }
      l.lane_type = lane_type_from_string(jl.value("lane_type", std::string{"driving"}));
      l.successors = jl.value("successors", std::vector<int>{});
      l.predecessors = jl.value("predecessors", std::vector<int>{});
      if (jl.contains("adjacent_left") && !jl.at("adjacent_left").is_null())
        l.adjacent_left = AdjacentRef{jl.at("adjacent_left").at("id").get<int>(),
                                      jl.at("adjacent_left").value("same_direction", true)};
      if (jl.contains("adjacent_right") && !jl.at("adjacent_right").is_null())
        l.adjacent_right = AdjacentRef{jl.at("adjacent_right").at("id").get<int>(),
                                       jl.at("adjacent_right").value("same_direction", true)};
      if (jl.contains("speed_limit") && !jl.at("speed_limit").is_null())
        l.speed_limit = jl.at("speed_limit").get<double>();
      sc.lanelets.push_back(std::move(l));
    }

    for (const auto& jo : j.value("obstacles", nlohmann::json::array())) {
      Obstacle o;
      o.id = jo.at("id").get<int>();
      o.length = jo.at("shape").at("length").get<double>();
      o.width = jo.at("shape").at("width").get<double>();
      o.kind = obstacle_kind_from_string(jo.at("kind").get<std::string>());
      if (jo.contains("recorded_trajectory") && !jo.at("recorded_trajectory").is_null()) {
        for (const auto& js : jo.at("recorded_trajectory")) {
          o.recorded_trajectory.push_back(RecordedState{
              js.at("t").get<int>(), js.at("x").get<double>(), js.at("y").get<double>(),
              js.at("theta").get<double>(), js.at("v").get<double>()});
        }
      }
      if (jo.contains("initial_state") && !jo.at("initial_state").is_null()) {
        const auto& js = jo.at("initial_state");
        o.initial_state = RecordedState{0, js.at("x").get<double>(), js.at("y").get<double>(),
                                        js.at("theta").get<double>(), js.at("v").get<double>()};
      } else if (!o.recorded_trajectory.empty()) {
        o.initial_state = o.recorded_trajectory.front();
      }
      sc.obstacles.push_back(std::move(o));
    }

    const auto& jp = j.at("planning_problem");
    const auto& ji = jp.at("initial_state");
    sc.planning_problem.initial_state =
        VehicleState{ji.at("x").get<double>(), ji.at("y").get<double>(), ji.at("v").get<double>(),
                     ji.at("phi").get<double>(), ji.at("delta").get<double>()};
    const auto& jg = jp.at("goal_region");
    sc.planning_problem.goal_region.polygon = detail::polyline_from_json(jg.at("polygon"));
    if (jg.contains("velocity_interval") && !jg.at("velocity_interval").is_null())
      sc.planning_problem.goal_region.velocity_interval = {
          jg.at("velocity_interval").at(0).get<double>(),
          jg.at("velocity_interval").at(1).get<double>()};
    sc.planning_problem.goal_region.time_step_interval = {
        jg.at("time_step_interval").at(0).get<int>(), jg.at("time_step_interval").at(1).get<int>()};
    sc.planning_problem.time_step = jp.at("time_step").get<double>();
    sc.planning_problem.max_time_steps = jp.at("max_time_steps").get<int>();

    if (j.contains("vehicle_parameters") && !j.at("vehicle_parameters").is_null()) {
      const auto& jv = j.at("vehicle_parameters");
      VehicleParameters vp;
      vp.wheelbase = jv.value("wheelbase", vp.wheelbase);
      vp.length = jv.value("length", vp.length);
      vp.width = jv.value("width", vp.width);
      vp.v_max = jv.value("v_max", vp.v_max);
      vp.v_min = jv.value("v_min", vp.v_min);
      vp.a_max = jv.value("a_max", vp.a_max);
      vp.delta_max = jv.value("delta_max", vp.delta_max);
      vp.v_delta_max = jv.value("v_delta_max", vp.v_delta_max);
      sc.vehicle_parameters = vp;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario json: ") + e.what());
  }
  return sc;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate_scenario(const Scenario& sc) {
  std::set<int> lanelet_ids;
  for (const auto& l : sc.lanelets) {
    if (!lanelet_ids.insert(l.id).second)
      throw ValidationError("duplicate lanelet id " + std::to_string(l.id));
  }
  auto check_ref = [&](int from, int to) {
    if (!lanelet_ids.count(to))
      throw ValidationError("lanelet " + std::to_string(from) + " references missing lanelet id " +
                            std::to_string(to));
  };
  for (const auto& l : sc.lanelets) {
    if (l.left_bound.size() < 2 || l.right_bound.size() < 2)
      throw ValidationError("lanelet " + std::to_string(l.id) + ": bounds need at least 2 vertices");
    if (l.left_bound.size() != l.right_bound.size())
      throw ValidationError("lanelet " + std::to_string(l.id) + ": bound vertex counts differ");
    if (l.centerline.size() != l.left_bound.size())
      throw ValidationError("lanelet " + std::to_string(l.id) + ": centerline vertex count differs");
    for (size_t i = 0; i < l.centerline.size(); ++i) {
      Vec2 mid = (l.left_bound[i] + l.right_bound[i]) * 0.5;
      if (distance(mid, l.centerline[i]) > 1e-6)
        throw ValidationError("lanelet " + std::to_string(l.id) + ": centerline vertex " +
                              std::to_string(i) + " is not the bound midpoint");
    }
    if (!polygon_is_simple(l.polygon()))
      throw ValidationError("lanelet " + std::to_string(l.id) + ": boundary polygon self-intersects");
    for (int s : l.successors) check_ref(l.id, s);
    for (int p : l.predecessors) check_ref(l.id, p);
    if (l.adjacent_left) check_ref(l.id, l.adjacent_left->id);
    if (l.adjacent_right) check_ref(l.id, l.adjacent_right->id);
  }

  std::set<int> obstacle_ids;
  for (const auto& o : sc.obstacles) {
    if (!obstacle_ids.insert(o.id).second)
      throw ValidationError("duplicate obstacle id " + std::to_string(o.id));
    if (o.length <= 0.0 || o.width <= 0.0)
      throw ValidationError("obstacle " + std::to_string(o.id) + ": non-positive shape");
    bool has_rec = !o.recorded_trajectory.empty();
    if (has_rec != (o.kind == ObstacleKind::dynamic_recorded))
      throw ValidationError("obstacle " + std::to_string(o.id) +
                            ": recorded_trajectory present iff kind is dynamic_recorded");
    for (size_t i = 1; i < o.recorded_trajectory.size(); ++i) {
      if (o.recorded_trajectory[i].t != o.recorded_trajectory[i - 1].t + 1)
        throw ValidationError("obstacle " + std::to_string(o.id) +
                              ": recorded timestamps must increase by one step");
    }
    if (!o.initial_state)
      throw ValidationError("obstacle " + std::to_string(o.id) + ": missing initial_state");
  }

  const auto& pp = sc.planning_problem;
  if (pp.time_step <= 0.0) throw ValidationError("planning_problem: time_step must be positive");
  if (pp.goal_region.polygon.size() < 3)
    throw ValidationError("planning_problem: goal polygon needs at least 3 vertices");
  if (pp.goal_region.time_step_interval.first < 0 ||
      pp.goal_region.time_step_interval.second > pp.max_time_steps ||
      pp.goal_region.time_step_interval.first > pp.goal_region.time_step_interval.second)
    throw ValidationError("planning_problem: goal time interval not within [0, max_time_steps]");

  const auto& vp = sc.vehicle_parameters;
  if (vp.wheelbase <= 0 || vp.length <= 0 || vp.width <= 0 || vp.a_max <= 0 || vp.delta_max <= 0 ||
      vp.v_delta_max <= 0)
    throw ValidationError("vehicle_parameters: bounds must be strictly positive");
  if (vp.v_min > 0.0 || vp.v_max < 0.0)
    throw ValidationError("vehicle_parameters: velocity range must contain 0");

  const auto& is = pp.initial_state;
  if (std::abs(is.delta) > vp.delta_max + 1e-12 || is.v < vp.v_min - 1e-12 ||
      is.v > vp.v_max + 1e-12)
    throw ValidationError("initial_state violates vehicle bounds");
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("scenario file '" + path + "': " + e.what());
  }
  Scenario sc = scenario_from_json(j);
  validate_scenario(sc);
  return sc;
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write scenario file '" + path + "'");
  out << to_json(sc).dump(2) << "\n";
}

}  // namespace roadbench
