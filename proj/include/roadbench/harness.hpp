#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "roadbench/csv.hpp"
#include "roadbench/drivability.hpp"
#include "roadbench/frenet.hpp"
#include "roadbench/levelk.hpp"
#include "roadbench/prediction.hpp"
#include "roadbench/route.hpp"
#include "roadbench/rules.hpp"
#include "roadbench/scenario.hpp"
#include "roadbench/scoring.hpp"

namespace roadbench {

// Intelligent-driver-model surrogate for interactive background traffic.
struct IdmParameters {
  double t_headway{1.5};
  double a_idm{1.5};
  double b_idm{2.0};
  double d_min{2.0};
  double hard_brake{8.0};
  double lateral_gate{2.5};
};

struct HarnessConfig {
  PlannerConfig planner;
  LevelKConfig levelk;
  RuleParameters rules;
  IdmParameters idm;
  double scenario_budget_s{60.0};
  double agent_gate_dist{60.0};  // obstacles beyond this are not game agents
  std::optional<std::uint64_t> seed;  // pins deterministic output (zero wall times)
};

inline HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config file: ") + e.what());
  }
  HarnessConfig cfg;
  if (j.contains("planner")) {
    const auto& p = j["planner"];
    cfg.planner.horizon_s = p.value("horizon_s", cfg.planner.horizon_s);
    cfg.planner.replan_interval_s = p.value("replan_interval_s", cfg.planner.replan_interval_s);
    cfg.planner.replan_interval_high_risk_s =
        p.value("replan_interval_high_risk_s", cfg.planner.replan_interval_high_risk_s);
    cfg.planner.lateral_end_offsets =
        p.value("lateral_end_offsets", cfg.planner.lateral_end_offsets);
    cfg.planner.end_velocity_deltas =
        p.value("end_velocity_deltas", cfg.planner.end_velocity_deltas);
    cfg.planner.end_times = p.value("end_times", cfg.planner.end_times);
    cfg.planner.kappa_high_risk = p.value("kappa_high_risk", cfg.planner.kappa_high_risk);
    cfg.planner.proximity_high_risk =
        p.value("proximity_high_risk", cfg.planner.proximity_high_risk);
    cfg.planner.intersection_near_dist =
        p.value("intersection_near_dist", cfg.planner.intersection_near_dist);
    cfg.planner.a_lat_max = p.value("a_lat_max", cfg.planner.a_lat_max);
    cfg.planner.w_rule = p.value("w_rule", cfg.planner.w_rule);
  }
  if (j.contains("levelk")) {
    const auto& p = j["levelk"];
    cfg.levelk.T_g = p.value("T_g", cfg.levelk.T_g);
    cfg.levelk.dt_action = p.value("dt_action", cfg.levelk.dt_action);
    cfg.levelk.belief_retain = p.value("belief_retain", cfg.levelk.belief_retain);
    if (p.contains("weights")) {
      const auto& w = p["weights"];
      cfg.levelk.weights.w1 = w.value("w1", cfg.levelk.weights.w1);
      cfg.levelk.weights.w2 = w.value("w2", cfg.levelk.weights.w2);
      cfg.levelk.weights.w3 = w.value("w3", cfg.levelk.weights.w3);
      cfg.levelk.weights.w4 = w.value("w4", cfg.levelk.weights.w4);
      cfg.levelk.weights.w5 = w.value("w5", cfg.levelk.weights.w5);
    }
  }
  if (j.contains("rules")) {
    const auto& p = j["rules"];
    cfg.rules.t_react = p.value("t_react", cfg.rules.t_react);
    cfg.rules.t_c = p.value("t_c", cfg.rules.t_c);
    cfg.rules.lateral_gate = p.value("lateral_gate", cfg.rules.lateral_gate);
  }
  if (j.contains("idm")) {
    const auto& p = j["idm"];
    cfg.idm.t_headway = p.value("t_headway", cfg.idm.t_headway);
    cfg.idm.a_idm = p.value("a_idm", cfg.idm.a_idm);
    cfg.idm.b_idm = p.value("b_idm", cfg.idm.b_idm);
    cfg.idm.d_min = p.value("d_min", cfg.idm.d_min);
    cfg.idm.hard_brake = p.value("hard_brake", cfg.idm.hard_brake);
  }
  cfg.scenario_budget_s = j.value("scenario_budget_s", cfg.scenario_budget_s);
  cfg.agent_gate_dist = j.value("agent_gate_dist", cfg.agent_gate_dist);
  return cfg;
}

namespace detail {

// Runtime state of one simulated obstacle.
struct SimObstacle {
  const Obstacle* ob{nullptr};
  // reactive agents follow a lanelet centerline chain
  Polyline chain;
  std::vector<double> chain_cum;
  double s{0.0};
  double v{0.0};
  double v_des{0.0};
  std::vector<PredState> history;  // pose log, one entry per sim step

  PredState pose_at(int step) const {
    if (ob->kind == ObstacleKind::dynamic_reactive) {
      return history.empty() ? PredState{} : history.back();
    }
    RecordedState rs = ob->state_at_step(step);
    return PredState{rs.x, rs.y, rs.v, rs.theta};
  }
};

// Centerline chain from the lanelet containing the start point, following
// first successors.
inline void build_chain(SimObstacle& sim, const Scenario& sc, const Vec2& start) {
  auto ids = lanelet_containing(sc, start);
  if (ids.empty()) return;
  int cur = *ids.begin();
  std::set<int> visited;
  Polyline chain;
  while (cur >= 0 && !visited.count(cur)) {
    visited.insert(cur);
    const Lanelet* l = sc.find_lanelet(cur);
    if (!l) break;
    for (const auto& p : l->centerline) {
      if (!chain.empty() && distance(chain.back(), p) < 1e-9) continue;
      chain.push_back(p);
    }
    cur = l->successors.empty() ? -1 : l->successors.front();
  }
  if (chain.size() < 2) return;
  sim.chain = std::move(chain);
  sim.chain_cum = cumulative_arclength(sim.chain);
}

inline PredState chain_pose(const SimObstacle& sim) {
  Vec2 p = point_at_arclength(sim.chain, sim.chain_cum, sim.s);
  // heading from the local segment
  double s_ahead = std::min(sim.s + 0.5, sim.chain_cum.back());
  double s_behind = std::max(sim.s - 0.5, 0.0);
  Vec2 q = point_at_arclength(sim.chain, sim.chain_cum, s_ahead);
  Vec2 r = point_at_arclength(sim.chain, sim.chain_cum, s_behind);
  Vec2 dir = q - r;
  double theta = norm(dir) > 1e-9 ? std::atan2(dir.y, dir.x) : 0.0;
  return PredState{p.x, p.y, sim.v, theta};
}

struct LeaderCandidate {
  Vec2 pos;
  double v;
  double length;
};

// One IDM step along the chain; gap keeping toward the nearest candidate
// ahead on the chain.
inline void advance_reactive(SimObstacle& sim, const std::vector<LeaderCandidate>& candidates,
                             const IdmParameters& idm, double dt) {
  if (sim.chain.size() < 2) return;
  double best_gap = std::numeric_limits<double>::infinity();
  double v_lead = 0.0;
  for (const auto& c : candidates) {
    auto proj = project_to_polyline(sim.chain, sim.chain_cum, c.pos);
    if (std::abs(proj.lateral) > idm.lateral_gate) continue;
    double ds = proj.s - sim.s;
    if (ds <= 0.1) continue;
    double gap = ds - 0.5 * sim.ob->length - 0.5 * c.length;
    if (gap < best_gap) {
      best_gap = gap;
      v_lead = c.v;
    }
  }
  double a;
  if (sim.v_des < 0.1) {
    a = -sim.v / dt;
  } else if (!std::isfinite(best_gap)) {
    a = idm.a_idm * (1.0 - std::pow(sim.v / sim.v_des, 4.0));
  } else {
    double gap = std::max(best_gap, 0.01);
    double s_star = idm.d_min +
                    std::max(0.0, sim.v * idm.t_headway +
                                      sim.v * (sim.v - v_lead) /
                                          (2.0 * std::sqrt(idm.a_idm * idm.b_idm)));
    a = idm.a_idm * (1.0 - std::pow(sim.v / sim.v_des, 4.0) - (s_star / gap) * (s_star / gap));
  }
  a = std::clamp(a, -idm.hard_brake, idm.a_idm);
  double ds = sim.v * dt + 0.5 * a * dt * dt;
  sim.s = std::min(sim.chain_cum.back(), sim.s + std::max(0.0, ds));
  sim.v = std::max(0.0, sim.v + a * dt);
}

}  // namespace detail

// Closed-loop simulation of one scenario: predict, dispatch to the Frenet or
// level-k planner, execute, advance background traffic, and evaluate the
// executed trajectory.
inline RunRecord run_scenario(const Scenario& sc, const HarnessConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto t_start = Clock::now();
  auto elapsed_s = [&] {
    return std::chrono::duration<double>(Clock::now() - t_start).count();
  };

  RunRecord rec;
  rec.scenario_id = sc.id;
  rec.cluster = sc.cluster;
  rec.outcome = Outcome::goal_not_reached;

  const PlanningProblem& pp = sc.planning_problem;
  const VehicleParameters& params = sc.vehicle_parameters;
  const double dt = pp.time_step;

  std::vector<detail::SimObstacle> sims(sc.obstacles.size());
  for (size_t i = 0; i < sc.obstacles.size(); ++i) {
    auto& sim = sims[i];
    sim.ob = &sc.obstacles[i];
    RecordedState init = sim.ob->state_at_step(0);
    if (sim.ob->kind == ObstacleKind::dynamic_reactive) {
      detail::build_chain(sim, sc, {init.x, init.y});
      sim.v = init.v;
      sim.v_des = init.v;
      if (sim.chain.size() >= 2) {
        auto proj = project_to_polyline(sim.chain, sim.chain_cum, {init.x, init.y});
        sim.s = proj.s;
        sim.history.push_back(detail::chain_pose(sim));
      } else {
        sim.history.push_back(PredState{init.x, init.y, init.v, init.theta});
      }
    } else {
      sim.history.push_back(PredState{init.x, init.y, init.v, init.theta});
    }
  }

  Trajectory executed;
  executed.t0_step = 0;
  executed.states.push_back(pp.initial_state);
  VehicleState ego = pp.initial_state;
  int t = 0;
  bool reached = goal_reached(pp, ego, 0);
  bool collided = false;
  bool timed_out = false;

  ReferencePath path;
  try {
    path = plan_route(sc);
  } catch (const NoRouteError&) {
    rec.outcome = Outcome::infeasible;
    rec.wall_time_s = elapsed_s();
    rec.executed = executed;
    return rec;
  }

  std::map<int, Belief> beliefs;

  while (!reached && !collided && t < pp.max_time_steps) {
    if (elapsed_s() > cfg.scenario_budget_s) {
      timed_out = true;
      break;
    }

    // current poses, rectangles and predictions
    std::vector<std::pair<int, OrientedRect>> current_rects;
    std::vector<Vec2> current_positions;
    std::vector<OccupancyPrediction> preds;
    for (auto& sim : sims) {
      PredState ps = sim.pose_at(t);
      current_rects.push_back(
          {sim.ob->id, OrientedRect{{ps.x, ps.y}, ps.theta, sim.ob->length, sim.ob->width}});
      current_positions.push_back({ps.x, ps.y});
      if (sim.ob->kind != ObstacleKind::static_) {
        preds.push_back(predict_obstacle(*sim.ob, sim.history, t, cfg.planner.horizon_s, dt));
      }
    }
    auto tracks = tracks_from_predictions(preds, current_rects);

    bool guard = in_intersection_guard(sc, ego.position(), cfg.planner.intersection_near_dist);
    Trajectory plan;
    int exec_steps = 0;
    bool levelk_mode = false;
    std::map<int, std::array<PredInput, 3>> level_inputs;
    std::map<int, PredState> state_at_plan;

    if (guard) {
      levelk_mode = true;
      std::vector<GameAgent> agents;
      GameAgent ego_agent;
      ego_agent.id = -1;
      ego_agent.state = PredState{ego.x, ego.y, ego.v, ego.phi};
      ego_agent.length = params.length;
      ego_agent.width = params.width;
      ego_agent.progress_path = path.points;
      ego_agent.progress_cum = cumulative_arclength(ego_agent.progress_path);
      agents.push_back(std::move(ego_agent));
      for (auto& sim : sims) {
        if (sim.ob->kind == ObstacleKind::static_) continue;
        PredState ps = sim.pose_at(t);
        if (distance({ps.x, ps.y}, ego.position()) > cfg.agent_gate_dist) continue;
        GameAgent ag;
        ag.id = sim.ob->id;
        ag.state = ps;
        ag.length = sim.ob->length;
        ag.width = sim.ob->width;
        ag.frozen_input = estimate_input_finite_difference(sim.history, dt);
        if (sim.ob->kind == ObstacleKind::dynamic_reactive && sim.chain.size() >= 2) {
          ag.progress_path = sim.chain;
        } else {
          detail::SimObstacle tmp;
          tmp.ob = sim.ob;
          detail::build_chain(tmp, sc, {ps.x, ps.y});
          ag.progress_path = tmp.chain;
        }
        if (ag.progress_path.size() >= 2)
          ag.progress_cum = cumulative_arclength(ag.progress_path);
        state_at_plan[ag.id] = ps;
        agents.push_back(std::move(ag));
      }
      IntersectionPlan iplan =
          plan_intersection(ego, agents, beliefs, sc, cfg.levelk, tracks, params, t);
      plan = std::move(iplan.trajectory);
      level_inputs = iplan.decision.level_first_inputs;
      exec_steps = static_cast<int>(plan.states.size()) - 1;
    } else {
      path = update_reference(path, ego, sc);
      double interval = next_replan_interval(ego, sc, path, current_positions, cfg.planner);
      exec_steps = std::max(1, static_cast<int>(std::lround(interval / dt)));
      try {
        FrenetState fs0 = to_frenet(path, ego, params);
        PlannerConfig pcfg = cfg.planner;
        pcfg.lateral_end_offsets.push_back(fs0.d);  // keep-offset candidates
        double v_limit = speed_limit_at(sc, ego.position());
        auto cands = generate_candidates(fs0, pcfg, v_limit);
        SelectionContext ctx;
        ctx.scenario = &sc;
        ctx.path = &path;
        ctx.predictions = &preds;
        ctx.tracks = tracks;
        ctx.t0_step = t;
        ctx.current = ego;
        ctx.rule_params = cfg.rules;
        plan = select_trajectory(cands, ctx, pcfg, params).trajectory;
      } catch (const ProjectionError&) {
        plan = emergency_braking_trajectory(ego, exec_steps, dt, params, t);
      } catch (const NoFeasibleCandidate&) {
        plan = emergency_braking_trajectory(ego, exec_steps, dt, params, t);
      }
    }

    exec_steps = std::min(exec_steps, static_cast<int>(plan.states.size()) - 1);
    if (exec_steps < 1) {
      plan = emergency_braking_trajectory(ego, 1, dt, params, t);
      exec_steps = 1;
    }

    for (int i = 1; i <= exec_steps && !reached && !collided && t < pp.max_time_steps; ++i) {
      // background traffic reacts to the poses at step t, then everyone moves
      std::vector<detail::LeaderCandidate> candidates;
      candidates.push_back({ego.position(), ego.v, params.length});
      for (auto& other : sims)
        if (other.ob->kind != ObstacleKind::dynamic_reactive) {
          PredState ps = other.pose_at(t);
          candidates.push_back({{ps.x, ps.y}, ps.v, other.ob->length});
        }
      for (auto& sim : sims) {
        if (sim.ob->kind != ObstacleKind::dynamic_reactive) continue;
        auto cand_for_sim = candidates;
        for (auto& other : sims) {
          if (&other == &sim || other.ob->kind != ObstacleKind::dynamic_reactive) continue;
          PredState ps = other.pose_at(t);
          cand_for_sim.push_back({{ps.x, ps.y}, ps.v, other.ob->length});
        }
        detail::advance_reactive(sim, cand_for_sim, cfg.idm, dt);
      }
      ego = plan.states[static_cast<size_t>(i)];
      ++t;
      executed.states.push_back(ego);
      for (auto& sim : sims) {
        if (sim.ob->kind == ObstacleKind::dynamic_reactive) {
          sim.history.push_back(sim.chain.size() >= 2
                                    ? detail::chain_pose(sim)
                                    : sim.history.back());
        } else {
          sim.history.push_back(sim.pose_at(t));
        }
      }
      OrientedRect ego_rect = ego_footprint(ego, params);
      for (auto& sim : sims) {
        const PredState& ps = sim.history.back();
        OrientedRect rect{{ps.x, ps.y}, ps.theta, sim.ob->length, sim.ob->width};
        if (rects_overlap(ego_rect, rect)) {
          collided = true;
          break;
        }
      }
      if (!collided && goal_reached(pp, ego, t)) reached = true;
    }

    if (levelk_mode && exec_steps > 0) {
      double tau = exec_steps * dt;
      for (auto& [id, inputs] : level_inputs) {
        auto it = state_at_plan.find(id);
        if (it == state_at_plan.end()) continue;
        for (const auto& sim : sims) {
          if (sim.ob->id != id) continue;
          const PredState& now = sim.history.back();
          PredInput observed{(now.v - it->second.v) / tau,
                             wrap_angle(now.theta - it->second.theta) / tau};
          Belief b = beliefs.count(id) ? beliefs[id] : Belief{};
          beliefs[id] = update_belief(b, observed, inputs, cfg.levelk.belief_retain);
          break;
        }
      }
    }
  }

  rec.steps = t;
  rec.executed = executed;
  for (const auto& sim : sims) rec.obstacle_log[sim.ob->id] = sim.history;

  if (collided) {
    rec.outcome = Outcome::collision;
  } else if (timed_out) {
    rec.outcome = Outcome::timeout;
  } else if (reached) {
    // verify and score against the actual traffic tracks
    Scenario scored = sc;
    for (size_t i = 0; i < scored.obstacles.size(); ++i) {
      if (scored.obstacles[i].kind != ObstacleKind::dynamic_reactive) continue;
      auto& o = scored.obstacles[i];
      o.kind = ObstacleKind::dynamic_recorded;
      o.recorded_trajectory.clear();
      for (size_t k = 0; k < sims[i].history.size(); ++k) {
        const PredState& ps = sims[i].history[k];
        o.recorded_trajectory.push_back(
            RecordedState{static_cast<int>(k), ps.x, ps.y, ps.theta, ps.v});
      }
    }
    FeasibilityVerdict verdict = check_feasibility(executed, scored, params);
    if (verdict.feasible()) {
      rec.outcome = Outcome::solved;
      if (executed.states.size() >= 4) {
        rec.cost = tr1_cost(executed, scored, dt);
      } else {
        rec.cost = CostReport{};
      }
    } else {
      rec.outcome = Outcome::infeasible;
    }
  } else {
    rec.outcome = Outcome::goal_not_reached;
  }
  rec.wall_time_s = elapsed_s();
  return rec;
}

// ---------------------------------------------------------------------------
// Suite running, aggregation and comparison

struct ClusterRow {
  std::string cluster;
  int total{0};
  int solved{0};
  double mean{0.0};
  double stddev{0.0};  // population
  double worst{0.0};
};

struct CoveragePartition {
  int both{0};
  int only_a{0};
  int only_b{0};
  int neither{0};
  // percentages in tenths of a percent, largest-remainder rounded to sum 1000
  std::array<int, 4> pct_tenths{0, 0, 0, 0};

  int total() const { return both + only_a + only_b + neither; }
  static std::string format_pct(int tenths) {
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
  }
};

inline CoveragePartition coverage_partition(const std::set<std::string>& solved_a,
                                            const std::set<std::string>& solved_b,
                                            const std::set<std::string>& universe) {
  CoveragePartition part;
  for (const auto& id : universe) {
    bool a = solved_a.count(id) > 0;
    bool b = solved_b.count(id) > 0;
    if (a && b)
      ++part.both;
    else if (a)
      ++part.only_a;
    else if (b)
      ++part.only_b;
    else
      ++part.neither;
  }
  int n = part.total();
  if (n == 0) return part;
  std::array<int, 4> counts{part.both, part.only_a, part.only_b, part.neither};
  std::array<long long, 4> scaled;
  std::array<int, 4> floors;
  int floor_sum = 0;
  for (int i = 0; i < 4; ++i) {
    scaled[i] = static_cast<long long>(counts[i]) * 1000;
    floors[i] = static_cast<int>(scaled[i] / n);
    floor_sum += floors[i];
  }
  int remainder = 1000 - floor_sum;
  std::array<int, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    long long ra = scaled[a] % n, rb = scaled[b] % n;
    if (ra != rb) return ra > rb;
    return a < b;
  });
  for (int i = 0; i < remainder; ++i) ++floors[order[static_cast<size_t>(i % 4)]];
  part.pct_tenths = floors;
  return part;
}

inline std::vector<ClusterRow> cluster_statistics(const std::vector<ResultRow>& rows) {
  std::map<std::string, std::vector<double>> solved_costs;
  std::map<std::string, int> totals;
  for (const auto& r : rows) {
    ++totals[r.cluster];
    if (r.outcome == Outcome::solved && r.J_ego) solved_costs[r.cluster].push_back(*r.J_ego);
  }
  std::vector<ClusterRow> out;
  for (const auto& [cluster, total] : totals) {
    ClusterRow row;
    row.cluster = cluster;
    row.total = total;
    const auto& costs = solved_costs[cluster];
    row.solved = static_cast<int>(costs.size());
    if (!costs.empty()) {
      double sum = 0.0;
      for (double c : costs) sum += c;
      row.mean = sum / static_cast<double>(costs.size());
      double var = 0.0;
      for (double c : costs) var += (c - row.mean) * (c - row.mean);
      row.stddev = std::sqrt(var / static_cast<double>(costs.size()));
      row.worst = *std::max_element(costs.begin(), costs.end());
    }
    out.push_back(row);
  }
  return out;
}

struct SuiteReport {
  std::vector<RunRecord> records;       // sorted by scenario id
  std::vector<ClusterRow> cluster_rows;
  std::optional<CoveragePartition> coverage;  // vs. an optional baseline
};

inline std::vector<ResultRow> to_result_rows(const std::vector<RunRecord>& records) {
  std::vector<ResultRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    ResultRow row;
    row.scenario_id = r.scenario_id;
    row.cluster = r.cluster;
    row.outcome = r.outcome;
    if (r.cost) row.J_ego = r.cost->J_ego;
    rows.push_back(std::move(row));
  }
  return rows;
}

// Executes every scenario file under a global wall-clock budget and worker
// cap. Scenarios not started before budget exhaustion become timeouts.
inline SuiteReport run_suite(const std::vector<std::string>& scenario_files,
                             const HarnessConfig& cfg, double budget_s, int workers,
                             const std::vector<ResultRow>* baseline = nullptr) {
  using Clock = std::chrono::steady_clock;
  auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(budget_s));
  std::vector<std::string> files = scenario_files;
  std::sort(files.begin(), files.end());

  std::vector<RunRecord> records(files.size());
  std::atomic<size_t> next{0};
  std::mutex mtx;
  auto worker_fn = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      RunRecord rec;
      if (Clock::now() >= deadline) {
        // not started in time: record as timeout with metadata only
        try {
          std::ifstream in(files[i]);
          nlohmann::json j;
          in >> j;
          rec.scenario_id = j.at("meta").at("id").get<std::string>();
          rec.cluster = j.at("meta").value("cluster", std::string{});
        } catch (...) {
          rec.scenario_id = std::filesystem::path(files[i]).stem().string();
        }
        rec.outcome = Outcome::timeout;
      } else {
        try {
          Scenario sc = load_scenario(files[i]);
          rec = run_scenario(sc, cfg);
        } catch (const std::exception&) {
          rec.scenario_id = std::filesystem::path(files[i]).stem().string();
          rec.outcome = Outcome::infeasible;
        }
      }
      std::lock_guard<std::mutex> lock(mtx);
      records[i] = std::move(rec);
    }
  };
  int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker_fn);
  worker_fn();
  for (auto& th : pool) th.join();

  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return a.scenario_id < b.scenario_id; });
  if (cfg.seed) {
    for (auto& r : records) r.wall_time_s = 0.0;  // deterministic output mode
  }

  SuiteReport report;
  report.cluster_rows = cluster_statistics(to_result_rows(records));
  if (baseline) {
    std::set<std::string> solved_a, solved_b, universe;
    for (const auto& r : records) {
      universe.insert(r.scenario_id);
      if (r.outcome == Outcome::solved) solved_a.insert(r.scenario_id);
    }
    for (const auto& r : *baseline) {
      universe.insert(r.scenario_id);
      if (r.outcome == Outcome::solved) solved_b.insert(r.scenario_id);
    }
    report.coverage = coverage_partition(solved_a, solved_b, universe);
  }
  report.records = std::move(records);
  return report;
}

struct CompareClusterRow {
  std::string cluster;
  int total{0};
  int solved_by_both{0};
  double mean_a{0.0}, std_a{0.0}, worst_a{0.0};
  double mean_b{0.0}, std_b{0.0}, worst_b{0.0};
};

struct CompareReport {
  CoveragePartition partition;
  std::vector<CompareClusterRow> rows;  // common-set statistics per cluster
};

// Four-way coverage partition plus per-cluster statistics on the benchmarks
// solved by both result sets.
inline CompareReport compare_results(const std::vector<ResultRow>& a,
                                     const std::vector<ResultRow>& b) {
  std::map<std::string, const ResultRow*> by_id_a, by_id_b;
  for (const auto& r : a) by_id_a[r.scenario_id] = &r;
  for (const auto& r : b) by_id_b[r.scenario_id] = &r;
  if (by_id_a.size() != by_id_b.size())
    throw MismatchedUniverse("result sets cover different scenario counts");
  for (const auto& [id, row] : by_id_a) {
    if (!by_id_b.count(id)) throw MismatchedUniverse("scenario '" + id + "' missing from B");
  }

  std::set<std::string> solved_a, solved_b, universe;
  for (const auto& [id, row] : by_id_a) {
    universe.insert(id);
    if (row->outcome == Outcome::solved) solved_a.insert(id);
  }
  for (const auto& [id, row] : by_id_b)
    if (row->outcome == Outcome::solved) solved_b.insert(id);

  CompareReport report;
  report.partition = coverage_partition(solved_a, solved_b, universe);

  std::map<std::string, std::vector<std::pair<double, double>>> common;  // cluster -> (Ja, Jb)
  std::map<std::string, int> totals;
  for (const auto& [id, row] : by_id_a) {
    ++totals[row->cluster];
    if (solved_a.count(id) && solved_b.count(id)) {
      const ResultRow* rb = by_id_b[id];
      double ja = row->J_ego.value_or(0.0);
      double jb = rb->J_ego.value_or(0.0);
      common[row->cluster].push_back({ja, jb});
    }
  }
  auto stats = [](const std::vector<double>& xs, double& mean, double& sd, double& worst) {
    mean = sd = worst = 0.0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    for (double x : xs) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(xs.size()));
    worst = *std::max_element(xs.begin(), xs.end());
  };
  for (const auto& [cluster, total] : totals) {
    CompareClusterRow row;
    row.cluster = cluster;
    row.total = total;
    const auto& pairs = common[cluster];
    row.solved_by_both = static_cast<int>(pairs.size());
    std::vector<double> ja, jb;
    for (const auto& [x, y] : pairs) {
      ja.push_back(x);
      jb.push_back(y);
    }
    stats(ja, row.mean_a, row.std_a, row.worst_a);
    stats(jb, row.mean_b, row.std_b, row.worst_b);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace roadbench
