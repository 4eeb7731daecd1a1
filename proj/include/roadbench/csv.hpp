#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <map>

#include "roadbench/dynamics.hpp"
#include "roadbench/errors.hpp"
#include "roadbench/prediction.hpp"
#include "roadbench/scoring.hpp"

namespace roadbench {

enum class Outcome { solved, collision, infeasible, goal_not_reached, timeout };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::solved: return "solved";
    case Outcome::collision: return "collision";
    case Outcome::infeasible: return "infeasible";
    case Outcome::goal_not_reached: return "goal_not_reached";
    case Outcome::timeout: return "timeout";
  }
  return "timeout";
}

inline Outcome outcome_from_string(const std::string& s) {
  if (s == "solved") return Outcome::solved;
  if (s == "collision") return Outcome::collision;
  if (s == "infeasible") return Outcome::infeasible;
  if (s == "goal_not_reached") return Outcome::goal_not_reached;
  if (s == "timeout") return Outcome::timeout;
  throw ParseError("unknown outcome '" + s + "'");
}

struct RunRecord {
  std::string scenario_id;
  std::string cluster;
  Outcome outcome{Outcome::timeout};
  std::optional<CostReport> cost;  // present iff outcome == solved
  double wall_time_s{0.0};
  int steps{0};
  Trajectory executed;
  std::map<int, std::vector<PredState>> obstacle_log;  // simulated pose per step
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string results_csv_header() {
  return "scenario_id,cluster,outcome,J_ego,J_jerk,J_SR,J_D,J_LC,wall_time_s,steps";
}

inline std::string to_csv_row(const RunRecord& r) {
  std::ostringstream os;
  os << r.scenario_id << ',' << r.cluster << ',' << to_string(r.outcome) << ',';
  if (r.cost) {
    os << format_double(r.cost->J_ego) << ',' << format_double(r.cost->J_jerk) << ','
       << format_double(r.cost->J_SR) << ',' << format_double(r.cost->J_D) << ','
       << format_double(r.cost->J_LC);
  } else {
    os << ",,,,";
  }
  os << ',' << format_double(r.wall_time_s) << ',' << r.steps;
  return os.str();
}

inline void write_results_csv(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write results file '" + path + "'");
  out << results_csv_header() << "\n";
  for (const auto& r : records) out << to_csv_row(r) << "\n";
}

// Row as read back from a results file; only the fields the comparison
// pipeline needs.
struct ResultRow {
  std::string scenario_id;
  std::string cluster;
  Outcome outcome{Outcome::timeout};
  std::optional<double> J_ego;
};

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}
}  // namespace detail

inline std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open results file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty results file '" + path + "'");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() < 10) throw ParseError("malformed results row: " + line);
    ResultRow r;
    r.scenario_id = f[0];
    r.cluster = f[1];
    r.outcome = outcome_from_string(f[2]);
    if (!f[3].empty()) r.J_ego = std::stod(f[3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

// trajectory.csv: t_step,x,y,v,phi,delta

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write trajectory file '" + path + "'");
  out << "t_step,x,y,v,phi,delta\n";
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& s = traj.states[i];
    out << (traj.t0_step + static_cast<int>(i)) << ',' << format_double(s.x) << ','
        << format_double(s.y) << ',' << format_double(s.v) << ',' << format_double(s.phi) << ','
        << format_double(s.delta) << "\n";
  }
}

inline Trajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory file '" + path + "'");
  Trajectory traj;
  bool first = true;
  int expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != 6) throw ParseError("malformed trajectory row: " + line);
    int t = std::stoi(f[0]);
    if (first) {
      traj.t0_step = t;
      expected = t;
      first = false;
    }
    if (t != expected) throw ParseError("trajectory time steps must be consecutive");
    ++expected;
    traj.states.push_back(VehicleState{std::stod(f[1]), std::stod(f[2]), std::stod(f[3]),
                                       std::stod(f[4]), std::stod(f[5])});
  }
  if (traj.states.empty()) throw ParseError("trajectory file has no states");
  return traj;
}

}  // namespace roadbench
