#pragma once

#include <stdexcept>
#include <string>

namespace roadbench {

// Scenario file could not be parsed at all.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario parsed but violates an invariant; message names the offending element.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Goal region unreachable in the lanelet graph.
struct NoRouteError : std::runtime_error {
  explicit NoRouteError(const std::string& msg) : std::runtime_error(msg) {}
};

// State projects beyond the reference path ends.
struct ProjectionError : std::runtime_error {
  explicit ProjectionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Every candidate was rejected; caller falls back to emergency braking.
struct NoFeasibleCandidate : std::runtime_error {
  explicit NoFeasibleCandidate(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrajectoryTooShort : std::runtime_error {
  explicit TrajectoryTooShort(const std::string& msg) : std::runtime_error(msg) {}
};

// Result sets being compared do not cover the same scenario ids.
struct MismatchedUniverse : std::runtime_error {
  explicit MismatchedUniverse(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace roadbench
