#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace roadbench {

struct Vec2 {
  double x{0.0};
  double y{0.0};

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

inline Vec2 normalized(const Vec2& a) {
  double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{1.0, 0.0};
}

// Left-hand normal; with tangent (1,0) the normal points to +y.
inline Vec2 left_normal(const Vec2& t) { return {-t.y, t.x}; }

inline Vec2 rotate(const Vec2& p, double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y};
}

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

using Polyline = std::vector<Vec2>;
using Polygon = std::vector<Vec2>;  // closed implicitly, vertices in order

// ---------------------------------------------------------------------------
// Polyline helpers

inline double polyline_length(const Polyline& pl) {
  double len = 0.0;
  for (size_t i = 1; i < pl.size(); ++i) len += distance(pl[i - 1], pl[i]);
  return len;
}

inline std::vector<double> cumulative_arclength(const Polyline& pl) {
  std::vector<double> s(pl.size(), 0.0);
  for (size_t i = 1; i < pl.size(); ++i) s[i] = s[i - 1] + distance(pl[i - 1], pl[i]);
  return s;
}

// Point at arc length s along the polyline (clamped to the ends).
inline Vec2 point_at_arclength(const Polyline& pl, const std::vector<double>& cum, double s) {
  if (s <= 0.0) return pl.front();
  if (s >= cum.back()) return pl.back();
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  size_t i = static_cast<size_t>(it - cum.begin());
  double seg = cum[i] - cum[i - 1];
  double t = seg > 0.0 ? (s - cum[i - 1]) / seg : 0.0;
  return pl[i - 1] + (pl[i] - pl[i - 1]) * t;
}

// Resample to n_points with exactly uniform spacing (including both ends).
inline Polyline resample_uniform(const Polyline& pl, size_t n_points) {
  auto cum = cumulative_arclength(pl);
  double total = cum.back();
  Polyline out;
  out.reserve(n_points);
  for (size_t k = 0; k < n_points; ++k) {
    double s = total * static_cast<double>(k) / static_cast<double>(n_points - 1);
    out.push_back(point_at_arclength(pl, cum, s));
  }
  return out;
}

struct PolylineProjection {
  double s{0.0};         // arc length of the foot point
  double lateral{0.0};   // signed offset, left of travel direction positive
  size_t segment{0};
  bool beyond_start{false};
  bool beyond_end{false};
};

// Orthogonal projection onto a polyline. The foot is clamped into each
// segment; the closest clamped foot over all segments wins.
inline PolylineProjection project_to_polyline(const Polyline& pl, const std::vector<double>& cum,
                                              const Vec2& p) {
  PolylineProjection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < pl.size(); ++i) {
    Vec2 a = pl[i], b = pl[i + 1];
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    double tc = std::clamp(t, 0.0, 1.0);
    Vec2 foot = a + ab * tc;
    double d = distance(p, foot);
    if (d < best_dist) {
      best_dist = d;
      Vec2 tang = normalized(ab);
      best.s = cum[i] + tc * std::sqrt(len2);
      best.lateral = dot(p - foot, left_normal(tang));
      best.segment = i;
      best.beyond_start = (i == 0 && t < 0.0);
      best.beyond_end = (i + 2 == pl.size() && t > 1.0);
    }
  }
  return best;
}

// Unsigned distance from a point to a polyline.
inline double distance_to_polyline(const Polyline& pl, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < pl.size(); ++i) {
    Vec2 a = pl[i], ab = pl[i + 1] - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(p, a + ab * t));
  }
  return best;
}

// Curvature of the circumcircle through three points, signed by turn
// direction (left turn positive). Collinear points give 0.
inline double circumcircle_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  double area2 = cross(b - a, c - a);  // twice the signed triangle area
  double la = distance(a, b), lb = distance(b, c), lc = distance(c, a);
  double denom = la * lb * lc;
  if (denom < 1e-12) return 0.0;
  return 2.0 * area2 / denom;
}

// ---------------------------------------------------------------------------
// Polygons

// Even-odd containment test; points on the boundary count as inside.
inline bool point_in_polygon(const Polygon& poly, const Vec2& p, double boundary_eps = 1e-9) {
  size_t n = poly.size();
  if (n < 3) return false;
  // boundary check first so ties resolve inclusively
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    if (distance(p, a + ab * t) <= boundary_eps) return true;
  }
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    bool crosses = (poly[i].y > p.y) != (poly[j].y > p.y);
    if (crosses) {
      double x_int = poly[j].x + (poly[i].x - poly[j].x) * (p.y - poly[j].y) / (poly[i].y - poly[j].y);
      if (p.x < x_int) inside = !inside;
    }
  }
  return inside;
}

// Proper or touching intersection of segments [a,b] and [c,d].
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    double v = cross(q - p, r - p);
    if (v > 1e-12) return 1;
    if (v < -1e-12) return -1;
    return 0;
  };
  auto on_segment = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return std::min(p.x, r.x) - 1e-12 <= q.x && q.x <= std::max(p.x, r.x) + 1e-12 &&
           std::min(p.y, r.y) - 1e-12 <= q.y && q.y <= std::max(p.y, r.y) + 1e-12;
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, c, b)) return true;
  if (o2 == 0 && on_segment(a, d, b)) return true;
  if (o3 == 0 && on_segment(c, a, d)) return true;
  if (o4 == 0 && on_segment(c, b, d)) return true;
  return false;
}

// Simple = no two non-adjacent edges intersect.
inline bool polygon_is_simple(const Polygon& poly) {
  size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      size_t i2 = (i + 1) % n, j2 = (j + 1) % n;
      if (i == j || i2 == j || i == j2) continue;  // shared vertex
      if (segments_intersect(poly[i], poly[i2], poly[j], poly[j2])) return false;
    }
  }
  return true;
}

inline Vec2 polygon_centroid(const Polygon& poly) {
  Vec2 c{0.0, 0.0};
  for (const auto& p : poly) c = c + p;
  return c * (1.0 / static_cast<double>(poly.size()));
}

// Minimum distance from a point to the polygon boundary, 0 if inside.
inline double distance_to_polygon(const Polygon& poly, const Vec2& p) {
  if (point_in_polygon(poly, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, distance(p, a + ab * t));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Oriented rectangles (vehicle footprints, occupancies)

struct OrientedRect {
  Vec2 center;
  double heading{0.0};
  double length{1.0};  // extent along the heading axis
  double width{1.0};

  std::array<Vec2, 4> corners() const {
    double hl = 0.5 * length, hw = 0.5 * width;
    Vec2 ax{std::cos(heading), std::sin(heading)};
    Vec2 ay = left_normal(ax);
    return {center + ax * hl + ay * hw, center - ax * hl + ay * hw,
            center - ax * hl - ay * hw, center + ax * hl - ay * hw};
  }
};

// Separating-axis overlap test for two oriented rectangles. Touching
// configurations count as overlapping: an axis separates only if the
// projection gap is strictly positive.
inline bool rects_overlap(const OrientedRect& a, const OrientedRect& b) {
  const OrientedRect* rects[2] = {&a, &b};
  for (int r = 0; r < 2; ++r) {
    double h = rects[r]->heading;
    Vec2 axes[2] = {{std::cos(h), std::sin(h)}, {-std::sin(h), std::cos(h)}};
    for (const Vec2& axis : axes) {
      auto project = [&axis](const OrientedRect& rect, double& lo, double& hi) {
        double c = dot(axis, rect.center);
        Vec2 ax{std::cos(rect.heading), std::sin(rect.heading)};
        Vec2 ay = left_normal(ax);
        double ext = 0.5 * rect.length * std::abs(dot(axis, ax)) +
                     0.5 * rect.width * std::abs(dot(axis, ay));
        lo = c - ext;
        hi = c + ext;
      };
      double alo, ahi, blo, bhi;
      project(a, alo, ahi);
      project(b, blo, bhi);
      if (ahi < blo || bhi < alo) return false;
    }
  }
  return true;
}

inline bool point_in_rect(const OrientedRect& r, const Vec2& p) {
  Vec2 d = p - r.center;
  Vec2 ax{std::cos(r.heading), std::sin(r.heading)};
  Vec2 ay = left_normal(ax);
  return std::abs(dot(d, ax)) <= 0.5 * r.length + 1e-12 &&
         std::abs(dot(d, ay)) <= 0.5 * r.width + 1e-12;
}

// Overlap between an oriented rectangle and a simple polygon.
inline bool rect_intersects_polygon(const OrientedRect& r, const Polygon& poly) {
  auto cs = r.corners();
  for (const auto& c : cs)
    if (point_in_polygon(poly, c)) return true;
  for (const auto& v : poly)
    if (point_in_rect(r, v)) return true;
  size_t n = poly.size();
  for (size_t i = 0; i < 4; ++i) {
    Vec2 a = cs[i], b = cs[(i + 1) % 4];
    for (size_t j = 0; j < n; ++j) {
      if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return true;
    }
  }
  return false;
}

}  // namespace roadbench
