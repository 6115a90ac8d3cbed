#pragma once
// Planar geometry used by the scene builder: polylines, arclength slicing,
// buffered footprints and convex clipping.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace scenekg::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }
/// Left-hand normal of a unit direction.
inline Vec2 left_normal(Vec2 d) { return {-d.y, d.x}; }

using Polyline = std::vector<Vec2>;
using Polygon = std::vector<Vec2>;

inline double arclength(const Polyline& line) {
  double total = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) total += distance(line[i - 1], line[i]);
  return total;
}

/// Point at arclength s along the line, clamped to its ends.
inline Vec2 point_at(const Polyline& line, double s) {
  if (line.empty()) return {};
  if (s <= 0.0) return line.front();
  double walked = 0.0;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const double len = distance(line[i - 1], line[i]);
    if (walked + len >= s && len > 0.0) {
      const double t = (s - walked) / len;
      return line[i - 1] + (line[i] - line[i - 1]) * t;
    }
    walked += len;
  }
  return line.back();
}

/// Piece of the line between arclengths [s0, s1], keeping interior vertices.
inline Polyline slice(const Polyline& line, double s0, double s1) {
  Polyline out{point_at(line, s0)};
  double walked = 0.0;
  for (std::size_t i = 1; i + 1 < line.size(); ++i) {
    walked += distance(line[i - 1], line[i]);
    if (walked > s0 && walked < s1) out.push_back(line[i]);
  }
  out.push_back(point_at(line, s1));
  return out;
}

/// Shoelace area; positive for counter-clockwise rings.
inline double signed_area(const Polygon& poly) {
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    acc += cross(a, b);
  }
  return 0.5 * acc;
}

inline double area(const Polygon& poly) { return std::abs(signed_area(poly)); }

inline Polygon counter_clockwise(Polygon poly) {
  if (signed_area(poly) < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

inline Vec2 vertex_centroid(const Polygon& poly) {
  Vec2 c;
  for (const Vec2& p : poly) c = c + p;
  return poly.empty() ? c : c * (1.0 / static_cast<double>(poly.size()));
}

/// Rectangle centered at `center`, long side along `heading`. CCW.
inline Polygon oriented_box(Vec2 center, double heading, double length, double width) {
  const Vec2 d = unit_from_heading(heading);
  const Vec2 n = left_normal(d);
  const Vec2 hl = d * (0.5 * length);
  const Vec2 hw = n * (0.5 * width);
  return {center - hl - hw, center + hl - hw, center + hl + hw, center - hl + hw};
}

/// Buffers a centerline by width/2 on both sides using mitered joints.
inline Polygon footprint(const Polyline& line, double width) {
  Polyline pts;
  for (const Vec2& p : line)
    if (pts.empty() || distance(pts.back(), p) > 1e-12) pts.push_back(p);
  if (pts.size() < 2) return {};
  const double half = 0.5 * width;
  std::vector<Vec2> normals(pts.size());
  auto edge_normal = [&](std::size_t i) {
    const Vec2 d = pts[i + 1] - pts[i];
    return left_normal(d * (1.0 / norm(d)));
  };
  normals.front() = edge_normal(0) * half;
  normals.back() = edge_normal(pts.size() - 2) * half;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2 a = edge_normal(i - 1);
    const Vec2 b = edge_normal(i);
    Vec2 m = a + b;
    const double mlen = norm(m);
    if (mlen < 1e-9) {
      normals[i] = a * half;
      continue;
    }
    m = m * (1.0 / mlen);
    // Miter length grows as 1/cos(theta/2); cap it for near-reversals.
    const double c = std::max(dot(m, a), 0.25);
    normals[i] = m * (half / c);
  }
  Polygon poly;
  poly.reserve(2 * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) poly.push_back(pts[i] + normals[i]);
  for (std::size_t i = pts.size(); i-- > 0;) poly.push_back(pts[i] - normals[i]);
  return counter_clockwise(std::move(poly));
}

/// Sutherland-Hodgman: clips any simple polygon against a convex CCW clipper.
/// The area of the result equals the intersection area.
inline Polygon clip_convex(const Polygon& subject, const Polygon& convex_ccw) {
  Polygon out = subject;
  for (std::size_t i = 0; i < convex_ccw.size() && !out.empty(); ++i) {
    const Vec2 a = convex_ccw[i];
    const Vec2 b = convex_ccw[(i + 1) % convex_ccw.size()];
    auto inside = [&](Vec2 p) { return cross(b - a, p - a) >= 0.0; };
    auto intersect = [&](Vec2 p, Vec2 q) {
      const double cp = cross(b - a, p - a);
      const double cq = cross(b - a, q - a);
      return p + (q - p) * (cp / (cp - cq));
    };
    Polygon in = std::move(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Vec2 cur = in[j];
      const Vec2 prev = in[(j + in.size() - 1) % in.size()];
      const bool cur_in = inside(cur);
      const bool prev_in = inside(prev);
      if (cur_in) {
        if (!prev_in) out.push_back(intersect(prev, cur));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersect(prev, cur));
      }
    }
  }
  return out;
}

inline double overlap_area(const Polygon& subject, const Polygon& convex_clipper) {
  if (subject.size() < 3 || convex_clipper.size() < 3) return 0.0;
  return area(clip_convex(subject, counter_clockwise(convex_clipper)));
}

/// Andrew's monotone chain; CCW, no repeated end point.
inline Polygon convex_hull(Polygon pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

}  // namespace scenekg::geom
