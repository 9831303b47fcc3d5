/// @file geometry.hpp
/// Small planar-geometry helpers shared across the toolkit.
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fvrom {

using Vec2 = Eigen::Vector2d;

/// Rotate a vector by -90 degrees: maps a CCW-traversed edge direction to the
/// outward normal of the polygon being traversed.
inline Vec2 rotate_cw(const Vec2& v) { return Vec2(v.y(), -v.x()); }

/// Signed area of a polygon given as a CCW point loop (shoelace formula).
/// Positive for counter-clockwise loops.
inline double polygon_signed_area(const std::vector<Vec2>& loop) {
  double twice_area = 0.0;
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = loop[k];
    const Vec2& b = loop[(k + 1) % n];
    twice_area += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice_area;
}

/// Area centroid of a simple polygon. Falls back to the vertex average when
/// the signed area is (numerically) zero, so degenerate cells stay finite.
inline Vec2 polygon_centroid(const std::vector<Vec2>& loop) {
  double twice_area = 0.0;
  Vec2 acc = Vec2::Zero();
  const std::size_t n = loop.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2& a = loop[k];
    const Vec2& b = loop[(k + 1) % n];
    const double cross = a.x() * b.y() - b.x() * a.y();
    twice_area += cross;
    acc += (a + b) * cross;
  }
  if (std::abs(twice_area) < 1e-300) {
    Vec2 mean = Vec2::Zero();
    for (const Vec2& p : loop) mean += p;
    return mean / static_cast<double>(n);
  }
  return acc / (3.0 * twice_area);
}

}  // namespace fvrom
