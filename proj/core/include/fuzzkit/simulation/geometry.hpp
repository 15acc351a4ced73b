#pragma once

#include <span>
#include <vector>

namespace fuzzkit::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Edges of a closed polygon, last vertex joined to the first.
std::vector<Segment> polygon_edges(std::span<const Vec2> polygon);

/// Even-odd point-in-polygon test.
bool inside_polygon(std::span<const Vec2> polygon, Vec2 p) noexcept;

/// Distance along the unit ray (origin, angle) to the nearest wall, capped
/// at max_range.
double cast_ray(std::span<const Segment> walls, Vec2 origin, double angle, double max_range) noexcept;

}  // namespace fuzzkit::sim
