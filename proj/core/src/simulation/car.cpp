#include "fuzzkit/simulation/car.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fuzzkit::sim {

std::vector<Segment> polygon_edges(std::span<const Vec2> polygon) {
  std::vector<Segment> edges;
  if (polygon.size() < 2) return edges;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    edges.push_back(Segment{polygon[i], polygon[(i + 1) % polygon.size()]});
  }
  return edges;
}

bool inside_polygon(std::span<const Vec2> polygon, Vec2 p) noexcept {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[(i + 1) % n];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) {
      inside = !inside;
    }
  }
  return inside;
}

double cast_ray(std::span<const Segment> walls, Vec2 origin, double angle, double max_range) noexcept {
  const double dx = std::cos(angle);
  const double dy = std::sin(angle);
  double best = max_range;
  for (const auto& w : walls) {
    const double ex = w.b.x - w.a.x;
    const double ey = w.b.y - w.a.y;
    const double den = dx * ey - dy * ex;
    if (std::abs(den) < 1e-12) continue;  // parallel
    const double qx = w.a.x - origin.x;
    const double qy = w.a.y - origin.y;
    const double t = (qx * ey - qy * ex) / den;
    const double u = (qx * dy - qy * dx) / den;
    if (t >= 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, t);
  }
  return best;
}

Track::Track(std::vector<Vec2> outer, std::vector<Vec2> inner, std::vector<Vec2> centerline)
    : outer_(std::move(outer)), inner_(std::move(inner)), centerline_(std::move(centerline)) {
  walls_ = polygon_edges(outer_);
  const auto inner_edges = polygon_edges(inner_);
  walls_.insert(walls_.end(), inner_edges.begin(), inner_edges.end());
  for (const auto& e : polygon_edges(centerline_)) {
    cumulative_.push_back(total_length_);
    total_length_ += std::hypot(e.b.x - e.a.x, e.b.y - e.a.y);
  }
}

bool Track::in_corridor(Vec2 p) const noexcept {
  if (!outer_.empty() && !inside_polygon(outer_, p)) return false;
  return inner_.empty() || !inside_polygon(inner_, p);
}

double Track::arclength(Vec2 p) const noexcept {
  if (centerline_.size() < 2) return 0.0;
  double best_dist = INFINITY;
  double best_arc = 0.0;
  const std::size_t n = centerline_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = centerline_[i];
    const Vec2 b = centerline_[(i + 1) % n];
    const double ex = b.x - a.x;
    const double ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    if (len2 == 0.0) continue;
    const double u = std::clamp(((p.x - a.x) * ex + (p.y - a.y) * ey) / len2, 0.0, 1.0);
    const double d = std::hypot(p.x - (a.x + u * ex), p.y - (a.y + u * ey));
    if (d < best_dist) {
      best_dist = d;
      best_arc = cumulative_[i] + u * std::sqrt(len2);
    }
  }
  return best_arc;
}

Sensors cast_sensors(const Track& track, Vec2 position, double heading, double range) noexcept {
  Sensors out{};
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    const double angle = heading + kSensorOffsets[i] * std::numbers::pi / 180.0;
    out[i] = cast_ray(track.walls(), position, angle, range);
  }
  return out;
}

CarState car_start(const Track& track, Vec2 position, double heading, const VehicleParams& params) {
  CarState s;
  s.position = position;
  s.heading = heading;
  s.sensors = cast_sensors(track, position, heading, params.sensor_range);
  s.collided = !track.in_corridor(position);
  s.last_arclength = track.arclength(position);
  return s;
}

CarState car_step(const CarState& s, double steering, double target_speed, const Track& track,
                  double dt, const VehicleParams& p) {
  CarState next = s;
  const double steer = steering * std::numbers::pi / 180.0;
  const double yaw_rate =
      std::clamp(s.speed * std::tan(steer) / p.wheelbase, -p.max_yaw_rate, p.max_yaw_rate);
  next.heading = s.heading + yaw_rate * dt;
  next.speed = std::max(0.0, s.speed + (target_speed - s.speed) * dt / p.speed_tau);
  next.position.x = s.position.x + next.speed * std::cos(next.heading) * dt;
  next.position.y = s.position.y + next.speed * std::sin(next.heading) * dt;
  next.time = s.time + dt;
  next.sensors = cast_sensors(track, next.position, next.heading, p.sensor_range);
  next.collided = !track.in_corridor(next.position);

  const double total = track.centerline_length();
  if (total > 0.0) {
    const double arc = track.arclength(next.position);
    double delta = arc - s.last_arclength;
    // Unwrap across the start/finish seam.
    if (delta < -total / 2) delta += total;
    if (delta > total / 2) delta -= total;
    next.travelled = s.travelled + delta;
    next.last_arclength = arc;
    next.lap_progress = std::clamp(next.travelled / total, 0.0, 1.0);
  }
  return next;
}

Command classic_controller(const Sensors& s, const ClassicParams& p) noexcept {
  Command c;
  c.speed = p.speed_default;
  const double front = s[0], left = s[1], right = s[2], very_left = s[3], very_right = s[4];
  if (front >= p.front_normal && front < p.front_far) {
    c.steering = 0.0;
    c.speed = p.speed_normal;
    ++c.rules_fired;
  }
  if (front >= p.front_far) {
    c.steering = 0.0;
    c.speed = p.speed_far;
    ++c.rules_fired;
  }
  if (left < p.side_close) {
    c.steering = -p.steer;
    ++c.rules_fired;
  }
  if (right < p.side_close) {
    c.steering = p.steer;
    ++c.rules_fired;
  }
  if (very_left < p.diagonal_close) {
    c.steering = -p.hard_steer;
    ++c.rules_fired;
  }
  if (very_right < p.diagonal_close) {
    c.steering = p.hard_steer;
    ++c.rules_fired;
  }
  return c;
}

}  // namespace fuzzkit::sim
