#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "fuzzkit/simulation/geometry.hpp"

namespace fuzzkit::sim {

inline constexpr std::size_t kSensorCount = 5;
/// Controller input names, in sensor order.
inline constexpr std::array<std::string_view, kSensorCount> kSensorNames = {
    "Front", "Left", "Right", "VeryLeft", "VeryRight"};
/// Ray offsets from the heading, degrees, counter-clockwise positive.
inline constexpr std::array<double, kSensorCount> kSensorOffsets = {0.0, 30.0, -30.0, 60.0, -60.0};

using Sensors = std::array<double, kSensorCount>;

/// Corridor between an outer and an optional inner closed polygon. The
/// centerline, when present, measures lap progress.
class Track {
 public:
  Track(std::vector<Vec2> outer, std::vector<Vec2> inner, std::vector<Vec2> centerline = {});

  const std::vector<Vec2>& outer() const noexcept { return outer_; }
  const std::vector<Vec2>& inner() const noexcept { return inner_; }
  const std::vector<Vec2>& centerline() const noexcept { return centerline_; }
  const std::vector<Segment>& walls() const noexcept { return walls_; }

  bool in_corridor(Vec2 p) const noexcept;
  double centerline_length() const noexcept { return total_length_; }
  /// Arclength of the centerline point nearest to p; 0 without a centerline.
  double arclength(Vec2 p) const noexcept;

 private:
  std::vector<Vec2> outer_;
  std::vector<Vec2> inner_;
  std::vector<Vec2> centerline_;
  std::vector<Segment> walls_;
  std::vector<double> cumulative_;
  double total_length_ = 0.0;
};

struct VehicleParams {
  double wheelbase = 2.5;     // m
  double max_yaw_rate = 1.2;  // rad/s
  double speed_tau = 1.0;     // s, first-order speed lag
  double sensor_range = 20.0;  // m
};

struct CarState {
  Vec2 position;
  double heading = 0.0;  // rad
  double speed = 0.0;    // m/s
  Sensors sensors{};
  double lap_progress = 0.0;  // clamped to [0, 1]
  bool collided = false;
  double time = 0.0;
  // Unwrapped centerline distance travelled and the last arclength seen.
  double travelled = 0.0;
  double last_arclength = 0.0;
  bool operator==(const CarState&) const = default;
};

Sensors cast_sensors(const Track& track, Vec2 position, double heading, double range) noexcept;

CarState car_start(const Track& track, Vec2 position, double heading, const VehicleParams& params = {});

/// Steering in degrees, positive turns left; target_speed in m/s.
CarState car_step(const CarState& state, double steering, double target_speed, const Track& track,
                  double dt, const VehicleParams& params = {});

/// Threshold rules mirroring the fuzzy car one for one. Later rules
/// override earlier ones.
struct ClassicParams {
  double front_normal = 6.0;    // Front in [front_normal, front_far): cruise
  double front_far = 18.0;      // Front >= front_far: fast
  double side_close = 6.0;      // Left/Right below: steer
  double diagonal_close = 5.0;  // VeryLeft/VeryRight below: hard steer
  double steer = 20.0;
  double hard_steer = 45.0;
  double speed_normal = 8.0;
  double speed_far = 14.0;
  double speed_default = 4.0;
};

struct Command {
  double steering = 0.0;
  double speed = 0.0;
  std::size_t rules_fired = 0;
};

Command classic_controller(const Sensors& sensors, const ClassicParams& params = {}) noexcept;

}  // namespace fuzzkit::sim
