#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzkit/engine.hpp"
#include "fuzzkit/model.hpp"
#include "fuzzkit/simulation/car.hpp"
#include "fuzzkit/simulation/crane.hpp"

namespace fuzzkit::sim {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loads a controller from .fcl or .json.
FunctionBlock load_system(const std::filesystem::path& path);

struct CraneScenario {
  CraneParams plant;
  CraneState initial;
  double dt = 0.05;
  long long steps = 2000;
  double settle_distance = 0.5;  // m
  double settle_angle = 0.05;    // rad
  bool angle_in_degrees = true;  // unit of the controller's angle input
  std::filesystem::path controller;
  std::optional<std::string> rule_block;
};

struct CarScenario {
  Track track{{}, {}};
  Vec2 start;
  double start_heading = 0.0;
  VehicleParams vehicle;
  ClassicParams classic;
  double dt = 0.05;
  long long steps = 4000;
  std::filesystem::path controller;
  std::optional<std::string> rule_block;
};

CraneScenario load_crane_scenario(const std::filesystem::path& path);
CarScenario load_car_scenario(const std::filesystem::path& path);

/// State after the step, the controller inputs that produced the command,
/// and the command itself.
struct CraneRecord {
  double time = 0.0;
  CraneState state;
  double input_distance = 0.0;
  double input_angle = 0.0;
  double power = 0.0;
  std::size_t rules_fired = 0;
  bool operator==(const CraneRecord&) const = default;
};

struct CarRecord {
  double time = 0.0;
  CarState state;
  Sensors inputs{};
  double steering = 0.0;
  double target_speed = 0.0;
  std::size_t rules_fired = 0;
  bool operator==(const CarRecord&) const = default;
};

/// Checks the controller exposes distance/angle inputs and a power output.
void check_crane_controller(const FunctionBlock& fb);
/// Checks Front/Left/Right/VeryLeft/VeryRight inputs and Steering/Speed outputs.
void check_car_controller(const FunctionBlock& fb);

std::vector<CraneRecord> run_crane(const CraneScenario& scenario, const FunctionBlock& controller,
                                   long long steps, const EngineConfig& config = {});

/// A car controller: a fuzzy system (and optional rule block) or, when
/// `fuzzy` is null, the classic threshold rules of the scenario.
struct CarController {
  const FunctionBlock* fuzzy = nullptr;
  std::optional<std::string> rule_block;
};

/// Runs until the lap completes or `steps` steps have elapsed.
std::vector<CarRecord> run_car(const CarScenario& scenario, const CarController& controller,
                               long long steps, const EngineConfig& config = {});

struct CraneMetrics {
  /// First step from which the band holds until the end of the run.
  std::optional<std::size_t> settling_step;
  std::optional<double> settling_time;
  double final_distance = 0.0;
  double final_angle = 0.0;
  double max_abs_angle = 0.0;
};

CraneMetrics crane_metrics(const std::vector<CraneRecord>& records, double settle_distance,
                           double settle_angle);

struct PathMetrics {
  std::optional<double> lap_time;  // absent when the lap is incomplete
  std::size_t collisions = 0;      // entries into a wall
  double steering_total_variation = 0.0;
  bool operator==(const PathMetrics&) const = default;
};

PathMetrics path_metrics(const std::vector<CarRecord>& records);

struct PathComparison {
  PathMetrics a;
  PathMetrics b;
  std::optional<double> lap_time_difference;  // a - b, when both complete
  long long collision_difference = 0;         // a - b
  double total_variation_difference = 0.0;    // a - b
};

PathComparison compare_paths(const std::vector<CarRecord>& a, const std::vector<CarRecord>& b);

/// CSV with a header row; numbers in shortest round-trip form.
void write_csv(std::ostream& out, const std::vector<CraneRecord>& records);
void write_csv(std::ostream& out, const std::vector<CarRecord>& records);

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

}  // namespace fuzzkit::sim
