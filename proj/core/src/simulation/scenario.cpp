#include "fuzzkit/simulation/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fuzzkit/fcl.hpp"
#include "fuzzkit/json_io.hpp"
#include "fuzzkit/simulation/config.hpp"

namespace fuzzkit::sim {
namespace {

std::size_t fired(const EvaluationTrace& trace) {
  return static_cast<std::size_t>(std::count_if(trace.rule_firings.begin(), trace.rule_firings.end(),
                                                [](const RuleFiring& f) { return f.weighted_strength > 0.0; }));
}

void require(const FunctionBlock& fb, std::span<const std::string_view> inputs,
             std::span<const std::string_view> outputs, const char* scenario) {
  std::string missing;
  for (auto name : inputs) {
    if (!fb.find_input(name)) missing += " input '" + std::string(name) + "'";
  }
  for (auto name : outputs) {
    if (!fb.find_output(name)) missing += " output '" + std::string(name) + "'";
  }
  if (!missing.empty()) {
    throw ScenarioError(std::string(scenario) + " controller '" + fb.name + "' lacks" + missing);
  }
}

void check_steps(long long steps) {
  if (steps < 0) throw ScenarioError("steps must be non-negative");
}

}  // namespace

FunctionBlock load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto ext = path.extension().string();
  if (ext == ".fcl") return parse_fcl(ss.str());
  if (ext == ".json") return from_json(ss.str());
  throw ScenarioError(path.string() + ": expected a .fcl or .json system");
}

CraneScenario load_crane_scenario(const std::filesystem::path& path) {
  const Config cfg = Config::load(path);
  cfg.require_known({"controller", "rule_block", "controller_angle_unit", "length", "gravity", "kp", "kf", "dt",
                     "steps", "initial_distance", "initial_angle", "initial_cart_velocity",
                     "initial_angular_velocity", "settle_distance", "settle_angle"});
  CraneScenario s;
  s.controller = cfg.path("controller");
  if (cfg.has("rule_block")) s.rule_block = cfg.text("rule_block");
  s.plant.length = cfg.number_or("length", s.plant.length);
  s.plant.gravity = cfg.number_or("gravity", s.plant.gravity);
  s.plant.kp = cfg.number_or("kp", s.plant.kp);
  s.plant.kf = cfg.number_or("kf", s.plant.kf);
  s.dt = cfg.number_or("dt", s.dt);
  if (cfg.has("steps")) s.steps = cfg.integer("steps");
  s.initial.distance = cfg.number_or("initial_distance", 30.0);
  s.initial.angle = cfg.number_or("initial_angle", 0.0);
  s.initial.cart_velocity = cfg.number_or("initial_cart_velocity", 0.0);
  s.initial.angular_velocity = cfg.number_or("initial_angular_velocity", 0.0);
  s.settle_distance = cfg.number_or("settle_distance", s.settle_distance);
  s.settle_angle = cfg.number_or("settle_angle", s.settle_angle);
  if (cfg.has("controller_angle_unit")) {
    const auto unit = cfg.text("controller_angle_unit");
    if (unit != "degrees" && unit != "radians") {
      throw ConfigError(cfg.source() + ": 'controller_angle_unit': expected degrees or radians");
    }
    s.angle_in_degrees = unit == "degrees";
  }
  if (!(s.dt > 0.0)) throw ConfigError(cfg.source() + ": 'dt' must be positive");
  return s;
}

CarScenario load_car_scenario(const std::filesystem::path& path) {
  const Config cfg = Config::load(path);
  cfg.require_known({"controller", "rule_block", "track.outer", "track.inner", "track.centerline", "start",
                     "start_heading", "wheelbase", "max_yaw_rate", "speed_tau", "sensor_range", "dt", "steps",
                     "classic.front_normal", "classic.front_far", "classic.side_close", "classic.diagonal_close",
                     "classic.steer", "classic.hard_steer", "classic.speed_normal", "classic.speed_far",
                     "classic.speed_default"});
  CarScenario s;
  s.controller = cfg.path("controller");
  if (cfg.has("rule_block")) s.rule_block = cfg.text("rule_block");
  s.track = Track(cfg.points("track.outer"), cfg.points("track.inner"), cfg.points("track.centerline"));
  s.start = cfg.point("start");
  s.start_heading = cfg.number_or("start_heading", 0.0) * std::numbers::pi / 180.0;
  s.vehicle.wheelbase = cfg.number_or("wheelbase", s.vehicle.wheelbase);
  s.vehicle.max_yaw_rate = cfg.number_or("max_yaw_rate", s.vehicle.max_yaw_rate);
  s.vehicle.speed_tau = cfg.number_or("speed_tau", s.vehicle.speed_tau);
  s.vehicle.sensor_range = cfg.number_or("sensor_range", s.vehicle.sensor_range);
  s.dt = cfg.number_or("dt", s.dt);
  if (cfg.has("steps")) s.steps = cfg.integer("steps");
  auto& c = s.classic;
  c.front_normal = cfg.number_or("classic.front_normal", c.front_normal);
  c.front_far = cfg.number_or("classic.front_far", c.front_far);
  c.side_close = cfg.number_or("classic.side_close", c.side_close);
  c.diagonal_close = cfg.number_or("classic.diagonal_close", c.diagonal_close);
  c.steer = cfg.number_or("classic.steer", c.steer);
  c.hard_steer = cfg.number_or("classic.hard_steer", c.hard_steer);
  c.speed_normal = cfg.number_or("classic.speed_normal", c.speed_normal);
  c.speed_far = cfg.number_or("classic.speed_far", c.speed_far);
  c.speed_default = cfg.number_or("classic.speed_default", c.speed_default);
  if (!(s.dt > 0.0)) throw ConfigError(cfg.source() + ": 'dt' must be positive");
  return s;
}

void check_crane_controller(const FunctionBlock& fb) {
  constexpr std::string_view inputs[] = {"distance", "angle"};
  constexpr std::string_view outputs[] = {"power"};
  require(fb, inputs, outputs, "crane");
}

void check_car_controller(const FunctionBlock& fb) {
  constexpr std::string_view outputs[] = {"Steering", "Speed"};
  require(fb, kSensorNames, outputs, "car");
}

std::vector<CraneRecord> run_crane(const CraneScenario& scenario, const FunctionBlock& controller,
                                   long long steps, const EngineConfig& config) {
  check_steps(steps);
  check_crane_controller(controller);
  if (scenario.rule_block && !controller.find_rule_block(*scenario.rule_block)) {
    throw ScenarioError("crane controller has no rule block '" + *scenario.rule_block + "'");
  }
  std::vector<CraneRecord> records;
  records.reserve(static_cast<std::size_t>(steps));
  CraneState state = scenario.initial;
  InputMap inputs;
  for (long long k = 0; k < steps; ++k) {
    const double angle_in =
        scenario.angle_in_degrees ? state.angle * 180.0 / std::numbers::pi : state.angle;
    inputs["distance"] = state.distance;
    inputs["angle"] = angle_in;
    const auto trace = evaluate(controller, inputs, scenario.rule_block, config);
    const double power = trace.output("power");
    state = crane_step(state, power, scenario.dt, scenario.plant);
    records.push_back(CraneRecord{state.time, state, inputs["distance"], angle_in, power, fired(trace)});
  }
  return records;
}

std::vector<CarRecord> run_car(const CarScenario& scenario, const CarController& controller,
                               long long steps, const EngineConfig& config) {
  check_steps(steps);
  if (controller.fuzzy) {
    check_car_controller(*controller.fuzzy);
    if (controller.rule_block && !controller.fuzzy->find_rule_block(*controller.rule_block)) {
      throw ScenarioError("car controller has no rule block '" + *controller.rule_block + "'");
    }
  }
  std::vector<CarRecord> records;
  CarState state = car_start(scenario.track, scenario.start, scenario.start_heading, scenario.vehicle);
  InputMap inputs;
  for (long long k = 0; k < steps; ++k) {
    Command cmd;
    if (controller.fuzzy) {
      for (std::size_t i = 0; i < kSensorCount; ++i) inputs[std::string(kSensorNames[i])] = state.sensors[i];
      const auto trace = evaluate(*controller.fuzzy, inputs, controller.rule_block, config);
      cmd.steering = trace.output("Steering");
      cmd.speed = trace.output("Speed");
      cmd.rules_fired = fired(trace);
    } else {
      cmd = classic_controller(state.sensors, scenario.classic);
    }
    const Sensors seen = state.sensors;
    state = car_step(state, cmd.steering, cmd.speed, scenario.track, scenario.dt, scenario.vehicle);
    records.push_back(CarRecord{state.time, state, seen, cmd.steering, cmd.speed, cmd.rules_fired});
    if (state.lap_progress >= 1.0) break;
  }
  return records;
}

CraneMetrics crane_metrics(const std::vector<CraneRecord>& records, double settle_distance,
                           double settle_angle) {
  CraneMetrics m;
  std::optional<std::size_t> start;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& s = records[i].state;
    m.max_abs_angle = std::max(m.max_abs_angle, std::abs(s.angle));
    const bool ok = std::abs(s.distance) <= settle_distance && std::abs(s.angle) <= settle_angle;
    if (!ok) start.reset();
    else if (!start) start = i;
  }
  if (!records.empty()) {
    m.final_distance = records.back().state.distance;
    m.final_angle = records.back().state.angle;
  }
  if (start) {
    m.settling_step = start;
    m.settling_time = records[*start].time;
  }
  return m;
}

PathMetrics path_metrics(const std::vector<CarRecord>& records) {
  PathMetrics m;
  bool was_collided = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (i > 0) m.steering_total_variation += std::abs(r.steering - records[i - 1].steering);
    if (r.state.collided && !was_collided) ++m.collisions;
    was_collided = r.state.collided;
    if (!m.lap_time && r.state.lap_progress >= 1.0) m.lap_time = r.time;
  }
  return m;
}

PathComparison compare_paths(const std::vector<CarRecord>& a, const std::vector<CarRecord>& b) {
  PathComparison c;
  c.a = path_metrics(a);
  c.b = path_metrics(b);
  if (c.a.lap_time && c.b.lap_time) c.lap_time_difference = *c.a.lap_time - *c.b.lap_time;
  c.collision_difference =
      static_cast<long long>(c.a.collisions) - static_cast<long long>(c.b.collisions);
  c.total_variation_difference = c.a.steering_total_variation - c.b.steering_total_variation;
  return c;
}

std::string format_number(double value) {
  char buf[64];
  if (value == 0.0) value = 0.0;  // drop the sign of negative zero
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

void write_csv(std::ostream& out, const std::vector<CraneRecord>& records) {
  out << "time,distance,angle,cart_velocity,angular_velocity,input_distance,input_angle,power,"
         "rules_fired\n";
  for (const auto& r : records) {
    out << format_number(r.time) << ',' << format_number(r.state.distance) << ','
        << format_number(r.state.angle) << ',' << format_number(r.state.cart_velocity) << ','
        << format_number(r.state.angular_velocity) << ',' << format_number(r.input_distance) << ','
        << format_number(r.input_angle) << ',' << format_number(r.power) << ',' << r.rules_fired
        << '\n';
  }
}

void write_csv(std::ostream& out, const std::vector<CarRecord>& records) {
  out << "time,x,y,heading,speed,front,left,right,very_left,very_right,lap_progress,collided,"
         "steering,target_speed,rules_fired\n";
  for (const auto& r : records) {
    out << format_number(r.time) << ',' << format_number(r.state.position.x) << ','
        << format_number(r.state.position.y) << ',' << format_number(r.state.heading) << ','
        << format_number(r.state.speed);
    for (double s : r.inputs) out << ',' << format_number(s);
    out << ',' << format_number(r.state.lap_progress) << ',' << (r.state.collided ? 1 : 0) << ','
        << format_number(r.steering) << ',' << format_number(r.target_speed) << ',' << r.rules_fired
        << '\n';
  }
}

}  // namespace fuzzkit::sim
