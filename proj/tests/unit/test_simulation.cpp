#include <fstream>
#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "fuzzkit/simulation/config.hpp"
#include "fuzzkit/simulation/scenario.hpp"
#include "paths.hpp"
#include "systems.hpp"

using namespace fuzzkit;
using namespace fuzzkit::sim;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

/// Axis-aligned box [x0, x1] x [-half, half] with no inner wall.
Track corridor(double x0, double x1, double half) {
  return Track({{x0, -half}, {x1, -half}, {x1, half}, {x0, half}}, {});
}

CraneScenario crane_scenario() { return load_crane_scenario(testing_paths::assets() / "scenarios/crane.cfg"); }
CarScenario car_scenario() { return load_car_scenario(testing_paths::assets() / "scenarios/car.cfg"); }

std::string header(const std::string& csv) { return csv.substr(0, csv.find('\n')); }

}  // namespace

TEST_CASE("crane at rest on target stays put") {
  const CraneState s{};
  const CraneState next = crane_step(s, 0.0, 0.05);
  CHECK(next.distance == 0.0);
  CHECK(next.angle == 0.0);
  CHECK(next.cart_velocity == 0.0);
  CHECK(next.angular_velocity == 0.0);
  CHECK(next.time == 0.05);
}

TEST_CASE("pendulum swings back toward vertical") {
  CraneState s;
  s.angle = 0.1;
  CHECK(crane_step(s, 0.0, 0.05).angular_velocity < 0.0);
  s.angle = -0.1;
  CHECK(crane_step(s, 0.0, 0.05).angular_velocity > 0.0);
}

TEST_CASE("moving toward the target shortens the distance") {
  CraneState s;
  s.distance = 30;
  s.cart_velocity = 2;
  CHECK(crane_step(s, 0.0, 0.05).distance < 30);
}

TEST_CASE("constant power drives the cart to its terminal velocity") {
  const CraneParams p;
  const double power = 3.0, dt = 0.05;
  const double terminal = p.kp * power / p.kf;
  CraneState s;
  double prev = 0.0;
  for (int n = 1; n <= 100; ++n) {
    s = crane_step(s, power, dt, p);
    // Exact solution of the discrete recurrence v' = v + dt (kp P - kf v).
    const double expected = terminal * (1.0 - std::pow(1.0 - p.kf * dt, n));
    REQUIRE(std::fabs(s.cart_velocity - expected) <= 1e-12);
    REQUIRE(s.cart_velocity > prev);
    REQUIRE(s.cart_velocity < terminal);
    prev = s.cart_velocity;
  }
  for (int n = 0; n < 2000; ++n) s = crane_step(s, power, dt, p);
  CHECK(std::fabs(s.cart_velocity - terminal) <= 1e-9);
}

TEST_CASE("without drag or power the pendulum keeps its energy") {
  CraneParams p;
  p.kf = 0.0;
  CraneState s;
  s.angle = 0.3;
  const double e0 = pendulum_energy(s, p);
  CHECK(e0 == doctest::Approx(p.gravity * p.length * (1 - std::cos(0.3))));
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    s = crane_step(s, 0.0, 1e-3, p);
    worst = std::max(worst, std::fabs(pendulum_energy(s, p) - e0) / e0);
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("ray casting against hand-built corridors") {
  const Track box = corridor(0, 13, 5);
  const Vec2 at{10, 0};
  const auto s = cast_sensors(box, at, 0.0, 20.0);
  CHECK(std::fabs(s[0] - 3.0) <= 1e-9);
  // Side rays meet the walls y = +-5 at offsets of 30 and 60 degrees,
  // unless the end wall x = 13 is closer.
  CHECK(std::fabs(s[1] - std::min(5 / std::sin(30 * kDeg), 3 / std::cos(30 * kDeg))) <= 1e-9);
  CHECK(std::fabs(s[2] - s[1]) <= 1e-9);
  CHECK(std::fabs(s[3] - std::min(5 / std::sin(60 * kDeg), 3 / std::cos(60 * kDeg))) <= 1e-9);
  CHECK(std::fabs(s[4] - s[3]) <= 1e-9);

  const Track open = corridor(0, 100, 2);
  const auto far = cast_sensors(open, {10, 0}, 0.0, 20.0);
  CHECK(far[0] == 20.0);
  CHECK(std::fabs(far[1] - 4.0) <= 1e-9);
  CHECK(std::fabs(far[3] - 2 / std::sin(60 * kDeg)) <= 1e-9);

  const auto walls = polygon_edges(std::vector<Vec2>{{0, 0}, {4, 0}, {4, 4}});
  CHECK(walls.size() == 3);
  CHECK(std::fabs(cast_ray(walls, {1, 0.5}, std::numbers::pi / 2, 50) - 0.5) <= 1e-9);
  CHECK(inside_polygon(std::vector<Vec2>{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {2, 2}));
  CHECK_FALSE(inside_polygon(std::vector<Vec2>{{0, 0}, {4, 0}, {4, 4}, {0, 4}}, {5, 2}));
}

TEST_CASE("sensors stay within [0, range]") {
  const auto sc = car_scenario();
  for (double x = 1; x < 120; x += 3.7) {
    for (double y = 1; y < 70; y += 4.1) {
      const auto s = cast_sensors(sc.track, {x, y}, x * 0.1, sc.vehicle.sensor_range);
      for (double d : s) REQUIRE((d >= 0.0 && d <= sc.vehicle.sensor_range));
    }
  }
}

TEST_CASE("straight driving down a corridor keeps the centerline") {
  const Track t = corridor(0, 1000, 5);
  CarState s = car_start(t, {5, 0}, 0.0);
  for (int i = 0; i < 400; ++i) {
    s = car_step(s, 0.0, 10.0, t, 0.05);
    REQUIRE(s.position.y == 0.0);
    REQUIRE(s.heading == 0.0);
    REQUIRE(s.speed >= 0.0);
  }
  CHECK(s.position.x > 100);
  CHECK_FALSE(s.collided);
}

TEST_CASE("positive steering turns left and leaving the corridor is a collision") {
  const Track t = corridor(0, 1000, 5);
  CarState s = car_start(t, {5, 0}, 0.0);
  for (int i = 0; i < 10; ++i) s = car_step(s, 20.0, 10.0, t, 0.05);
  CHECK(s.heading > 0.0);
  CHECK(s.position.y > 0.0);
  for (int i = 0; i < 200 && !s.collided; ++i) s = car_step(s, 45.0, 10.0, t, 0.05);
  CHECK(s.collided);
}

TEST_CASE("scenario files load") {
  const auto c = crane_scenario();
  CHECK(c.plant.length == 10);
  CHECK(c.plant.kp == 0.5);
  CHECK(c.plant.kf == 0.3);
  CHECK(c.dt == 0.05);
  CHECK(c.steps == 2000);
  CHECK(c.initial.distance == 30);
  CHECK(c.angle_in_degrees);
  const auto car = car_scenario();
  CHECK(car.track.centerline_length() > 0);
  CHECK(car.track.in_corridor(car.start));
}

TEST_CASE("config parsing") {
  const auto cfg = Config::parse("a = 1.5  # note\n\n# comment\nname = hello world\npts = 0,0 1,2.5\n");
  CHECK(cfg.number("a") == 1.5);
  CHECK(cfg.text("name") == "hello world");
  CHECK(cfg.points("pts") == std::vector<Vec2>{{0, 0}, {1, 2.5}});
  CHECK(cfg.number_or("missing", 7) == 7);
  CHECK_THROWS_AS(cfg.number("missing"), ConfigError);
  CHECK_THROWS_AS(cfg.number("name"), ConfigError);
  CHECK_THROWS_AS(Config::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2"), ConfigError);
  CHECK_NOTHROW(cfg.require_known({"a", "name", "pts"}));
  CHECK_THROWS_WITH_AS(cfg.require_known({"a", "name"}), doctest::Contains("unknown key 'pts'"), ConfigError);
}

TEST_CASE("scenario files reject misspelled keys") {
  const auto dir = testing_paths::scratch_dir("cfg");
  std::ofstream(dir / "crane.cfg") << "controller = x.fcl\ngravty = 9.81\n";
  CHECK_THROWS_WITH_AS(load_crane_scenario(dir / "crane.cfg"), doctest::Contains("gravty"), ConfigError);
  std::ofstream(dir / "car.cfg") << "controller = x.fcl\nclassic.steering = 3\n";
  CHECK_THROWS_WITH_AS(load_car_scenario(dir / "car.cfg"), doctest::Contains("classic.steering"), ConfigError);
}

TEST_CASE("crane run settles, stays bounded and is deterministic") {
  const auto sc = crane_scenario();
  const auto fb = load_system(sc.controller);
  const auto runs = run_crane(sc, fb, sc.steps);
  CHECK(runs == run_crane(sc, fb, sc.steps));
  REQUIRE(runs.size() == 2000);
  const auto& power = *fb.find_output("power");
  double t = 0.0;
  for (const auto& r : runs) {
    REQUIRE(r.time > t);
    t = r.time;
    REQUIRE((r.power >= power.range.min && r.power <= power.range.max));
    REQUIRE(std::fabs(r.state.angle) < std::numbers::pi / 2);
  }
  const auto m = crane_metrics(runs, sc.settle_distance, sc.settle_angle);
  REQUIRE(m.settling_step);
  CHECK(std::fabs(m.final_distance) <= 0.5);
  CHECK(std::fabs(m.final_angle) <= 0.05);
  CHECK(run_crane(sc, fb, 0).empty());
}

TEST_CASE("car runs: the fuzzy car laps cleanly and steers more smoothly") {
  const auto sc = car_scenario();
  const auto fb = load_system(sc.controller);
  const auto fuzzy = run_car(sc, CarController{&fb, {}}, sc.steps);
  const auto classic = run_car(sc, CarController{}, sc.steps);
  CHECK(fuzzy == run_car(sc, CarController{&fb, {}}, sc.steps));
  const auto& steer = *fb.find_output("Steering");
  const auto& speed = *fb.find_output("Speed");
  for (const auto& r : fuzzy) {
    REQUIRE((r.steering >= steer.range.min && r.steering <= steer.range.max));
    REQUIRE((r.target_speed >= speed.range.min && r.target_speed <= speed.range.max));
    REQUIRE(r.state.speed >= 0.0);
  }
  const auto cmp = compare_paths(fuzzy, classic);
  REQUIRE(cmp.a.lap_time);
  REQUIRE(cmp.b.lap_time);
  CHECK(cmp.a.collisions == 0);
  CHECK(fuzzy.back().state.lap_progress == 1.0);
  CHECK(cmp.a.steering_total_variation < cmp.b.steering_total_variation);
  CHECK(run_car(sc, CarController{&fb, {}}, 0).empty());
}

TEST_CASE("path metrics") {
  const auto sc = car_scenario();
  const auto fb = load_system(sc.controller);
  const auto run = run_car(sc, CarController{&fb, {}}, 300);
  const auto same = compare_paths(run, run);
  CHECK(same.collision_difference == 0);
  CHECK(same.total_variation_difference == 0.0);
  CHECK_FALSE(same.lap_time_difference);  // 300 steps is not a lap
  CHECK_FALSE(path_metrics(run).lap_time);

  std::vector<CarRecord> bump(6);
  const bool hits[] = {false, true, true, false, false, false};
  const double steering[] = {0, 10, -10, -10, 5, 5};
  for (std::size_t i = 0; i < bump.size(); ++i) {
    bump[i].time = 0.05 * static_cast<double>(i + 1);
    bump[i].state.collided = hits[i];
    bump[i].steering = steering[i];
  }
  const auto m = path_metrics(bump);
  CHECK(m.collisions == 1);
  CHECK(m.steering_total_variation == 10 + 20 + 0 + 15 + 0);
}

TEST_CASE("controller and plant names are checked before the first step") {
  const auto toy = systems::toy();
  CHECK_THROWS_AS(check_crane_controller(toy), ScenarioError);
  CHECK_THROWS_AS(check_car_controller(toy), ScenarioError);
  CHECK_THROWS_AS(run_crane(crane_scenario(), toy, 10), ScenarioError);
  CHECK_THROWS_AS(run_car(car_scenario(), CarController{&toy, {}}, 10), ScenarioError);
}

TEST_CASE("csv layouts") {
  const auto sc = crane_scenario();
  const auto fb = load_system(sc.controller);
  std::ostringstream crane;
  write_csv(crane, run_crane(sc, fb, 3));
  CHECK(header(crane.str()) ==
        "time,distance,angle,cart_velocity,angular_velocity,input_distance,input_angle,power,rules_fired");
  const std::string crane_csv = crane.str();
  CHECK(std::count(crane_csv.begin(), crane_csv.end(), '\n') == 4);

  std::ostringstream empty;
  write_csv(empty, std::vector<CraneRecord>{});
  const std::string empty_csv = empty.str();
  CHECK(std::count(empty_csv.begin(), empty_csv.end(), '\n') == 1);

  const auto car = car_scenario();
  const auto cfb = load_system(car.controller);
  std::ostringstream out;
  write_csv(out, run_car(car, CarController{&cfb, {}}, 2));
  CHECK(header(out.str()) ==
        "time,x,y,heading,speed,front,left,right,very_left,very_right,lap_progress,collided,steering,"
        "target_speed,rules_fired");

  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
