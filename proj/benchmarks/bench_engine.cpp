#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "fuzzkit/engine.hpp"
#include "fuzzkit/fcl.hpp"
#include "fuzzkit/json_io.hpp"
#include "fuzzkit/simulation/scenario.hpp"

using namespace fuzzkit;

namespace {

std::string read_asset(const char* rel) {
  std::ifstream in(std::string(FUZZKIT_BENCH_ASSETS) + "/" + rel, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const FunctionBlock& crane() {
  static const FunctionBlock fb = parse_fcl(read_asset("fcl/valid/crane.fcl"));
  return fb;
}

const FunctionBlock& car() {
  static const FunctionBlock fb = parse_fcl(read_asset("fcl/valid/car.fcl"));
  return fb;
}

}  // namespace

static void BM_EvaluateCrane(benchmark::State& state) {
  const EngineConfig cfg{static_cast<std::size_t>(state.range(0))};
  const InputMap in{{"distance", 12.5}, {"angle", -2.0}};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(crane(), in, {}, cfg));
}
BENCHMARK(BM_EvaluateCrane)->Arg(101)->Arg(1001)->Arg(10001);

static void BM_EvaluateCar(benchmark::State& state) {
  const EngineConfig cfg{static_cast<std::size_t>(state.range(0))};
  const InputMap in{{"Front", 9}, {"Left", 4}, {"Right", 7}, {"VeryLeft", 3}, {"VeryRight", 12}};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(car(), in, {}, cfg));
}
BENCHMARK(BM_EvaluateCar)->Arg(101)->Arg(1001)->Arg(10001);

static void BM_Defuzzify(benchmark::State& state) {
  const auto method = static_cast<DefuzzMethod>(state.range(0));
  OutputSurface s;
  s.xs = sample_grid({0, 100}, 1001);
  const MembershipFunction a = shape::Trapezoid{10, 30, 40, 60};
  const MembershipFunction b = shape::Triangle{40, 70, 95};
  for (double x : s.xs) s.mus.push_back(std::max(std::min(0.6, membership(a, x)), std::min(0.9, membership(b, x))));
  state.SetLabel(std::string(to_string(method)));
  for (auto _ : state) benchmark::DoNotOptimize(defuzzify(s, method, 50.0));
}
BENCHMARK(BM_Defuzzify)
    ->Arg(static_cast<int>(DefuzzMethod::COG))
    ->Arg(static_cast<int>(DefuzzMethod::COA))
    ->Arg(static_cast<int>(DefuzzMethod::MOM));

static void BM_ParseCarFcl(benchmark::State& state) {
  const std::string src = read_asset("fcl/valid/car.fcl");
  for (auto _ : state) benchmark::DoNotOptimize(parse_fcl(src));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_ParseCarFcl);

static void BM_JsonRoundTrip(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(from_json(to_json(car())));
}
BENCHMARK(BM_JsonRoundTrip);

static void BM_CraneScenario(benchmark::State& state) {
  const auto sc = sim::load_crane_scenario(std::string(FUZZKIT_BENCH_ASSETS) + "/scenarios/crane.cfg");
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_crane(sc, crane(), 2000));
}
BENCHMARK(BM_CraneScenario)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
