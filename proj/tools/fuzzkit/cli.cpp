#include "fuzzkit/cli.hpp"

#include <fmt/format.h>
#include <pthread.h>

#include <charconv>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fuzzkit/fcl.hpp"
#include "fuzzkit/json_io.hpp"
#include "fuzzkit/service.hpp"
#include "fuzzkit/simulation/scenario.hpp"

namespace fuzzkit::cli {
namespace {

/// Raised after the problem has been reported on stderr.
struct Failure {
  int code;
};

[[noreturn]] void fail(std::ostream& err, int code, const std::string& message) {
  err << "fuzzkit: " << message << '\n';
  throw Failure{code};
}

std::string read_file(const std::filesystem::path& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(err, kIoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(err, kIoError, "cannot read " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text, std::ostream& err) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) fail(err, kIoError, "cannot write " + path.string());
}

enum class Format { Fcl, Json };

Format format_of(const std::filesystem::path& path, std::ostream& err) {
  const auto ext = path.extension().string();
  if (ext == ".fcl") return Format::Fcl;
  if (ext == ".json") return Format::Json;
  fail(err, kFailure, path.string() + ": expected a .fcl or .json file");
}

FunctionBlock load(const std::filesystem::path& path, std::ostream& err) {
  const Format format = format_of(path, err);
  const std::string text = read_file(path, err);
  try {
    return format == Format::Fcl ? parse_fcl(text) : from_json(text);
  } catch (const FclError& e) {
    for (const auto& d : e.diagnostics()) err << path.string() << ':' << d.message() << '\n';
  } catch (const SchemaError& e) {
    err << path.string() << ": " << to_string(e.code()) << " at "
        << (e.path().empty() ? "/" : e.path()) << '\n';
    if (e.violations().empty()) {
      err << "  " << e.what() << '\n';
    } else {
      for (const auto& v : e.violations()) {
        err << "  " << to_string(v.code) << " at " << v.path << ": " << v.message << '\n';
      }
    }
  }
  throw Failure{kFailure};
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

InputMap parse_assignments(const std::vector<std::string>& items, const char* flag, std::ostream& err) {
  InputMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    const auto value = eq == std::string::npos ? std::nullopt : parse_double(std::string_view(item).substr(eq + 1));
    if (eq == 0 || !value) {
      fail(err, kFailure, std::string(flag) + " expects name=value with a finite number, got '" + item + "'");
    }
    if (!out.emplace(item.substr(0, eq), *value).second) {
      fail(err, kFailure, std::string(flag) + " gives '" + item.substr(0, eq) + "' twice");
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

std::vector<std::string> input_names(const FunctionBlock& fb) {
  std::vector<std::string> out;
  for (const auto& v : fb.inputs) out.push_back(v.name);
  return out;
}

void check_inputs(const FunctionBlock& fb, const InputMap& inputs, std::ostream& err) {
  std::vector<std::string> missing;
  for (const auto& v : fb.inputs) {
    if (!inputs.count(v.name)) missing.push_back(v.name);
  }
  if (!missing.empty()) {
    fail(err, kFailure, "missing input " + join(missing) + "; required inputs: " + join(input_names(fb)));
  }
  for (const auto& [name, value] : inputs) {
    if (!fb.find_input(name)) {
      fail(err, kFailure, "'" + name + "' is not an input variable; required inputs: " + join(input_names(fb)));
    }
  }
}

void check_rule_block(const FunctionBlock& fb, const std::optional<std::string>& block, std::ostream& err) {
  if (block && !fb.find_rule_block(*block)) {
    fail(err, kFailure, "no rule block named '" + *block + "'; available: " + join(fb.rule_block_names()));
  }
}

std::string six(double v) { return fmt::format("{:.6g}", v); }

// ---------------------------------------------------------------------------

struct Options {
  std::string path;
  std::string out_path;
  std::vector<std::string> inputs;
  std::vector<std::string> fixed;
  std::optional<std::string> rule_block;
  bool json = false;
  std::string var;
  std::string range;
  std::string demo;
  std::optional<long long> steps;
  std::string classic_out;
  std::string scenario;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string ui;
};

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  load(o.path, err);
  out << "OK\n";
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const FunctionBlock fb = load(o.path, err);
  const EngineConfig config = engine_config_from_env();
  const InputMap inputs = parse_assignments(o.inputs, "--in", err);
  check_rule_block(fb, o.rule_block, err);
  check_inputs(fb, inputs, err);
  const EvaluationTrace trace = evaluate(fb, inputs, o.rule_block, config);
  if (o.json) {
    out << trace_to_json(trace);
  } else {
    for (const auto& v : trace.outputs) out << v.name << '=' << six(v.value) << '\n';
  }
  return kOk;
}

struct SweepRange {
  double min, max, step;
  std::size_t count;
};

SweepRange parse_range(const std::string& text, std::ostream& err) {
  std::vector<std::string_view> parts;
  std::string_view rest(text);
  for (;;) {
    const auto colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string_view::npos) break;
    rest.remove_prefix(colon + 1);
  }
  std::optional<double> lo, hi, step;
  if (parts.size() == 3) {
    lo = parse_double(parts[0]);
    hi = parse_double(parts[1]);
    step = parse_double(parts[2]);
  }
  if (!lo || !hi || !step) fail(err, kFailure, "--range expects min:max:step, got '" + text + "'");
  if (*step <= 0.0) fail(err, kFailure, "--range step must be positive");
  if (*hi < *lo) fail(err, kFailure, "--range max must not be below min");
  const double n = std::floor((*hi - *lo) / *step + 1e-9) + 1.0;
  if (n > 1e7) fail(err, kFailure, "--range yields more than 10^7 points");
  return SweepRange{*lo, *hi, *step, static_cast<std::size_t>(n)};
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const FunctionBlock fb = load(o.path, err);
  const EngineConfig config = engine_config_from_env();
  if (!fb.find_input(o.var)) {
    const char* what = fb.find_output(o.var) ? "is an output; sweep an input" : "is not a variable";
    fail(err, kFailure, "'" + o.var + "' " + what + "; inputs: " + join(input_names(fb)));
  }
  const SweepRange range = parse_range(o.range, err);
  InputMap inputs = parse_assignments(o.fixed, "--fixed", err);
  if (inputs.count(o.var)) fail(err, kFailure, "'" + o.var + "' is swept and cannot also be --fixed");
  check_rule_block(fb, o.rule_block, err);
  inputs[o.var] = range.min;
  check_inputs(fb, inputs, err);

  std::ostringstream csv;
  csv << o.var;
  for (const auto& v : fb.outputs) csv << ',' << v.name;
  csv << '\n';
  for (std::size_t i = 0; i < range.count; ++i) {
    const double x = range.min + static_cast<double>(i) * range.step;
    inputs[o.var] = x;
    const auto trace = evaluate(fb, inputs, o.rule_block, config);
    csv << sim::format_number(x);
    for (const auto& v : trace.outputs) csv << ',' << sim::format_number(v.value);
    csv << '\n';
  }
  if (o.out_path.empty()) out << csv.str();
  else write_file(o.out_path, csv.str(), err);
  return kOk;
}

int cmd_convert(const Options& o, std::ostream&, std::ostream& err) {
  const Format from = format_of(o.path, err);
  const Format to = format_of(o.out_path, err);
  if (from == to) fail(err, kFailure, "convert needs one .fcl and one .json path");
  const FunctionBlock fb = load(o.path, err);
  std::string text;
  if (to == Format::Json) {
    text = to_json(fb);
  } else {
    try {
      text = emit_fcl(fb);
    } catch (const UnrepresentableError& e) {
      fail(err, kFailure, e.what());
    }
  }
  write_file(o.out_path, text, err);
  return kOk;
}

std::filesystem::path scenario_path(const Options& o, const char* name) {
  if (!o.scenario.empty()) return o.scenario;
  return asset_dir() / "scenarios" / (std::string(name) + ".cfg");
}

void write_csv_file(const std::string& path, const auto& records, std::ostream& err) {
  if (path.empty()) return;
  std::ostringstream csv;
  sim::write_csv(csv, records);
  write_file(path, csv.str(), err);
}

std::string lap(const sim::PathMetrics& m) { return m.lap_time ? six(*m.lap_time) : "none"; }

int cmd_demo(const Options& o, std::ostream& out, std::ostream& err) {
  const EngineConfig config = engine_config_from_env();
  if (o.demo == "crane") {
    const auto scenario = sim::load_crane_scenario(scenario_path(o, "crane"));
    const FunctionBlock fb = load(scenario.controller, err);
    const long long steps = o.steps.value_or(scenario.steps);
    const auto records = sim::run_crane(scenario, fb, steps, config);
    write_csv_file(o.out_path, records, err);
    const auto m = sim::crane_metrics(records, scenario.settle_distance, scenario.settle_angle);
    out << "crane: steps=" << records.size() << " settled=" << (m.settling_time ? "yes" : "no")
        << " settling_time=" << (m.settling_time ? six(*m.settling_time) : "none")
        << " final_distance=" << six(m.final_distance) << " final_angle=" << six(m.final_angle)
        << " max_abs_angle=" << six(m.max_abs_angle) << '\n';
    return kOk;
  }
  if (o.demo == "car") {
    const auto scenario = sim::load_car_scenario(scenario_path(o, "car"));
    const FunctionBlock fb = load(scenario.controller, err);
    const long long steps = o.steps.value_or(scenario.steps);
    const auto fuzzy = sim::run_car(scenario, sim::CarController{&fb, scenario.rule_block}, steps, config);
    const auto classic = sim::run_car(scenario, sim::CarController{}, steps, config);
    write_csv_file(o.out_path, fuzzy, err);
    write_csv_file(o.classic_out, classic, err);
    const auto c = sim::compare_paths(fuzzy, classic);
    for (const auto& [label, m] : {std::pair{"fuzzy", c.a}, std::pair{"classic", c.b}}) {
      out << label << ": lap_time=" << lap(m) << " collisions=" << m.collisions
          << " steering_tv=" << six(m.steering_total_variation) << '\n';
    }
    const char* smoother = c.total_variation_difference < 0   ? "fuzzy"
                           : c.total_variation_difference > 0 ? "classic"
                                                              : "tie";
    out << "comparison: lap_time_difference="
        << (c.lap_time_difference ? six(*c.lap_time_difference) : "none")
        << " collision_difference=" << c.collision_difference
        << " steering_tv_difference=" << six(c.total_variation_difference) << " smoother=" << smoother
        << '\n';
    return kOk;
  }
  fail(err, kFailure, "unknown demo '" + o.demo + "'; available demos: crane, car");
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  FunctionBlock fb = load(o.path, err);
  const std::string name = fb.name;
  std::optional<std::filesystem::path> ui;
  if (!o.ui.empty()) {
    if (!std::filesystem::is_directory(o.ui)) fail(err, kFailure, "--ui: not a directory: " + o.ui);
    ui = o.ui;
  }
  service::Service svc(std::move(fb), engine_config_from_env(), ui);
  const int port = svc.bind(o.host, o.port);
  if (port < 0) fail(err, kFailure, fmt::format("cannot listen on {}:{} (address in use?)", o.host, o.port));

  // Route SIGINT/SIGTERM to a watcher thread that stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    svc.stop();
  });

  out << fmt::format("serving '{}' on http://{}:{}/ (session {})", name, o.host, port, svc.session_id())
      << std::endl;
  const bool ok = svc.listen();
  pthread_kill(watcher.native_handle(), SIGUSR1);
  watcher.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "stopped" << std::endl;
  return ok ? kOk : kFailure;
}

}  // namespace

EngineConfig engine_config_from_env() {
  EngineConfig config;
  if (const char* env = std::getenv("FUZZKIT_RESOLUTION"); env && *env) {
    std::string_view s(env);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 3 || value > 10'000'000) {
      throw std::invalid_argument("FUZZKIT_RESOLUTION must be an integer in [3, 10000000], got '" +
                                  std::string(s) + "'");
    }
    config.resolution = value;
  }
  return config;
}

std::filesystem::path asset_dir() {
  if (const char* env = std::getenv("FUZZKIT_ASSETS"); env && *env) return env;
  return FUZZKIT_DEFAULT_ASSET_DIR;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mamdani fuzzy inference: FCL/JSON systems, evaluation, simulations", "fuzzkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FUZZKIT_VERSION);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check an .fcl or .json system");
  validate->add_option("path", o.path, "System file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a system for one input vector");
  eval->add_option("path", o.path, "System file")->required();
  eval->add_option("--in", o.inputs, "Input value, name=value (repeatable)");
  eval->add_option("--ruleblock", o.rule_block, "Rule block to use instead of the default");
  eval->add_flag("--json", o.json, "Print the full evaluation trace as JSON");

  auto* sweep = app.add_subcommand("sweep", "Tabulate outputs while one input varies");
  sweep->add_option("path", o.path, "System file")->required();
  sweep->add_option("--var", o.var, "Input to sweep")->required();
  sweep->add_option("--range", o.range, "min:max:step")->required();
  sweep->add_option("--fixed", o.fixed, "Value of another input, name=value (repeatable)");
  sweep->add_option("--ruleblock", o.rule_block, "Rule block to use instead of the default");
  sweep->add_option("--out", o.out_path, "CSV file (default: stdout)");

  auto* convert = app.add_subcommand("convert", "Convert between .fcl and .json");
  convert->add_option("input", o.path, "Source file")->required();
  convert->add_option("output", o.out_path, "Destination file")->required();

  auto* demo = app.add_subcommand("demo", "Run a bundled simulation (crane or car)");
  demo->add_option("name", o.demo, "crane or car")->required();
  demo->add_option("--steps", o.steps, "Step count (car: upper bound)");
  demo->add_option("--out", o.out_path, "CSV trajectory (car: fuzzy run)");
  demo->add_option("--classic-out", o.classic_out, "CSV trajectory of the classic car");
  demo->add_option("--scenario", o.scenario, "Scenario config instead of the bundled one");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API and debugger UI");
  serve->add_option("path", o.path, "System file")->required();
  serve->add_option("--port", o.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--ui", o.ui, "Directory with the debugger bundle");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "fuzzkit: " << e.what() << "\nRun with --help for usage.\n";
    return kFailure;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (convert->parsed()) return cmd_convert(o, out, err);
    if (demo->parsed()) return cmd_demo(o, out, err);
    if (serve->parsed()) return cmd_serve(o, out, err);
  } catch (const Failure& f) {
    return f.code;
  } catch (const sim::ScenarioError& e) {
    err << "fuzzkit: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "fuzzkit: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace fuzzkit::cli
