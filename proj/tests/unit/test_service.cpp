#include <csignal>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "fuzzkit/json_io.hpp"
#include "fuzzkit/service.hpp"
#include "fuzzkit/simulation/scenario.hpp"
#include "httplib.h"
#include "json.hpp"
#include "paths.hpp"

extern char** environ;

using namespace fuzzkit;
using Json = nlohmann::json;

namespace {

std::string asset(const char* rel) { return (testing_paths::assets() / rel).string(); }

/// A service on an ephemeral port, listening on a background thread.
class Live {
 public:
  explicit Live(const char* system, std::optional<std::filesystem::path> ui = {})
      : fb_(sim::load_system(asset(system))), svc_(fb_, {}, std::move(ui)) {
    port_ = svc_.bind("127.0.0.1", 0);
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { svc_.listen(); });
    svc_.wait_until_ready();
  }
  ~Live() {
    svc_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(10);
    return c;
  }
  const FunctionBlock& system() const { return fb_; }
  const service::Service& service() const { return svc_; }

 private:
  FunctionBlock fb_;
  service::Service svc_;
  int port_ = 0;
  std::thread thread_;
};

httplib::Result post(httplib::Client& c, const char* path, const Json& body) {
  return c.Post(path, body.dump(), "application/json");
}

void check_error(const httplib::Result& r, int status, const std::string& code, const std::string& path) {
  REQUIRE(r);
  CHECK(r->status == status);
  CHECK(r->get_header_value("Content-Type").rfind("application/json", 0) == 0);
  const auto j = Json::parse(r->body);
  CHECK(j["code"] == code);
  CHECK(j["path"] == path);
  CHECK(j["message"].is_string());
  CHECK_FALSE(j["message"].get<std::string>().empty());
}

}  // namespace

TEST_CASE("GET /api/system returns the canonical document") {
  Live live("fcl/valid/crane.fcl");
  auto c = live.client();
  const auto r = c.Get("/api/system");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Content-Type").rfind("application/json", 0) == 0);
  CHECK(r->body == to_json(live.system()));
  CHECK(r->get_header_value("X-Fuzzkit-Session") == live.service().session_id());
  CHECK_FALSE(live.service().session_id().empty());
}

TEST_CASE("POST /api/evaluate matches the engine") {
  Live live("fcl/valid/crane.fcl");
  auto c = live.client();
  const auto r = post(c, "/api/evaluate", {{"inputs", {{"distance", 12.5}, {"angle", -2.0}}}});
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->body == trace_to_json(evaluate(live.system(), {{"distance", 12.5}, {"angle", -2.0}})));

  SUBCASE("stateless: the same request gives the same bytes") {
    const auto again = post(c, "/api/evaluate", {{"inputs", {{"distance", 12.5}, {"angle", -2.0}}}});
    REQUIRE(again);
    CHECK(again->body == r->body);
  }
  SUBCASE("missing input") {
    const auto e = post(c, "/api/evaluate", {{"inputs", {{"distance", 1.0}}}});
    check_error(e, 400, "MissingInput", "/inputs/angle");
    CHECK(Json::parse(e->body)["required"] == Json::array({"distance", "angle"}));
  }
  SUBCASE("unknown input") {
    check_error(post(c, "/api/evaluate", {{"inputs", {{"distance", 1.0}, {"angle", 0.0}, {"speed", 3.0}}}}), 400,
                "UnknownInput", "/inputs/speed");
  }
  SUBCASE("non-numeric input") {
    check_error(post(c, "/api/evaluate", {{"inputs", {{"distance", "far"}, {"angle", 0.0}}}}), 400, "WrongType",
                "/inputs/distance");
  }
  SUBCASE("missing inputs object") {
    check_error(post(c, "/api/evaluate", Json::object()), 400, "MissingField", "/inputs");
  }
  SUBCASE("unknown field") {
    check_error(post(c, "/api/evaluate", {{"inputs", Json::object()}, {"verbose", true}}), 400, "UnknownField",
                "/verbose");
  }
  SUBCASE("malformed body") {
    check_error(c.Post("/api/evaluate", "{inputs:", "application/json"), 400, "MalformedJson", "");
    check_error(c.Post("/api/evaluate", "[1,2]", "application/json"), 400, "WrongType", "");
  }
  SUBCASE("unknown rule block") {
    const auto e = post(c, "/api/evaluate", {{"inputs", {{"distance", 1.0}, {"angle", 0.0}}}, {"ruleblock", "nope"}});
    check_error(e, 400, "UnknownRuleBlock", "/ruleblock");
    CHECK(Json::parse(e->body)["available"].size() == live.system().rule_blocks.size());
  }
}

TEST_CASE("POST /api/ruleblock switches the active block") {
  Live live("fcl/valid/guard_two_blocks.fcl");
  auto c = live.client();
  const InputMap in{{"health", 30.0}, {"enemy_distance", 4.0}};
  const Json body{{"inputs", {{"health", 30.0}, {"enemy_distance", 4.0}}}};

  const auto before = post(c, "/api/evaluate", body);
  REQUIRE(before);
  CHECK(Json::parse(before->body)["rule_block"] == live.system().default_rule_block);

  std::string other;
  for (const auto& b : live.system().rule_blocks) {
    if (b.name != live.system().default_rule_block) other = b.name;
  }
  REQUIRE_FALSE(other.empty());
  const auto sw = post(c, "/api/ruleblock", {{"name", other}});
  REQUIRE(sw);
  CHECK(sw->status == 200);
  const auto reply = Json::parse(sw->body);
  CHECK(reply["active_rule_block"] == other);
  CHECK(reply["session"] == live.service().session_id());

  const auto after = post(c, "/api/evaluate", body);
  REQUIRE(after);
  CHECK(after->body == trace_to_json(evaluate(live.system(), in, other)));

  // An explicit block in the request overrides the active one.
  const auto explicit_default = post(c, "/api/evaluate", {{"inputs", body["inputs"]},
                                                          {"ruleblock", live.system().default_rule_block}});
  REQUIRE(explicit_default);
  CHECK(explicit_default->body == before->body);

  const auto bad = post(c, "/api/ruleblock", {{"name", "reckless"}});
  check_error(bad, 400, "UnknownRuleBlock", "/name");
  CHECK(Json::parse(bad->body)["available"].size() == 2);
  check_error(post(c, "/api/ruleblock", Json::object()), 400, "MissingField", "/name");
  check_error(post(c, "/api/ruleblock", {{"name", 3}}), 400, "WrongType", "/name");
}

TEST_CASE("GET /api/curve samples one term") {
  Live live("systems/smooth_tipper.json");
  auto c = live.client();
  const auto& var = live.system().inputs.front();
  const auto& term = var.terms.front();
  const auto r = c.Get("/api/curve?variable=" + var.name + "&term=" + term.name + "&samples=11");
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto j = Json::parse(r->body);
  CHECK(j["variable"] == var.name);
  CHECK(j["term"] == term.name);
  CHECK(j["kind"] == std::string(term.mf.kind()));
  REQUIRE(j["xs"].size() == 11);
  REQUIRE(j["mus"].size() == 11);
  CHECK(j["xs"][0].get<double>() == var.range.min);
  CHECK(j["xs"][10].get<double>() == var.range.max);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(j["mus"][i].get<double>() == membership(term.mf, j["xs"][i].get<double>()));
  }

  const auto dflt = c.Get("/api/curve?variable=" + var.name + "&term=" + term.name);
  REQUIRE(dflt);
  CHECK(Json::parse(dflt->body)["xs"].size() == 201);

  const std::string base = "/api/curve?variable=" + var.name + "&term=" + term.name;
  check_error(c.Get(base + "&samples=1"), 400, "InvalidValue", "?samples");
  check_error(c.Get(base + "&samples=100002"), 400, "InvalidValue", "?samples");
  check_error(c.Get(base + "&samples=ten"), 400, "InvalidValue", "?samples");
  CHECK(c.Get(base + "&samples=2")->status == 200);
  check_error(c.Get("/api/curve?variable=nope&term=x"), 404, "UnknownVariable", "?variable");
  check_error(c.Get("/api/curve?variable=" + var.name + "&term=nope"), 404, "UnknownTerm", "?term");
  check_error(c.Get("/api/curve?term=x"), 400, "MissingField", "?variable");
}

TEST_CASE("GET /api/surface reports the last evaluation") {
  Live live("fcl/valid/crane.fcl");
  auto c = live.client();
  check_error(c.Get("/api/surface?output=power"), 404, "NoTrace", "?output");
  check_error(c.Get("/api/surface?output=distance"), 404, "UnknownVariable", "?output");
  check_error(c.Get("/api/surface"), 400, "MissingField", "?output");

  REQUIRE(post(c, "/api/evaluate", {{"inputs", {{"distance", 20.0}, {"angle", 3.0}}}}));
  const auto r = c.Get("/api/surface?output=power");
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto j = Json::parse(r->body);
  const auto trace = evaluate(live.system(), {{"distance", 20.0}, {"angle", 3.0}});
  CHECK(j["variable"] == "power");
  CHECK(j["rule_block"] == trace.rule_block_used);
  CHECK(j["crisp"].get<double>() == trace.output("power"));
  CHECK(j["xs"].size() == trace.surface("power")->xs.size());
  CHECK(j["spikes"].size() == trace.surface("power")->spikes.size());
  CHECK_FALSE(j["spikes"].empty());
}

TEST_CASE("static root and unknown routes") {
  SUBCASE("placeholder page without a UI bundle") {
    Live live("fcl/valid/crane.fcl");
    auto c = live.client();
    const auto r = c.Get("/");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Content-Type").rfind("text/html", 0) == 0);
    CHECK(r->body.find("/api/system") != std::string::npos);
    check_error(c.Get("/api/nothing"), 404, "NotFound", "");
    check_error(c.Get("/missing.js"), 404, "NotFound", "");
  }
  SUBCASE("files from a UI directory") {
    const auto dir = testing_paths::scratch_dir("ui");
    std::ofstream(dir / "index.html") << "<html>debugger</html>";
    std::ofstream(dir / "app.js") << "console.log(1);";
    Live live("fcl/valid/crane.fcl", dir);
    auto c = live.client();
    const auto index = c.Get("/");
    REQUIRE(index);
    CHECK(index->status == 200);
    CHECK(index->body == "<html>debugger</html>");
    const auto js = c.Get("/app.js");
    REQUIRE(js);
    CHECK(js->body == "console.log(1);");
    CHECK(c.Get("/api/system")->status == 200);
  }
}

TEST_CASE("concurrent evaluations agree with the engine") {
  Live live("fcl/valid/car.fcl");
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      auto c = live.client();
      for (int i = 0; i < 10; ++i) {
        const double v = 1.0 + t + 0.5 * i;
        Json inputs;
        InputMap map;
        for (const auto& in : live.system().inputs) {
          inputs[in.name] = v;
          map[in.name] = v;
        }
        const auto r = post(c, "/api/evaluate", {{"inputs", inputs}});
        if (!r || r->body != trace_to_json(evaluate(live.system(), map))) ++mismatches;
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK(mismatches == 0);
}

TEST_CASE("fuzzkit serve stops cleanly on SIGINT") {
  int pipe_fds[2];
  REQUIRE(pipe(pipe_fds) == 0);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, pipe_fds[0]);
  const std::string binary = FUZZKIT_BINARY;
  const std::string system = asset("fcl/valid/crane.fcl");
  std::vector<char*> argv{const_cast<char*>(binary.c_str()), const_cast<char*>("serve"),
                          const_cast<char*>(system.c_str()), const_cast<char*>("--port"), const_cast<char*>("0"),
                          nullptr};
  pid_t pid = 0;
  REQUIRE(posix_spawn(&pid, binary.c_str(), &actions, nullptr, argv.data(), environ) == 0);
  posix_spawn_file_actions_destroy(&actions);
  close(pipe_fds[1]);

  std::string banner;
  char ch = 0;
  while (read(pipe_fds[0], &ch, 1) == 1 && ch != '\n') banner += ch;
  const auto colon = banner.rfind(':');
  REQUIRE(colon != std::string::npos);
  const int port = std::stoi(banner.substr(colon + 1));
  CHECK(port > 0);

  httplib::Client c("127.0.0.1", port);
  const auto r = c.Get("/api/system");
  REQUIRE(r);
  CHECK(r->status == 200);

  kill(pid, SIGINT);
  std::string rest;
  while (read(pipe_fds[0], &ch, 1) == 1) rest += ch;
  close(pipe_fds[0]);
  int status = 0;
  REQUIRE(waitpid(pid, &status, 0) == pid);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(rest == "stopped\n");
}
