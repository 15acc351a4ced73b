#include "fuzzkit/service.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <mutex>
#include <random>
#include <shared_mutex>

#include "fuzzkit/fuzzy_math.hpp"
#include "fuzzkit/json_io.hpp"
#include "httplib.h"
#include "json.hpp"

namespace fuzzkit::service {
namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kJson = "application/json";

constexpr const char* kPlaceholderPage = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>fuzzkit</title></head>
<body>
<h1>fuzzkit</h1>
<p>No debugger bundle was given (<code>fuzzkit serve --ui DIR</code>). The JSON API is live:</p>
<ul>
<li><a href="/api/system">GET /api/system</a></li>
<li>POST /api/evaluate</li>
<li>POST /api/ruleblock</li>
<li>GET /api/curve?variable=V&amp;term=T&amp;samples=N</li>
<li>GET /api/surface?output=V</li>
</ul>
</body>
</html>
)";

std::string new_session_id() {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  const unsigned long long bits = (static_cast<unsigned long long>(rd()) << 32) ^ rd();
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%016llx-%u", bits, counter.fetch_add(1) + 1);
  return std::string(buf, static_cast<std::size_t>(n));
}

struct HttpError {
  int status;
  std::string code;
  std::string path;
  std::string message;
  Json extra = Json::object();
};

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, kJson);
}

void send_error(httplib::Response& res, const HttpError& e) {
  Json j;
  j["code"] = e.code;
  j["path"] = e.path;
  j["message"] = e.message;
  for (const auto& [k, v] : e.extra.items()) j[k] = v;
  send_json(res, e.status, j.dump() + "\n");
}

Json parse_body(const httplib::Request& req) {
  try {
    Json body = Json::parse(req.body);
    if (!body.is_object()) throw HttpError{400, "WrongType", "", "request body must be a JSON object"};
    return body;
  } catch (const Json::parse_error& e) {
    throw HttpError{400, "MalformedJson", "", e.what()};
  }
}

void only_fields(const Json& body, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : body.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw HttpError{400, "UnknownField", "/" + key, "unknown field '" + key + "'"};
    }
  }
}

Json names(const std::vector<std::string>& list) {
  Json a = Json::array();
  for (const auto& s : list) a.push_back(s);
  return a;
}

}  // namespace

struct Service::Impl {
  Impl(FunctionBlock fb, EngineConfig cfg, std::optional<std::filesystem::path> ui)
      : system(std::move(fb)),
        config(cfg),
        ui_dir(std::move(ui)),
        active(system.default_rule_block),
        session(new_session_id()),
        system_json(to_json(system)) {}

  const FunctionBlock system;
  const EngineConfig config;
  const std::optional<std::filesystem::path> ui_dir;

  // Rule-block switches take the lock exclusively, so a switch waits for
  // in-flight evaluations and applies to every request accepted after it.
  mutable std::shared_mutex block_mutex;
  std::string active;

  mutable std::mutex trace_mutex;
  std::optional<EvaluationTrace> last_trace;

  const std::string session;
  const std::string system_json;
  httplib::Server server;

  std::vector<std::string> input_names() const {
    std::vector<std::string> out;
    for (const auto& v : system.inputs) out.push_back(v.name);
    return out;
  }

  void routes() {
    // The library default is SO_REUSEPORT, which would let two servers share a
    // port silently. Plain SO_REUSEADDR still allows quick restarts.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server.set_default_headers({{"X-Fuzzkit-Session", session}});

    server.Get("/api/system", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, system_json);
    });
    server.Post("/api/evaluate", wrap([this](const httplib::Request& req, httplib::Response& res) {
      evaluate_route(req, res);
    }));
    server.Post("/api/ruleblock", wrap([this](const httplib::Request& req, httplib::Response& res) {
      ruleblock_route(req, res);
    }));
    server.Get("/api/curve", wrap([this](const httplib::Request& req, httplib::Response& res) {
      curve_route(req, res);
    }));
    server.Get("/api/surface", wrap([this](const httplib::Request& req, httplib::Response& res) {
      surface_route(req, res);
    }));

    bool mounted = false;
    if (ui_dir) mounted = server.set_mount_point("/", ui_dir->string());
    if (!mounted) {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(kPlaceholderPage, "text/html; charset=utf-8");
      });
    }

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      const bool not_found = res.status == 404;
      send_error(res, HttpError{res.status, not_found ? "NotFound" : "HttpError", "",
                                (not_found ? "no route for " : "request failed: ") + req.method +
                                    " " + req.path});
    });
  }

  template <typename F>
  httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        send_error(res, e);
      } catch (const std::exception& e) {
        send_error(res, HttpError{500, "Internal", "", e.what()});
      }
    };
  }

  void evaluate_route(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    only_fields(body, {"inputs", "ruleblock"});
    if (!body.contains("inputs")) {
      throw HttpError{400, "MissingField", "/inputs", "missing field 'inputs'",
                      Json{{"required", names(input_names())}}};
    }
    const Json& in = body["inputs"];
    if (!in.is_object()) throw HttpError{400, "WrongType", "/inputs", "'inputs' must be an object"};
    InputMap inputs;
    for (const auto& [name, value] : in.items()) {
      if (!value.is_number()) {
        throw HttpError{400, "WrongType", "/inputs/" + name, "input '" + name + "' must be a number"};
      }
      inputs[name] = value.get<double>();
    }
    std::optional<std::string> requested;
    if (body.contains("ruleblock")) {
      if (!body["ruleblock"].is_string()) {
        throw HttpError{400, "WrongType", "/ruleblock", "'ruleblock' must be a string"};
      }
      requested = body["ruleblock"].get<std::string>();
    }

    EvaluationTrace trace;
    {
      std::shared_lock lock(block_mutex);
      try {
        trace = fuzzkit::evaluate(system, inputs, requested ? *requested : active, config);
      } catch (const EngineError& e) {
        HttpError err{400, std::string(to_string(e.code())), "", e.what()};
        switch (e.code()) {
          case EngineError::Code::MissingInput:
          case EngineError::Code::UnknownInput:
          case EngineError::Code::NonFiniteInput:
            err.path = "/inputs/" + e.subject();
            err.extra["required"] = names(input_names());
            break;
          case EngineError::Code::UnknownRuleBlock:
            err.path = "/ruleblock";
            err.extra["available"] = names(system.rule_block_names());
            break;
          default:
            err.status = 500;
            break;
        }
        throw err;
      }
    }
    std::string out = trace_to_json(trace);
    {
      std::lock_guard lock(trace_mutex);
      last_trace = std::move(trace);
    }
    send_json(res, 200, out);
  }

  void ruleblock_route(const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    only_fields(body, {"name"});
    if (!body.contains("name")) throw HttpError{400, "MissingField", "/name", "missing field 'name'"};
    if (!body["name"].is_string()) throw HttpError{400, "WrongType", "/name", "'name' must be a string"};
    const std::string name = body["name"].get<std::string>();
    if (!system.find_rule_block(name)) {
      throw HttpError{400, "UnknownRuleBlock", "/name", "no rule block named '" + name + "'",
                      Json{{"available", names(system.rule_block_names())}}};
    }
    {
      std::unique_lock lock(block_mutex);
      active = name;
    }
    send_json(res, 200, Json{{"active_rule_block", name}, {"session", session}}.dump() + "\n");
  }

  static std::string query(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) {
      throw HttpError{400, "MissingField", std::string("?") + key,
                      std::string("missing query parameter '") + key + "'"};
    }
    return req.get_param_value(key);
  }

  void curve_route(const httplib::Request& req, httplib::Response& res) {
    const std::string variable = query(req, "variable");
    const std::string term = query(req, "term");
    std::size_t samples = 201;
    if (req.has_param("samples")) {
      const std::string s = req.get_param_value("samples");
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), samples);
      if (ec != std::errc() || ptr != s.data() + s.size() || samples < 2 || samples > 100001) {
        throw HttpError{400, "InvalidValue", "?samples", "samples must be an integer in [2, 100001]"};
      }
    }
    const LinguisticVariable* lv = system.find_input(variable);
    if (!lv) lv = system.find_output(variable);
    if (!lv) throw HttpError{404, "UnknownVariable", "?variable", "no variable named '" + variable + "'"};
    const Term* t = lv->find_term(term);
    if (!t) {
      throw HttpError{404, "UnknownTerm", "?term",
                      "variable '" + variable + "' has no term named '" + term + "'"};
    }
    const auto xs = sample_grid(lv->range, samples);
    std::vector<double> mus;
    mus.reserve(xs.size());
    for (double x : xs) mus.push_back(membership(t->mf, x));
    Json j{{"variable", variable}, {"term", term}, {"kind", std::string(t->mf.kind())}, {"xs", xs}, {"mus", mus}};
    send_json(res, 200, j.dump() + "\n");
  }

  void surface_route(const httplib::Request& req, httplib::Response& res) {
    const std::string output = query(req, "output");
    if (!system.find_output(output)) {
      throw HttpError{404, "UnknownVariable", "?output", "no output variable named '" + output + "'"};
    }
    std::lock_guard lock(trace_mutex);
    if (!last_trace) throw HttpError{404, "NoTrace", "?output", "nothing has been evaluated yet"};
    const OutputSurface* s = last_trace->surface(output);
    Json spikes = Json::array();
    for (const auto& sp : s->spikes) spikes.push_back(Json{{"x", sp.x}, {"mu", sp.mu}});
    Json j{{"variable", output},
           {"rule_block", last_trace->rule_block_used},
           {"crisp", last_trace->output(output)},
           {"xs", s->xs},
           {"mus", s->mus},
           {"spikes", std::move(spikes)}};
    send_json(res, 200, j.dump() + "\n");
  }
};

Service::Service(FunctionBlock fb, EngineConfig config, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(std::move(fb), config, std::move(ui_dir))) {
  impl_->routes();
}

Service::~Service() = default;

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::listen() { return impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

const std::string& Service::session_id() const noexcept { return impl_->session; }

}  // namespace fuzzkit::service
