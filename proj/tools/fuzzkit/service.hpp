#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "fuzzkit/engine.hpp"
#include "fuzzkit/model.hpp"

namespace fuzzkit::service {

/// HTTP front end for one loaded system.
///
///   GET  /api/system                     canonical JSON document
///   POST /api/evaluate  {inputs, ruleblock?}  evaluation trace
///   POST /api/ruleblock {name}           switch the active rule block
///   GET  /api/curve?variable=&term=&samples=
///   GET  /api/surface?output=            surface of the last evaluation
///   GET  /                               debugger UI (static files)
///
/// Errors are JSON objects {code, path, message}.
class Service {
 public:
  Service(FunctionBlock fb, EngineConfig config, std::optional<std::filesystem::path> ui_dir = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds host:port (port 0 picks a free one). Returns the bound port or
  /// -1 when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Requires a successful bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

  const std::string& session_id() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace fuzzkit::service
