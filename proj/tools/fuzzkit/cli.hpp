#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuzzkit/engine.hpp"

namespace fuzzkit::cli {

/// Exit codes shared by all subcommands.
enum Exit : int {
  kOk = 0,
  kFailure = 1,   // invalid system, bad arguments, evaluation error
  kIoError = 2,   // unreadable input or unwritable output
};

/// Runs `fuzzkit <args...>` in-process. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Engine settings, honouring FUZZKIT_RESOLUTION. Throws std::invalid_argument
/// on a malformed value.
EngineConfig engine_config_from_env();

/// Bundled assets: FUZZKIT_ASSETS when set, else the build-time location.
std::filesystem::path asset_dir();

}  // namespace fuzzkit::cli
