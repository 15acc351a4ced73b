#pragma once

#include <filesystem>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fuzzkit/simulation/geometry.hpp"

namespace fuzzkit::sim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` file. '#' starts a comment; blank lines are ignored.
class Config {
 public:
  static Config parse(std::string_view text, std::string source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  std::string text(std::string_view key) const;
  double number(std::string_view key) const;
  double number_or(std::string_view key, double fallback) const;
  long long integer(std::string_view key) const;
  /// Whitespace-separated "x,y" pairs.
  std::vector<Vec2> points(std::string_view key) const;
  Vec2 point(std::string_view key) const;
  /// A path value resolved against the directory of the loaded file.
  std::filesystem::path path(std::string_view key) const;

  const std::string& source() const noexcept { return source_; }
  /// Throws ConfigError naming the first key not in `known`.
  void require_known(std::initializer_list<std::string_view> known) const;

 private:
  [[noreturn]] void fail(std::string_view key, const std::string& what) const;

  std::map<std::string, std::string, std::less<>> values_;
  std::string source_;
  std::filesystem::path dir_;
};

}  // namespace fuzzkit::sim
