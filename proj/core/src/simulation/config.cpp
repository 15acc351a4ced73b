#include "fuzzkit/simulation/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace fuzzkit::sim {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, std::string source) {
  Config cfg;
  cfg.source_ = std::move(source);
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": empty key");
    if (!cfg.values_.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ConfigError(cfg.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Config cfg = parse(ss.str(), path.string());
  cfg.dir_ = path.parent_path();
  return cfg;
}

void Config::fail(std::string_view key, const std::string& what) const {
  throw ConfigError(source_ + ": '" + std::string(key) + "': " + what);
}

bool Config::has(std::string_view key) const { return values_.find(key) != values_.end(); }

std::string Config::text(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) fail(key, "missing");
  return it->second;
}

double Config::number(std::string_view key) const {
  auto v = to_double(text(key));
  if (!v) fail(key, "expected a finite number");
  return *v;
}

double Config::number_or(std::string_view key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long Config::integer(std::string_view key) const {
  const std::string s = text(key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(key, "expected an integer");
  return v;
}

std::vector<Vec2> Config::points(std::string_view key) const {
  std::vector<Vec2> out;
  std::istringstream ss(text(key));
  std::string pair;
  while (ss >> pair) {
    const auto comma = pair.find(',');
    auto x = comma == std::string::npos ? std::nullopt : to_double(std::string_view(pair).substr(0, comma));
    auto y = comma == std::string::npos ? std::nullopt : to_double(std::string_view(pair).substr(comma + 1));
    if (!x || !y) fail(key, "expected 'x,y' pairs, got '" + pair + "'");
    out.push_back(Vec2{*x, *y});
  }
  return out;
}

Vec2 Config::point(std::string_view key) const {
  auto pts = points(key);
  if (pts.size() != 1) fail(key, "expected one 'x,y' pair");
  return pts.front();
}

std::filesystem::path Config::path(std::string_view key) const {
  std::filesystem::path p(text(key));
  return p.is_absolute() ? p : dir_ / p;
}

void Config::require_known(std::initializer_list<std::string_view> known) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(source_ + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace fuzzkit::sim
