#pragma once

// Run configuration: an INI-style file of flat key/value tables, e.g.
//
//   scenario = "compare"
//   model = "full8"
//   epsilon = 0.05
//   [forcing]
//   kind = "cosine"
//   amplitude = 1.0
//
// Keys are addressed as "table.key" ("key" for the root table). Command-line
// overrides use the same addressing.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgavg/errors.hpp"

namespace sgavg {

inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = {
      "scenario", "output_dir", "model", "epsilon", "delta",
      "forcing.kind", "forcing.amplitude", "forcing.period", "forcing.a", "forcing.b", "forcing.harmonics",
      "grid.x_min", "grid.x_max", "grid.n", "grid.boundary", "grid.dx", "grid.half_width",
      "plan.dt", "plan.t_end", "plan.scheme", "plan.snapshot_stride", "plan.oversample",
      "initial.kind", "initial.c", "initial.delta_shift", "initial.center", "initial.amplitude",
      "initial.width", "initial.coeffs",
      "compare.pair", "compare.eps", "compare.prep",
      "residual.levels", "residual.t_sample",
      "sweep.scenario", "sweep.parameter", "sweep.values", "sweep.jobs",
      "audit.deltas"};
  return keys;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

inline std::string unquote(std::string s) {
  s = trim(std::move(s));
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace detail

class RunConfig {
 public:
  RunConfig() = default;

  static RunConfig from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (detail::trim(text).empty()) throw ConfigError("config", "config file is empty: " + path.string());
    return from_string(text);
  }

  static RunConfig from_string(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
      boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("config", std::string("malformed config: ") + e.message());
    }
    RunConfig cfg;
    for (const auto& [key, node] : tree) {
      if (node.empty()) {
        cfg.set(key, node.data());
      } else {
        for (const auto& [sub, leaf] : node) cfg.set(key + "." + sub, leaf.data());
      }
    }
    return cfg;
  }

  /// Sets "table.key" to a raw value (quotes stripped). Unknown keys are rejected.
  void set(const std::string& key, const std::string& raw) {
    if (!known_config_keys().contains(key)) throw ConfigError(key, "unknown config key " + key);
    values_[key] = detail::unquote(raw);
  }

  /// Applies "table.key=value".
  void apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override", "expected key=value, got " + assignment);
    set(detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
  }

  bool has(const std::string& key) const { return values_.contains(key); }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::optional<std::string> str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return parse_number(key, it->second);
  }

  double number(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

  std::optional<std::size_t> count(const std::string& key) const {
    auto v = number(key);
    if (!v) return std::nullopt;
    if (*v < 0.0 || std::floor(*v) != *v) throw ConfigError(key, key + " must be a nonnegative integer");
    return static_cast<std::size_t>(*v);
  }

  std::vector<double> numbers(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    std::string body = detail::trim(it->second);
    if (!body.empty() && body.front() == '[') body.erase(0, 1);
    if (!body.empty() && body.back() == ']') body.pop_back();
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) continue;
      out.push_back(parse_number(key, item));
    }
    return out;
  }

  /// Sorted "key=value" pairs joined by ';', used in the manifest.
  std::string describe() const {
    std::string out;
    for (const auto& [k, v] : values_) {
      if (k == "output_dir") continue;
      if (!out.empty()) out += ';';
      out += k + "=" + v;
    }
    return out;
  }

 private:
  static double parse_number(const std::string& key, const std::string& text) {
    const std::string t = detail::trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
      throw ConfigError(key, key + " is not a finite number: '" + t + "'");
    return v;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace sgavg
