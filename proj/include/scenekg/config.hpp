#pragma once
// Plain-text `key = value` configuration shared by the CLI commands.
//
//   # comments run to end of line
//   radius = 50
//   max_segment = 10
//   hops.vehicle_ahead = 3
//   vehicle_types = vehicle, truck
//   type_constant.pedestrian = 1.0
//   n_policy = fixed
//   n = 25
//   n_grid = 1, 10, 100, 1000
//   pattern_files = catalog/straight_road.ssq, catalog/on_roundabout.ssq

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scenekg/error.hpp"
#include "scenekg/metrics.hpp"
#include "scenekg/pattern_parser.hpp"
#include "scenekg/scene_builder.hpp"
#include "scenekg/subscene_catalog.hpp"
#include "scenekg/util.hpp"

namespace scenekg {

struct AppConfig {
  BuildConfig build;
  CatalogConfig catalog;
  ComplexityParams complexity;
  NPolicy n_policy = NPolicy::MeanOfComposites;
  std::uint64_t n = 0;  // used with NPolicy::Fixed
  std::vector<std::uint64_t> n_grid{1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  std::vector<std::string> pattern_files;  // as written in the file
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = v.find(',', start);
    const std::string_view item = trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline double config_number(std::string_view key, std::string_view v, std::size_t line) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' needs a number, got '" + std::string(v) + "'", {line, 0});
  return out;
}

inline std::uint64_t config_uint(std::string_view key, std::string_view v, std::size_t line) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw Error(Errc::InvalidConfig, "'" + std::string(key) + "' needs a non-negative integer, got '" + std::string(v) + "'",
                {line, 0});
  return out;
}

}  // namespace detail

/// Parses config text. Unknown keys and malformed values raise InvalidConfig
/// with the offending line.
inline AppConfig parse_config(std::string_view text) {
  using namespace detail;
  AppConfig cfg;
  bool types_reset = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::InvalidConfig, "expected 'key = value'", {line_no, 0});
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    auto hop = [&](int& dst) {
      const std::uint64_t h = config_uint(key, value, line_no);
      if (h < 1 || h > 16) throw Error(Errc::InvalidConfig, "'" + key + "' must lie in [1, 16]", {line_no, 0});
      dst = static_cast<int>(h);
    };
    if (key == "radius") {
      cfg.build.radius = config_number(key, value, line_no);
      if (!(cfg.build.radius > 0.0)) throw Error(Errc::InvalidConfig, "radius must be > 0", {line_no, 0});
    } else if (key == "max_segment") {
      cfg.build.max_segment = config_number(key, value, line_no);
      if (!(cfg.build.max_segment > 0.0) || cfg.build.max_segment > kMaxLaneLength)
        throw Error(Errc::InvalidConfig, "max_segment must lie in (0, 10]", {line_no, 0});
    } else if (key == "hops.approach_intersection") {
      hop(cfg.catalog.approach_intersection_hops);
    } else if (key == "hops.approach_crossing") {
      hop(cfg.catalog.approach_crossing_hops);
    } else if (key == "hops.vehicle_ahead") {
      hop(cfg.catalog.vehicle_ahead_hops);
    } else if (key == "hops.vehicle_behind") {
      hop(cfg.catalog.vehicle_behind_hops);
    } else if (key == "vehicle_types") {
      cfg.catalog.vehicle_types = split_list(value);
      if (cfg.catalog.vehicle_types.empty()) throw Error(Errc::InvalidConfig, "vehicle_types is empty", {line_no, 0});
    } else if (key == "obstacle_types") {
      const auto items = split_list(value);
      cfg.complexity.obstacle_types = {items.begin(), items.end()};
    } else if (key == "type_constant_default") {
      cfg.complexity.default_type_constant = config_number(key, value, line_no);
    } else if (key.starts_with("type_constant.") && key.size() > 14) {
      if (!types_reset) {
        // An explicit table replaces the shipped defaults entirely.
        cfg.complexity.type_constants.clear();
        types_reset = true;
      }
      cfg.complexity.type_constants[key.substr(14)] = config_number(key, value, line_no);
    } else if (key == "n_policy") {
      try {
        cfg.n_policy = parse_n_policy(value);
      } catch (const Error& e) {
        throw Error(Errc::InvalidConfig, e.what(), {line_no, 0});
      }
    } else if (key == "n") {
      cfg.n = config_uint(key, value, line_no);
      if (cfg.n == 0) throw Error(Errc::InvalidConfig, "n must be >= 1", {line_no, 0});
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (const auto& item : split_list(value)) {
        const std::uint64_t n = config_uint(key, item, line_no);
        if (n == 0) throw Error(Errc::InvalidConfig, "n_grid values must be >= 1", {line_no, 0});
        cfg.n_grid.push_back(n);
      }
      std::sort(cfg.n_grid.begin(), cfg.n_grid.end());
      cfg.n_grid.erase(std::unique(cfg.n_grid.begin(), cfg.n_grid.end()), cfg.n_grid.end());
      if (cfg.n_grid.empty()) throw Error(Errc::InvalidConfig, "n_grid is empty", {line_no, 0});
    } else if (key == "pattern_files") {
      cfg.pattern_files = split_list(value);
    } else {
      throw Error(Errc::InvalidConfig, "unknown key '" + key + "'", {line_no, 0});
    }
  }
  if (cfg.n_policy == NPolicy::Fixed && cfg.n == 0)
    throw Error(Errc::InvalidConfig, "n_policy = fixed needs n");
  return cfg;
}

/// Reads a config file and loads its pattern files (relative to the file).
inline AppConfig load_config(const std::filesystem::path& path) {
  AppConfig cfg = parse_config(read_file(path));
  for (const auto& f : cfg.pattern_files) {
    std::filesystem::path p(f);
    if (p.is_relative()) p = path.parent_path() / p;
    cfg.catalog.pattern_sources.push_back(read_file(p));
  }
  return cfg;
}

/// Canonical text of the effective configuration (pattern sources included
/// by content), used for hashing.
inline std::string canonical_text(const AppConfig& c) {
  std::string out;
  auto line = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto join = [](const auto& items) {
    std::string s;
    for (const auto& i : items) {
      if (!s.empty()) s += ", ";
      if constexpr (std::is_arithmetic_v<std::decay_t<decltype(i)>>) {
        s += std::to_string(i);
      } else {
        s += i;
      }
    }
    return s;
  };
  line("radius", pattern::format_number(c.build.radius));
  line("max_segment", pattern::format_number(c.build.max_segment));
  line("hops.approach_intersection", std::to_string(c.catalog.approach_intersection_hops));
  line("hops.approach_crossing", std::to_string(c.catalog.approach_crossing_hops));
  line("hops.vehicle_ahead", std::to_string(c.catalog.vehicle_ahead_hops));
  line("hops.vehicle_behind", std::to_string(c.catalog.vehicle_behind_hops));
  line("vehicle_types", join(c.catalog.vehicle_types));
  line("obstacle_types", join(c.complexity.obstacle_types));
  for (const auto& [t, x] : c.complexity.type_constants) line("type_constant." + t, pattern::format_number(x));
  line("type_constant_default", pattern::format_number(c.complexity.default_type_constant));
  line("n_policy", std::string(to_string(c.n_policy)));
  line("n", std::to_string(c.n));
  line("n_grid", join(c.n_grid));
  for (const auto& src : c.catalog.pattern_sources) out += src;
  return out;
}

inline std::string config_hash(const AppConfig& c) { return hex64(fnv1a64(canonical_text(c))); }

}  // namespace scenekg
