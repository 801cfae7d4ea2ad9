#pragma once

// Flat key=value configuration files with dotted keys, e.g.
//   tracker.pedestrian.n1_seconds=0.2
// Unknown keys are rejected, missing keys keep their defaults.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "motseg/config.hpp"
#include "motseg/error.hpp"

namespace motseg {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(ErrorCode::kTypeError, std::string(key) + ": expected a number, got '" +
                                    std::string(text) + "'");
  }
  return v;
}

inline int parse_int(std::string_view key, std::string_view text) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    fail(ErrorCode::kTypeError, std::string(key) + ": expected an integer, got '" +
                                    std::string(text) + "'");
  }
  return v;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  fail(ErrorCode::kTypeError,
       std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

struct ConfigKey {
  std::string name;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

template <class Field>
ConfigKey double_key(std::string name, Field field) {
  return {name,
          [name, field](PipelineConfig& c, std::string_view v) { field(c) = parse_double(name, v); },
          [field](const PipelineConfig& c) {
            return format_double(field(c));
          }};
}

template <class Field>
ConfigKey int_key(std::string name, Field field) {
  return {name,
          [name, field](PipelineConfig& c, std::string_view v) { field(c) = parse_int(name, v); },
          [field](const PipelineConfig& c) {
            return std::to_string(field(c));
          }};
}

template <class Field>
ConfigKey bool_key(std::string name, Field field) {
  return {name,
          [name, field](PipelineConfig& c, std::string_view v) { field(c) = parse_bool(name, v); },
          [field](const PipelineConfig& c) {
            return std::string(field(c) ? "true" : "false");
          }};
}

// Sorted by name; the echo writes keys in this order.
inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (ClassId cls : kAllClasses) {
      const std::string c(class_name(cls));
      k.push_back(double_key("filter." + c + ".aspect_max",
                             [cls](auto& p) -> auto& { return p.filter.aspect_range[cls].hi; }));
      k.push_back(double_key("filter." + c + ".aspect_min",
                             [cls](auto& p) -> auto& { return p.filter.aspect_range[cls].lo; }));
      k.push_back(double_key("reid." + c + ".n2_seconds",
                             [cls](auto& p) -> auto& { return p.reid.n2_seconds[cls]; }));
      k.push_back(double_key("tracker." + c + ".gate_cost",
                             [cls](auto& p) -> auto& { return p.tracker.gate_cost[cls]; }));
      k.push_back(double_key("tracker." + c + ".n1_seconds",
                             [cls](auto& p) -> auto& { return p.tracker.n1_seconds[cls]; }));
    }
    k.push_back(double_key("filter.min_box_area",
                           [](auto& p) -> auto& { return p.filter.min_box_area; }));
    k.push_back(double_key("filter.min_score",
                           [](auto& p) -> auto& { return p.filter.min_score; }));
    k.push_back(double_key("filter.min_track_avg_score",
                           [](auto& p) -> auto& { return p.filter.min_track_avg_score; }));
    k.push_back(int_key("filter.min_track_len",
                        [](auto& p) -> auto& { return p.filter.min_track_len; }));
    k.push_back(double_key("filter.traj_iou_threshold",
                           [](auto& p) -> auto& { return p.filter.traj_iou_threshold; }));
    k.push_back(double_key("reid.beta1", [](auto& p) -> auto& { return p.reid.beta1; }));
    k.push_back(double_key("reid.beta2", [](auto& p) -> auto& { return p.reid.beta2; }));
    k.push_back(double_key("reid.beta3", [](auto& p) -> auto& { return p.reid.beta3; }));
    k.push_back({"reid.camera_mode",
                 [](PipelineConfig& p, std::string_view v) {
                   if (v == "auto") {
                     p.reid.camera_mode.reset();
                   } else if (v == "static") {
                     p.reid.camera_mode = CameraMode::kStatic;
                   } else if (v == "moving") {
                     p.reid.camera_mode = CameraMode::kMoving;
                   } else {
                     fail(ErrorCode::kTypeError, "reid.camera_mode: expected auto, static or moving, got '" +
                                                     std::string(v) + "'");
                   }
                 },
                 [](const PipelineConfig& p) {
                   return p.reid.camera_mode ? std::string(camera_mode_name(*p.reid.camera_mode))
                                             : std::string("auto");
                 }});
    k.push_back(bool_key("reid.enabled", [](auto& p) -> auto& { return p.reid.enabled; }));
    k.push_back(int_key("reid.n3_frames", [](auto& p) -> auto& { return p.reid.n3_frames; }));
    k.push_back(int_key("tracker.bank_size", [](auto& p) -> auto& { return p.tracker.bank_size; }));
    k.push_back(bool_key("tracker.enable_str",
                         [](auto& p) -> auto& { return p.tracker.enable_str; }));
    k.push_back(double_key("tracker.fps", [](auto& p) -> auto& { return p.tracker.fps; }));
    k.push_back(double_key("tracker.huber_delta",
                           [](auto& p) -> auto& { return p.tracker.huber_delta; }));
    k.push_back(int_key("tracker.huber_window",
                        [](auto& p) -> auto& { return p.tracker.huber_window; }));
    k.push_back(double_key("tracker.str_distance_factor",
                           [](auto& p) -> auto& { return p.tracker.str_distance_factor; }));
    std::sort(k.begin(), k.end(),
              [](const ConfigKey& a, const ConfigKey& b) { return a.name < b.name; });
    return k;
  }();
  return keys;
}

}  // namespace detail

/// Applies one `key=value` assignment; used by the file parser and by
/// command-line overrides.
inline void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : detail::config_keys()) {
    if (k.name == key) {
      k.set(cfg, detail::trim(value));
      return;
    }
  }
  fail(ErrorCode::kUnknownKey, std::string(key));
}

inline PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set_config_value(cfg, detail::trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (line " + std::to_string(line_no) + ")");
    }
  }
  validate(cfg);
  return cfg;
}

inline PipelineConfig parse_config(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_config(in);
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoError, "cannot open config " + path);
  return parse_config(in);
}

/// Every key with its effective value, one per line, sorted by key.
/// parse_config(config_to_string(c)) == c.
inline std::string config_to_string(const PipelineConfig& cfg) {
  std::string out = "# effective configuration\n";
  for (const auto& k : detail::config_keys()) out += k.name + "=" + k.get(cfg) + "\n";
  return out;
}

}  // namespace motseg
