#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tkg/detect.hpp"
#include "tkg/error.hpp"
#include "tkg/profile.hpp"
#include "tkg/scene.hpp"
#include "tkg/synth.hpp"

namespace tkg {

// Everything one pipeline run needs, read from a flat `key = value` file.
struct PipelineConfig {
  DetectionConfig detection;
  SynthesisPlan plan;
  SynthesisOptions synthesis;  // threads come from the command line
  std::size_t max_depth = 4;
  std::vector<double> eval_thresholds = default_thresholds();
  std::optional<std::uint64_t> master_seed;
  ScriptParams scene;
  GeometryConfig geometry;
  std::optional<std::string> tubelets_path;
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "tau_touch",        "tau_near",         "gap_tolerance",      "min_duration",
      "quota_depth_1",    "quota_depth_2",    "quota_depth_3",      "quota_depth_4",
      "master_seed",      "enforce_minimality", "max_attempts",     "max_depth",
      "eval_thresholds",  "n_instruments",    "n_anatomy",          "n_events",
      "frame_count",      "min_event_frames", "max_event_frames",   "min_pair_gap",
      "box_min_side",     "box_max_side",     "box_drift",          "video_id",
      "tubelets_path"};
  return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorCode::ConfigError, "key \"" + key + "\": cannot parse \"" + v + "\"");
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  double d;
  if (!(in >> d) || !in.eof())
    throw Error(ErrorCode::ConfigError, "key \"" + key + "\": cannot parse \"" + v + "\"");
  return d;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorCode::ConfigError, "key \"" + key + "\": expected true or false");
}

inline void check_unit(const std::string& key, double v) {
  if (!(v > 0.0 && v < 1.0))
    throw Error(ErrorCode::ConfigError, "key \"" + key + "\" must lie in (0,1)");
}

}  // namespace detail

// Raw key/value pairs; '#' starts a comment. Unknown keys are rejected.
inline std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  const auto& known = config_keys();
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, "expected key = value", line_no);
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorCode::ConfigError, "unknown key \"" + key + "\"", line_no);
    kv[std::move(key)] = std::move(value);
  }
  return kv;
}

inline PipelineConfig config_from_values(const std::map<std::string, std::string>& kv) {
  using namespace detail;
  PipelineConfig c;
  c.plan.quotas = {0, 20, 20, 20, 0};
  for (const auto& [k, v] : kv) {
    if (k == "tau_touch") c.detection.tau_touch = parse_double(k, v);
    else if (k == "tau_near") c.detection.tau_near = parse_double(k, v);
    else if (k == "gap_tolerance") c.detection.gap_tolerance = parse_number<Frame>(k, v);
    else if (k == "min_duration") c.detection.min_duration = parse_number<Frame>(k, v);
    else if (k.rfind("quota_depth_", 0) == 0)
      c.plan.quotas[static_cast<std::size_t>(k.back() - '0')] = parse_number<std::size_t>(k, v);
    else if (k == "master_seed") c.master_seed = parse_number<std::uint64_t>(k, v);
    else if (k == "enforce_minimality") c.synthesis.enforce_minimality = parse_bool(k, v);
    else if (k == "max_attempts") c.synthesis.max_attempts = parse_number<std::size_t>(k, v);
    else if (k == "max_depth") c.max_depth = parse_number<std::size_t>(k, v);
    else if (k == "eval_thresholds") {
      c.eval_thresholds.clear();
      std::istringstream in(v);
      std::string item;
      while (std::getline(in, item, ',')) c.eval_thresholds.push_back(parse_double(k, trim(item)));
    }
    else if (k == "n_instruments") c.scene.n_instruments = parse_number<std::size_t>(k, v);
    else if (k == "n_anatomy") c.scene.n_anatomy = parse_number<std::size_t>(k, v);
    else if (k == "n_events") c.scene.n_events = parse_number<std::size_t>(k, v);
    else if (k == "frame_count") c.scene.frame_count = parse_number<Frame>(k, v);
    else if (k == "min_event_frames") c.scene.min_event_frames = parse_number<Frame>(k, v);
    else if (k == "max_event_frames") c.scene.max_event_frames = parse_number<Frame>(k, v);
    else if (k == "min_pair_gap") c.scene.min_pair_gap = parse_number<Frame>(k, v);
    else if (k == "box_min_side") c.geometry.min_side = parse_double(k, v);
    else if (k == "box_max_side") c.geometry.max_side = parse_double(k, v);
    else if (k == "box_drift") c.geometry.drift = parse_double(k, v);
    else if (k == "video_id") c.scene.video_id = v;
    else if (k == "tubelets_path") c.tubelets_path = v;
  }
  check_unit("tau_touch", c.detection.tau_touch);
  check_unit("tau_near", c.detection.tau_near);
  for (double t : c.eval_thresholds) check_unit("eval_thresholds", t);
  if (c.eval_thresholds.empty()) throw Error(ErrorCode::ConfigError, "eval_thresholds is empty");
  validate_config(c.detection);
  c.geometry.tau_touch = c.detection.tau_touch;
  return c;
}

inline PipelineConfig parse_config(std::string_view text) {
  return config_from_values(parse_config_text(text));
}

// Canonical text of the effective configuration; hashed into run manifests.
inline std::string canonical_config(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace tkg
