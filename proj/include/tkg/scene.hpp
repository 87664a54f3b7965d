#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "tkg/detect.hpp"
#include "tkg/error.hpp"
#include "tkg/geometry.hpp"
#include "tkg/interval.hpp"
#include "tkg/random.hpp"
#include "tkg/tubelet.hpp"

namespace tkg {

struct CastMember {
  std::string track_id;
  std::string class_label;
  Category category = Category::Instrument;

  friend bool operator==(const CastMember&, const CastMember&) = default;
};

struct ScriptedEvent {
  std::string subject;
  std::string object;
  TimeInterval interval;

  friend bool operator==(const ScriptedEvent&, const ScriptedEvent&) = default;
};

// A scene with known ground truth: who is on screen and which pairs touch
// when.
struct SceneScript {
  std::string video_id;
  Frame frame_count = 0;
  std::vector<CastMember> cast;
  std::vector<ScriptedEvent> events;

  friend bool operator==(const SceneScript&, const SceneScript&) = default;
};

struct GeometryConfig {
  double min_side = 0.05;  // box side range, fraction of the frame
  double max_side = 0.12;
  double tau_touch = 0.1;  // must match the detector's tau_touch
  double drift = 1.0;      // share of a cell's free space a box wanders over
};

inline void validate_script(const SceneScript& s) {
  auto bad = [](const std::string& what) { return Error(ErrorCode::InvalidScript, what); };
  if (s.frame_count < 1) throw bad("frame_count must be positive");
  std::set<std::string> ids;
  for (const auto& c : s.cast)
    if (!ids.insert(c.track_id).second) throw bad("duplicate cast member " + c.track_id);
  for (const auto& e : s.events) {
    if (!ids.count(e.subject) || !ids.count(e.object))
      throw bad("event track not in cast: " + e.subject + "/" + e.object);
    if (e.subject == e.object) throw bad("event pairs " + e.subject + " with itself");
    if (!e.interval.valid() || e.interval.end > s.frame_count - 1)
      throw bad("event interval outside [0, frame_count-1]");
  }
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    for (std::size_t j = i + 1; j < s.events.size(); ++j) {
      const auto& a = s.events[i];
      const auto& b = s.events[j];
      const bool same_pair = (a.subject == b.subject && a.object == b.object) ||
                             (a.subject == b.object && a.object == b.subject);
      if (same_pair && intersect(a.interval, b.interval))
        throw bad("overlapping events for pair " + a.subject + "/" + a.object);
    }
  }
}

namespace detail {

struct Cell {
  double x0, y0, x1, y1;
};

inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

inline BoundingBox rounded(const BoundingBox& b) {
  return {round4(b.x1), round4(b.y1), round4(b.x2), round4(b.y2)};
}

inline BoundingBox clip_to(const BoundingBox& b, const Cell& c) {
  return {std::max(b.x1, c.x0), std::max(b.y1, c.y0), std::min(b.x2, c.x1),
          std::min(b.y2, c.y1)};
}

}  // namespace detail

// Renders a script into tubelets. Every cast member lives in its own grid
// cell and drifts on a piecewise-linear path inside it; during an event the
// subject joins the object inside the object's cell. Boxes of different cells
// never intersect, so IoU is zero on every non-event frame.
inline std::vector<Tubelet> generate_scene(const SceneScript& script, const GeometryConfig& geom,
                                           std::uint64_t seed) {
  validate_script(script);
  auto infeasible = [](const std::string& why) {
    return Error(ErrorCode::InfeasibleScript, why);
  };
  if (!(geom.min_side > 0.0 && geom.min_side <= geom.max_side))
    throw infeasible("box side range must satisfy 0 < min_side <= max_side");
  if (!(geom.tau_touch > 0.0 && geom.tau_touch <= 1.0))
    throw infeasible("tau_touch must lie in (0,1]");
  if (!(geom.drift >= 0.0 && geom.drift <= 1.0)) throw infeasible("drift must lie in [0,1]");

  const std::size_t k = script.cast.size();
  const Frame frames = script.frame_count;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < k; ++i) index[script.cast[i].track_id] = i;

  // Each entity takes part in at most one event per frame.
  std::vector<std::vector<int>> busy(k, std::vector<int>(static_cast<std::size_t>(frames), -1));
  for (std::size_t ev = 0; ev < script.events.size(); ++ev) {
    const auto& e = script.events[ev];
    for (std::size_t who : {index[e.subject], index[e.object]}) {
      for (Frame f = e.interval.start; f <= e.interval.end; ++f) {
        auto& slot = busy[who][static_cast<std::size_t>(f)];
        if (slot >= 0)
          throw infeasible(script.cast[who].track_id + " is in two simultaneous events at frame " +
                           std::to_string(f));
        slot = static_cast<int>(ev);
      }
    }
  }

  const std::size_t cols = k == 0 ? 1 : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k))));
  const std::size_t rows = k == 0 ? 1 : (k + cols - 1) / cols;
  const double cw = 1.0 / static_cast<double>(cols);
  const double ch = 1.0 / static_cast<double>(rows);
  if (geom.max_side > std::min(cw, ch))
    throw infeasible("max_side " + std::to_string(geom.max_side) + " does not fit a " +
                     std::to_string(cols) + "x" + std::to_string(rows) + " layout");

  Rng rng(seed);
  std::vector<detail::Cell> cells(k);
  std::vector<std::vector<BoundingBox>> home(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double x0 = cw * static_cast<double>(i % cols);
    const double y0 = ch * static_cast<double>(i / cols);
    cells[i] = {x0, y0, x0 + cw, y0 + ch};
    const double w = rng.uniform_real(geom.min_side, geom.max_side);
    const double h = rng.uniform_real(geom.min_side, geom.max_side);
    const double rx = geom.drift * (cw - w) / 2;
    const double ry = geom.drift * (ch - h) / 2;
    auto waypoint = [&] {
      return std::pair{x0 + cw / 2 + rng.uniform_real(-rx, rx),
                       y0 + ch / 2 + rng.uniform_real(-ry, ry)};
    };
    home[i].resize(static_cast<std::size_t>(frames));
    Frame f0 = 0;
    auto p0 = waypoint();
    while (f0 < frames) {
      const Frame f1 = f0 + rng.uniform_int(15, 45);
      const auto p1 = waypoint();
      for (Frame f = f0; f < std::min(f1, frames); ++f) {
        const double t = static_cast<double>(f - f0) / static_cast<double>(f1 - f0);
        const double cx = p0.first + t * (p1.first - p0.first);
        const double cy = p0.second + t * (p1.second - p0.second);
        home[i][static_cast<std::size_t>(f)] = {std::max(x0, cx - w / 2), std::max(y0, cy - h / 2),
                                                std::min(x0 + cw, cx + w / 2),
                                                std::min(y0 + ch, cy + h / 2)};
      }
      f0 = f1;
      p0 = p1;
    }
  }

  std::vector<Tubelet> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    out[i].video_id = script.video_id;
    out[i].track_id = script.cast[i].track_id;
    out[i].class_label = script.cast[i].class_label;
    out[i].category = script.cast[i].category;
    out[i].boxes.reserve(static_cast<std::size_t>(frames));
    for (Frame f = 0; f < frames; ++f)
      out[i].boxes.push_back({f, detail::rounded(home[i][static_cast<std::size_t>(f)])});
  }

  for (const auto& e : script.events) {
    const std::size_t s = index[e.subject];
    const std::size_t o = index[e.object];
    for (Frame f = e.interval.start; f <= e.interval.end; ++f) {
      const auto fi = static_cast<std::size_t>(f);
      const BoundingBox& ob = out[o].boxes[fi].box;
      const BoundingBox& own = home[s][fi];
      const double hw = own.width() / 2;
      const double hh = own.height() / 2;
      BoundingBox joined = detail::rounded(detail::clip_to(
          {ob.cx() - hw, ob.cy() - hh, ob.cx() + hw, ob.cy() + hh}, cells[o]));
      if (!joined.valid() || iou(joined, ob) < geom.tau_touch) joined = ob;
      out[s].boxes[fi].box = joined;
    }
  }

  // Verify the separation guarantee on the rendered (rounded) boxes.
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const ScriptedEvent*>> by_pair;
  for (const auto& e : script.events) {
    auto a = index[e.subject], b = index[e.object];
    by_pair[{std::min(a, b), std::max(a, b)}].push_back(&e);
  }
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const auto it = by_pair.find({a, b});
      for (Frame f = 0; f < frames; ++f) {
        bool in_event = false;
        if (it != by_pair.end())
          for (const auto* e : it->second)
            in_event = in_event || (e->interval.start <= f && f <= e->interval.end);
        const auto fi = static_cast<std::size_t>(f);
        const double v = iou(out[a].boxes[fi].box, out[b].boxes[fi].box);
        if (in_event ? v < geom.tau_touch : v > geom.tau_touch / 2)
          throw infeasible("separation guarantee fails for " + out[a].track_id + "/" +
                           out[b].track_id + " at frame " + std::to_string(f));
      }
    }
  }
  return out;
}

// Knobs for random scripts. The event length range and same-pair spacing
// keep every scripted event above the default detector's min_duration and
// beyond its gap tolerance.
struct ScriptParams {
  std::size_t n_instruments = 3;
  std::size_t n_anatomy = 3;
  std::size_t n_events = 8;
  Frame frame_count = 500;
  Frame min_event_frames = 5;
  Frame max_event_frames = 40;
  Frame min_pair_gap = 5;  // idle frames required between events of one pair
  std::string video_id;    // empty: "scene_<seed>"
};

inline const std::vector<std::string>& instrument_vocabulary() {
  static const std::vector<std::string> v = {"grasper", "hook", "clipper", "scissors"};
  return v;
}

inline const std::vector<std::string>& anatomy_vocabulary() {
  static const std::vector<std::string> v = {"gallbladder", "cystic_duct", "cystic_artery",
                                             "liver"};
  return v;
}

inline SceneScript generate_random_script(const ScriptParams& p, std::uint64_t seed) {
  auto infeasible = [](const std::string& why) {
    return Error(ErrorCode::InfeasibleParams, why);
  };
  const std::size_t k = p.n_instruments + p.n_anatomy;
  if (p.frame_count < 1) throw infeasible("frame_count must be positive");
  if (k == 0) throw infeasible("cast must not be empty");
  if (p.n_events > 0 && k < 2) throw infeasible("events need at least two cast members");
  if (p.min_event_frames < 1 || p.min_event_frames > p.max_event_frames)
    throw infeasible("event length range is empty");
  if (p.n_events > 0 && p.min_event_frames > p.frame_count)
    throw infeasible("events do not fit into frame_count");

  Rng rng(seed);
  SceneScript s;
  s.video_id = p.video_id.empty() ? "scene_" + std::to_string(seed) : p.video_id;
  s.frame_count = p.frame_count;
  for (std::size_t i = 0; i < k; ++i) {
    const bool inst = i < p.n_instruments;
    char id[32];
    std::snprintf(id, sizeof id, "t%03zu", i);
    s.cast.push_back({id, rng.pick(inst ? instrument_vocabulary() : anatomy_vocabulary()),
                      inst ? Category::Instrument : Category::Anatomy});
  }

  const Frame max_len = std::min(p.max_event_frames, p.frame_count);
  constexpr int kTriesPerEvent = 2000;
  for (std::size_t n = 0; n < p.n_events; ++n) {
    bool placed = false;
    for (int attempt = 0; attempt < kTriesPerEvent && !placed; ++attempt) {
      std::size_t a, b;
      if (p.n_instruments > 0) {
        a = rng.index(p.n_instruments);
        b = rng.index(k - 1);
        if (b >= a) ++b;
      } else {
        a = rng.index(k);
        b = rng.index(k - 1);
        if (b >= a) ++b;
      }
      if (!takes_subject_role(s.cast[a].category, s.cast[a].track_id, s.cast[b].category,
                              s.cast[b].track_id))
        std::swap(a, b);
      const Frame len = rng.uniform_int(p.min_event_frames, max_len);
      const Frame start = rng.uniform_int(0, p.frame_count - len);
      const TimeInterval iv{start, start + len - 1};
      const std::string& sa = s.cast[a].track_id;
      const std::string& sb = s.cast[b].track_id;
      bool ok = true;
      for (const auto& e : s.events) {
        const bool share = e.subject == sa || e.subject == sb || e.object == sa || e.object == sb;
        const bool same_pair = (e.subject == sa && e.object == sb);
        if (share && intersect(e.interval, iv)) ok = false;
        if (same_pair && intersect({e.interval.start - p.min_pair_gap,
                                    e.interval.end + p.min_pair_gap},
                                   iv))
          ok = false;
        if (!ok) break;
      }
      if (ok) {
        s.events.push_back({sa, sb, iv});
        placed = true;
      }
    }
    if (!placed)
      throw infeasible("could not place event " + std::to_string(n + 1) + " of " +
                       std::to_string(p.n_events) + " in " + std::to_string(p.frame_count) +
                       " frames");
  }
  std::sort(s.events.begin(), s.events.end(), [](const auto& x, const auto& y) {
    return std::tie(x.interval.start, x.subject, x.object) <
           std::tie(y.interval.start, y.subject, y.object);
  });
  return s;
}

// ---- script file ---------------------------------------------------------

inline std::string serialize_script(const SceneScript& s) {
  nlohmann::ordered_json j;
  j["video_id"] = s.video_id;
  j["frame_count"] = s.frame_count;
  auto cast = nlohmann::ordered_json::array();
  for (const auto& c : s.cast) cast.push_back({c.track_id, c.class_label, to_string(c.category)});
  auto events = nlohmann::ordered_json::array();
  for (const auto& e : s.events)
    events.push_back({e.subject, e.object, e.interval.start, e.interval.end});
  j["cast"] = std::move(cast);
  j["events"] = std::move(events);
  return j.dump(1) + "\n";
}

inline SceneScript deserialize_script(std::string_view text) {
  auto bad = [](const std::string& what) { return Error(ErrorCode::InvalidScript, what); };
  SceneScript s;
  try {
    const auto j = nlohmann::json::parse(text);
    s.video_id = j.at("video_id").get<std::string>();
    s.frame_count = j.at("frame_count").get<Frame>();
    for (const auto& c : j.at("cast")) {
      CastMember m{c.at(0).get<std::string>(), c.at(1).get<std::string>(), {}};
      if (!parse_category(c.at(2).get<std::string>(), m.category)) throw bad("unknown category");
      s.cast.push_back(std::move(m));
    }
    for (const auto& e : j.at("events"))
      s.events.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>(),
                          {e.at(2).get<Frame>(), e.at(3).get<Frame>()}});
  } catch (const nlohmann::json::exception& e) {
    throw bad(e.what());
  }
  validate_script(s);
  return s;
}

}  // namespace tkg
