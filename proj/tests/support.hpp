#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "tkg/tkg.hpp"

namespace testing_support {

using namespace tkg;

// Straight from the definition: intersection area over union area.
inline double oracle_iou(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  const double inter = iw * ih;
  const double uni = (a.x2 - a.x1) * (a.y2 - a.y1) + (b.x2 - b.x1) * (b.y2 - b.y1) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

inline double oracle_distance(const BoundingBox& a, const BoundingBox& b) {
  const double dx = (a.x1 + a.x2) / 2 - (b.x1 + b.x2) / 2;
  const double dy = (a.y1 + a.y2) / 2 - (b.y1 + b.y2) / 2;
  return std::sqrt(dx * dx + dy * dy);
}

struct OracleEdge {
  std::string subject, object;
  Predicate predicate;
  Frame start, end;
  auto operator<=>(const OracleEdge&) const = default;
};

// Naive detector: label every frame in the joint range, then walk the labels
// once per predicate, closing a run when more than g unlabeled frames pass.
inline std::set<OracleEdge> oracle_detect(const Tubelet& a, const Tubelet& b,
                                          const DetectionConfig& cfg) {
  std::map<Frame, BoundingBox> fa, fb;
  for (const auto& fbx : a.boxes) fa[fbx.frame] = fbx.box;
  for (const auto& fbx : b.boxes) fb[fbx.frame] = fbx.box;
  const Frame lo = std::min(fa.begin()->first, fb.begin()->first);
  const Frame hi = std::max(fa.rbegin()->first, fb.rbegin()->first);
  std::map<Frame, int> label;  // 0 none, 1 touches, 2 near
  for (Frame f = lo; f <= hi; ++f) {
    label[f] = 0;
    if (!fa.count(f) || !fb.count(f)) continue;
    if (oracle_iou(fa[f], fb[f]) >= cfg.tau_touch)
      label[f] = 1;
    else if (oracle_distance(fa[f], fb[f]) <= cfg.tau_near)
      label[f] = 2;
  }
  bool a_subj;
  if (a.category != b.category)
    a_subj = a.category == Category::Instrument;
  else
    a_subj = a.track_id < b.track_id;
  const std::string& subj = a_subj ? a.track_id : b.track_id;
  const std::string& obj = a_subj ? b.track_id : a.track_id;

  std::set<OracleEdge> out;
  for (int want : {1, 2}) {
    Frame first = -1, last = -1;
    Frame idle = 0;
    auto close = [&] {
      if (first >= 0 && last - first + 1 >= cfg.min_duration)
        out.insert({subj, obj, want == 1 ? Predicate::Touches : Predicate::Near, first, last});
      first = last = -1;
    };
    for (Frame f = lo; f <= hi; ++f) {
      if (label[f] == want) {
        if (first < 0) first = f;
        last = f;
        idle = 0;
      } else if (first >= 0 && ++idle > cfg.gap_tolerance) {
        close();
        idle = 0;
      }
    }
    close();
  }
  return out;
}

// Random box with sides in [0.05, 0.4] inside the unit square, near `c`.
inline BoundingBox random_box(std::mt19937_64& rng, double cx, double cy) {
  std::uniform_real_distribution<double> side(0.05, 0.4), jitter(-0.08, 0.08);
  const double w = side(rng), h = side(rng);
  double x = std::clamp(cx + jitter(rng), w / 2, 1 - w / 2);
  double y = std::clamp(cy + jitter(rng), h / 2, 1 - h / 2);
  return {x - w / 2, y - h / 2, x + w / 2, y + h / 2};
}

// Two tubelets with random lifespans, random frame drops and boxes that
// wander between touching, near and apart.
inline std::pair<Tubelet, Tubelet> random_pair(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> start(0, 20), len(1, 60), coin(0, 9);
  std::uniform_real_distribution<double> pos(0.2, 0.8);
  auto make = [&](const std::string& track, Category cat) {
    Tubelet t{"vid", track, track + "_cls", cat, {}};
    const int s = start(rng), n = len(rng);
    for (int f = s; f < s + n; ++f)
      if (f == s || f == s + n - 1 || coin(rng) > 1) t.boxes.push_back({f, {}});
    return t;
  };
  std::uniform_int_distribution<int> cat(0, 1);
  Tubelet a = make("ta", cat(rng) ? Category::Instrument : Category::Anatomy);
  Tubelet b = make("tb", cat(rng) ? Category::Instrument : Category::Anatomy);
  double ax = pos(rng), ay = pos(rng);
  for (auto& fb : a.boxes) {
    if (coin(rng) == 0) {
      ax = pos(rng);
      ay = pos(rng);
    }
    fb.box = random_box(rng, ax, ay);
  }
  for (auto& fb : b.boxes) {
    // Mostly follow a's anchor so overlaps and near misses are common.
    const double bx = coin(rng) < 7 ? ax : pos(rng);
    const double by = coin(rng) < 7 ? ay : pos(rng);
    fb.box = random_box(rng, bx, by);
  }
  return {a, b};
}

inline std::set<OracleEdge> as_oracle_edges(const std::vector<InteractionEdge>& edges,
                                            const std::vector<std::string>& tracks) {
  std::set<OracleEdge> out;
  for (const auto& e : edges)
    out.insert({tracks[e.subject], tracks[e.object], e.predicate, e.interval.start,
                e.interval.end});
  return out;
}

// Chain scene: grasper a touches gallbladder b on [10,20], hook c touches b
// on [30,40]. Boxes sit still at their cell centres so nothing else fires.
inline SceneScript toy_script() {
  SceneScript s;
  s.video_id = "toy";
  s.frame_count = 60;
  s.cast = {{"a", "grasper", Category::Instrument},
            {"b", "gallbladder", Category::Anatomy},
            {"c", "hook", Category::Instrument}};
  s.events = {{"a", "b", {10, 20}}, {"c", "b", {30, 40}}};
  return s;
}

inline GeometryConfig still_geometry() {
  GeometryConfig g;
  g.drift = 0.0;
  return g;
}

inline KnowledgeGraph toy_graph() {
  return build_graph(generate_scene(toy_script(), still_geometry(), 1), DetectionConfig{});
}

inline KnowledgeGraph random_scene_graph(std::uint64_t seed, std::size_t n_inst = 3,
                                         std::size_t n_anat = 3, std::size_t n_events = 8,
                                         Frame frames = 500) {
  ScriptParams p;
  p.n_instruments = n_inst;
  p.n_anatomy = n_anat;
  p.n_events = n_events;
  p.frame_count = frames;
  const auto script = generate_random_script(p, seed);
  return build_graph(generate_scene(script, GeometryConfig{}, seed), DetectionConfig{});
}

inline std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("tkg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
