#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <string_view>
#include <vector>

#include "tkg/error.hpp"
#include "tkg/geometry.hpp"
#include "tkg/interval.hpp"
#include "tkg/tubelet.hpp"

namespace tkg {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class Predicate : std::uint8_t { Touches, Near };

inline constexpr Predicate kAllPredicates[] = {Predicate::Touches, Predicate::Near};

inline std::string_view to_string(Predicate p) {
  return p == Predicate::Touches ? "touches" : "near";
}

inline bool parse_predicate(std::string_view s, Predicate& out) {
  if (s == "touches") {
    out = Predicate::Touches;
    return true;
  }
  if (s == "near") {
    out = Predicate::Near;
    return true;
  }
  return false;
}

struct DetectionConfig {
  double tau_touch = 0.1;   // min per-frame IoU for touches
  double tau_near = 0.2;    // max center distance for near
  Frame gap_tolerance = 2;  // longest internal gap bridged inside one run
  Frame min_duration = 3;   // shortest run span kept, in frames

  friend bool operator==(const DetectionConfig&, const DetectionConfig&) = default;
};

inline void validate_config(const DetectionConfig& cfg) {
  auto bad = [](const std::string& what) {
    return Error(ErrorCode::ConfigError, what);
  };
  if (!(cfg.tau_touch > 0.0 && cfg.tau_touch < 1.0)) throw bad("tau_touch must lie in (0,1)");
  if (!(cfg.tau_near > 0.0 && cfg.tau_near < 1.0)) throw bad("tau_near must lie in (0,1)");
  if (cfg.gap_tolerance < 0) throw bad("gap_tolerance must be >= 0");
  if (cfg.min_duration < 1) throw bad("min_duration must be >= 1");
}

struct InteractionEdge {
  EdgeId edge_id = 0;
  NodeId subject = 0;
  NodeId object = 0;
  Predicate predicate = Predicate::Touches;
  TimeInterval interval;
  double mean_overlap = 0.0;  // mean IoU (touches) or mean 1 - distance (near)

  friend bool operator==(const InteractionEdge&, const InteractionEdge&) = default;
};

// True when `a` takes the subject role in an interaction with `b`: the
// instrument when categories differ, else the smaller track_id.
inline bool takes_subject_role(Category a_cat, std::string_view a_track,
                               Category b_cat, std::string_view b_track) {
  if (a_cat != b_cat) return a_cat == Category::Instrument;
  return a_track < b_track;
}

// Pairwise interaction detection. Returned edges carry `a_id`/`b_id` as
// endpoints (role rule applied) and local edge ids in (start, predicate)
// order.
inline std::vector<InteractionEdge> detect_interactions(const Tubelet& a, const Tubelet& b,
                                                        const DetectionConfig& cfg,
                                                        NodeId a_id = 0, NodeId b_id = 1) {
  if (a.video_id != b.video_id)
    throw Error(ErrorCode::VideoMismatch, a.video_id + " vs " + b.video_id);
  if (a.track_id == b.track_id)
    throw Error(ErrorCode::SameTubelet, a.video_id + "/" + a.track_id);

  struct Hit {
    Frame frame;
    double score;
  };
  std::vector<Hit> hits[2];  // indexed by Predicate

  // Merge-walk the two frame sequences over shared frames.
  auto ia = a.boxes.begin();
  auto ib = b.boxes.begin();
  while (ia != a.boxes.end() && ib != b.boxes.end()) {
    if (ia->frame < ib->frame) {
      ++ia;
    } else if (ib->frame < ia->frame) {
      ++ib;
    } else {
      const double overlap = iou(ia->box, ib->box);
      if (overlap >= cfg.tau_touch) {
        hits[0].push_back({ia->frame, overlap});
      } else {
        const double dist = center_distance(ia->box, ib->box);
        if (dist <= cfg.tau_near) hits[1].push_back({ia->frame, 1.0 - dist});
      }
      ++ia;
      ++ib;
    }
  }

  const bool a_subject = takes_subject_role(a.category, a.track_id, b.category, b.track_id);
  std::vector<InteractionEdge> edges;
  for (Predicate pred : kAllPredicates) {
    const auto& h = hits[static_cast<int>(pred)];
    std::size_t i = 0;
    while (i < h.size()) {
      std::size_t j = i;
      double sum = h[i].score;
      while (j + 1 < h.size() && h[j + 1].frame - h[j].frame - 1 <= cfg.gap_tolerance) {
        ++j;
        sum += h[j].score;
      }
      const TimeInterval run{h[i].frame, h[j].frame};
      if (run.length() >= cfg.min_duration) {
        InteractionEdge e;
        e.subject = a_subject ? a_id : b_id;
        e.object = a_subject ? b_id : a_id;
        e.predicate = pred;
        e.interval = run;
        e.mean_overlap = std::clamp(sum / static_cast<double>(j - i + 1), 0.0, 1.0);
        edges.push_back(e);
      }
      i = j + 1;
    }
  }
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.interval.start, x.predicate) < std::tie(y.interval.start, y.predicate);
  });
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k].edge_id = static_cast<EdgeId>(k);
  return edges;
}

}  // namespace tkg
