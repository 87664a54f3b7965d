#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tkg/error.hpp"
#include "tkg/geometry.hpp"
#include "tkg/interval.hpp"

namespace tkg {

enum class Category { Instrument, Anatomy };

inline std::string_view to_string(Category c) {
  return c == Category::Instrument ? "instrument" : "anatomy";
}

inline bool parse_category(std::string_view s, Category& out) {
  if (s == "instrument") {
    out = Category::Instrument;
    return true;
  }
  if (s == "anatomy") {
    out = Category::Anatomy;
    return true;
  }
  return false;
}

struct FrameBox {
  Frame frame = 0;
  BoundingBox box;

  friend bool operator==(const FrameBox&, const FrameBox&) = default;
};

// One tracked entity: a box per observed frame. Frames may skip (missed
// detections); the lifespan still runs from the first to the last frame.
struct Tubelet {
  std::string video_id;
  std::string track_id;
  std::string class_label;
  Category category = Category::Instrument;
  std::vector<FrameBox> boxes;

  TimeInterval lifespan() const {
    return {boxes.front().frame, boxes.back().frame};
  }

  friend bool operator==(const Tubelet&, const Tubelet&) = default;
};

namespace detail {

inline void check_tubelet(const Tubelet& t, std::optional<std::size_t> line) {
  const std::string who = t.video_id + "/" + t.track_id;
  if (t.boxes.empty())
    throw Error(ErrorCode::MalformedRecord, who + ": boxes must be non-empty", line);
  Frame prev = -1;
  for (const auto& fb : t.boxes) {
    if (fb.frame < 0)
      throw Error(ErrorCode::MalformedRecord,
                  who + ": negative frame index " + std::to_string(fb.frame), line);
    if (fb.frame <= prev)
      throw Error(ErrorCode::NonIncreasingFrames,
                  who + ": frame " + std::to_string(fb.frame) + " follows " +
                      std::to_string(prev),
                  line);
    if (!fb.box.valid())
      throw Error(ErrorCode::CoordinateOutOfRange,
                  who + ": box at frame " + std::to_string(fb.frame) +
                      " violates 0 <= x1 < x2 <= 1, 0 <= y1 < y2 <= 1",
                  line);
    prev = fb.frame;
  }
}

}  // namespace detail

// Checks every Tubelet invariant across a batch, including (video, track)
// uniqueness. Throws the matching ingestion error.
inline void validate_tubelets(const std::vector<Tubelet>& tubelets) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& t : tubelets) {
    detail::check_tubelet(t, std::nullopt);
    if (!seen.emplace(t.video_id, t.track_id).second)
      throw Error(ErrorCode::DuplicateTrack, t.video_id + "/" + t.track_id);
  }
}

namespace detail {

inline Tubelet tubelet_from_json(const nlohmann::json& j, std::size_t line) {
  auto malformed = [line](const std::string& why) {
    return Error(ErrorCode::MalformedRecord, why, line);
  };
  if (!j.is_object()) throw malformed("record is not a JSON object");
  static constexpr std::string_view kKeys[] = {"video_id", "track_id", "class_label",
                                               "category", "boxes"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(std::begin(kKeys), std::end(kKeys), it.key()) == std::end(kKeys))
      throw malformed("unknown key \"" + it.key() + "\"");
  }
  for (auto key : kKeys) {
    if (!j.contains(std::string(key)))
      throw malformed("missing key \"" + std::string(key) + "\"");
  }
  Tubelet t;
  auto text = [&](const char* key) {
    const auto& v = j.at(key);
    if (!v.is_string()) throw malformed(std::string("\"") + key + "\" must be a string");
    return v.get<std::string>();
  };
  t.video_id = text("video_id");
  t.track_id = text("track_id");
  t.class_label = text("class_label");
  if (!parse_category(text("category"), t.category))
    throw malformed("\"category\" must be \"instrument\" or \"anatomy\"");
  const auto& boxes = j.at("boxes");
  if (!boxes.is_array()) throw malformed("\"boxes\" must be an array");
  t.boxes.reserve(boxes.size());
  for (const auto& b : boxes) {
    if (!b.is_array() || b.size() != 5)
      throw malformed("each box must be [frame, x1, y1, x2, y2]");
    if (!b[0].is_number_integer()) throw malformed("box frame must be an integer");
    for (int k = 1; k < 5; ++k)
      if (!b[k].is_number()) throw malformed("box coordinates must be numbers");
    t.boxes.push_back({b[0].get<Frame>(),
                       {b[1].get<double>(), b[2].get<double>(), b[3].get<double>(),
                        b[4].get<double>()}});
  }
  check_tubelet(t, line);
  return t;
}

}  // namespace detail

// Reads the tubelet JSON Lines format. Blank lines are skipped.
inline std::vector<Tubelet> parse_tubelets(std::istream& in) {
  std::vector<Tubelet> out;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.back() == '\r')
      throw Error(ErrorCode::MalformedRecord, "CR line ending", line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedRecord, e.what(), line_no);
    }
    Tubelet t = detail::tubelet_from_json(j, line_no);
    if (!seen.emplace(t.video_id, t.track_id).second)
      throw Error(ErrorCode::DuplicateTrack, t.video_id + "/" + t.track_id, line_no);
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<Tubelet> parse_tubelets(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_tubelets(in);
}

inline nlohmann::ordered_json to_json(const Tubelet& t) {
  nlohmann::ordered_json j;
  j["video_id"] = t.video_id;
  j["track_id"] = t.track_id;
  j["class_label"] = t.class_label;
  j["category"] = to_string(t.category);
  auto boxes = nlohmann::ordered_json::array();
  for (const auto& fb : t.boxes)
    boxes.push_back({fb.frame, fb.box.x1, fb.box.y1, fb.box.x2, fb.box.y2});
  j["boxes"] = std::move(boxes);
  return j;
}

inline void write_tubelets(std::ostream& out, const std::vector<Tubelet>& tubelets) {
  for (const auto& t : tubelets) out << to_json(t).dump() << '\n';
}

inline std::string write_tubelets(const std::vector<Tubelet>& tubelets) {
  std::ostringstream out;
  write_tubelets(out, tubelets);
  return out.str();
}

}  // namespace tkg
