#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tkg/error.hpp"
#include "tkg/program.hpp"

namespace tkg {

struct Evidence {
  std::vector<NodeId> node_ids;
  std::vector<EdgeId> edge_ids;
  std::optional<TimeInterval> span;  // hull of edge intervals; absent at depth 0
  std::vector<EdgeId> support_edge_ids;  // counted edges, count answers only

  friend bool operator==(const Evidence&, const Evidence&) = default;
};

struct QASample {
  std::uint64_t sample_id = 0;
  std::string video_id;
  std::string question;
  Answer answer;
  QueryProgram program;
  Evidence evidence;
  std::size_t designed_depth = 0;
  std::optional<std::size_t> verified_depth;
  std::string template_id;
  std::uint64_t generation_seed = 0;

  friend bool operator==(const QASample&, const QASample&) = default;
};

inline nlohmann::ordered_json to_json(const QASample& s) {
  nlohmann::ordered_json j;
  j["sample_id"] = s.sample_id;
  j["video_id"] = s.video_id;
  j["question"] = s.question;
  j["answer"] = to_json(s.answer);
  j["program"] = to_json(s.program);
  nlohmann::ordered_json ev;
  ev["node_ids"] = s.evidence.node_ids;
  ev["edge_ids"] = s.evidence.edge_ids;
  ev["span"] = s.evidence.span
                   ? nlohmann::ordered_json{s.evidence.span->start, s.evidence.span->end}
                   : nlohmann::ordered_json(nullptr);
  if (s.answer.kind == AnswerMode::Count) ev["support_edge_ids"] = s.evidence.support_edge_ids;
  j["evidence"] = std::move(ev);
  j["designed_depth"] = s.designed_depth;
  j["verified_depth"] = s.verified_depth ? nlohmann::ordered_json(*s.verified_depth)
                                         : nlohmann::ordered_json(nullptr);
  j["template_id"] = s.template_id;
  j["generation_seed"] = s.generation_seed;
  return j;
}

inline QASample sample_from_json(const nlohmann::json& j) {
  QASample s;
  try {
    s.sample_id = j.at("sample_id").get<std::uint64_t>();
    s.video_id = j.at("video_id").get<std::string>();
    s.question = j.at("question").get<std::string>();
    s.answer = answer_from_json(j.at("answer"));
    s.program = program_from_json(j.at("program"));
    const auto& ev = j.at("evidence");
    s.evidence.node_ids = ev.at("node_ids").get<std::vector<NodeId>>();
    s.evidence.edge_ids = ev.at("edge_ids").get<std::vector<EdgeId>>();
    const auto& span = ev.at("span");
    if (!span.is_null()) {
      if (!span.is_array() || span.size() != 2)
        throw Error(ErrorCode::MalformedDataset, "evidence span must be [start, end] or null");
      s.evidence.span = TimeInterval{span[0].get<Frame>(), span[1].get<Frame>()};
    }
    if (ev.contains("support_edge_ids"))
      s.evidence.support_edge_ids = ev.at("support_edge_ids").get<std::vector<EdgeId>>();
    s.designed_depth = j.at("designed_depth").get<std::size_t>();
    if (!j.at("verified_depth").is_null())
      s.verified_depth = j.at("verified_depth").get<std::size_t>();
    s.template_id = j.at("template_id").get<std::string>();
    s.generation_seed = j.at("generation_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDataset, e.what());
  }
  return s;
}

inline void write_dataset(std::ostream& out, const std::vector<QASample>& samples) {
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
}

inline std::string write_dataset(const std::vector<QASample>& samples) {
  std::ostringstream out;
  write_dataset(out, samples);
  return out.str();
}

inline std::vector<QASample> parse_dataset(std::istream& in) {
  std::vector<QASample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(sample_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::MalformedDataset, e.what(), line_no);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), line_no);
    }
  }
  return out;
}

inline std::vector<QASample> parse_dataset(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in);
}

}  // namespace tkg
