#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tkg/error.hpp"
#include "tkg/interval.hpp"
#include "tkg/sample.hpp"

namespace tkg {

// Frame-count IoU of two inclusive intervals.
inline double temporal_iou(const TimeInterval& a, const TimeInterval& b) noexcept {
  const auto inter = intersect(a, b);
  if (!inter) return 0.0;
  const auto i = static_cast<double>(inter->length());
  const auto u = static_cast<double>(a.length() + b.length()) - i;
  return i / u;
}

struct SpanStats {
  double mean = 0, median = 0;
  Frame min = 0, max = 0;
  std::size_t n = 0;
};

struct DatasetStats {
  std::size_t size = 0;
  std::map<std::size_t, std::size_t> per_depth;
  std::map<std::string, std::size_t> per_template;
  // Keyed by the predicate of the final hop; "none" for depth-0 samples.
  std::map<std::string, std::size_t> per_predicate;
  std::map<std::string, std::size_t> per_answer_kind;
  SpanStats span_length;
  // Seed classes plus entity-class answers.
  std::set<std::string> classes_covered;
};

inline DatasetStats profile_dataset(const std::vector<QASample>& samples) {
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "no samples to profile");
  DatasetStats st;
  st.size = samples.size();
  std::vector<Frame> lengths;
  for (const auto& s : samples) {
    ++st.per_depth[s.designed_depth];
    ++st.per_template[s.template_id];
    ++st.per_predicate[s.program.hops.empty()
                           ? std::string("none")
                           : std::string(to_string(s.program.hops.back().predicate))];
    ++st.per_answer_kind[std::string(to_string(s.answer.kind))];
    if (s.evidence.span) lengths.push_back(s.evidence.span->length());
    if (s.program.seed.class_label) st.classes_covered.insert(*s.program.seed.class_label);
    if (const auto* c = std::get_if<std::string>(&s.answer.value)) st.classes_covered.insert(*c);
  }
  if (!lengths.empty()) {
    std::sort(lengths.begin(), lengths.end());
    const std::size_t n = lengths.size();
    double sum = 0;
    for (Frame l : lengths) sum += static_cast<double>(l);
    st.span_length.n = n;
    st.span_length.mean = sum / static_cast<double>(n);
    st.span_length.median = n % 2 ? static_cast<double>(lengths[n / 2])
                                  : 0.5 * static_cast<double>(lengths[n / 2 - 1] + lengths[n / 2]);
    st.span_length.min = lengths.front();
    st.span_length.max = lengths.back();
  }
  return st;
}

inline std::string stats_document(const DatasetStats& st) {
  nlohmann::ordered_json j;
  j["size"] = st.size;
  auto keyed = [](const auto& m) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m) {
      if constexpr (std::is_same_v<std::decay_t<decltype(k)>, std::string>)
        o[k] = v;
      else
        o[std::to_string(k)] = v;
    }
    return o;
  };
  j["per_depth"] = keyed(st.per_depth);
  j["per_template"] = keyed(st.per_template);
  j["per_predicate"] = keyed(st.per_predicate);
  j["per_answer_kind"] = keyed(st.per_answer_kind);
  nlohmann::ordered_json span;
  span["n"] = st.span_length.n;
  span["mean"] = st.span_length.mean;
  span["median"] = st.span_length.median;
  span["min"] = st.span_length.min;
  span["max"] = st.span_length.max;
  j["span_length"] = std::move(span);
  j["distinct_classes"] = st.classes_covered.size();
  j["classes"] = st.classes_covered;
  return j.dump(1) + "\n";
}

struct Prediction {
  std::uint64_t sample_id = 0;
  TimeInterval span;
};

inline std::vector<Prediction> parse_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto& span = j.at("span");
      if (!span.is_array() || span.size() != 2)
        throw Error(ErrorCode::MalformedDataset, "span must be [start, end]", line_no);
      Prediction p{j.at("sample_id").get<std::uint64_t>(),
                   {span[0].get<Frame>(), span[1].get<Frame>()}};
      if (!p.span.valid()) throw Error(ErrorCode::MalformedDataset, "invalid span", line_no);
      out.push_back(p);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedDataset, e.what(), line_no);
    }
  }
  return out;
}

inline std::vector<Prediction> parse_predictions(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_predictions(in);
}

inline std::string write_predictions(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    nlohmann::ordered_json j;
    j["sample_id"] = p.sample_id;
    j["span"] = {p.span.start, p.span.end};
    out += j.dump() + "\n";
  }
  return out;
}

inline const std::vector<double>& default_thresholds() {
  static const std::vector<double> t = {0.3, 0.5, 0.7};
  return t;
}

struct GroundingMetrics {
  std::vector<std::pair<double, double>> recall_at_1;  // (threshold, recall), ascending
  double mean_tiou = 0.0;
  std::size_t n_scored = 0;

  double recall(double threshold) const {
    for (const auto& [t, r] : recall_at_1)
      if (t == threshold) return r;
    throw Error(ErrorCode::ConfigError, "threshold not evaluated");
  }
};

// Recall@1 and mean tIoU of one predicted span per sample against the
// evidence spans. Samples without a span are not scored; scored samples
// without a prediction count as tIoU 0.
inline GroundingMetrics evaluate_predictions(const std::vector<QASample>& samples,
                                             const std::vector<Prediction>& predictions,
                                             std::vector<double> thresholds = default_thresholds()) {
  std::unordered_map<std::uint64_t, const QASample*> by_id;
  for (const auto& s : samples) by_id.emplace(s.sample_id, &s);
  std::unordered_map<std::uint64_t, TimeInterval> predicted;
  for (const auto& p : predictions) {
    if (!by_id.count(p.sample_id))
      throw Error(ErrorCode::UnknownSampleId, "sample " + std::to_string(p.sample_id));
    if (!predicted.emplace(p.sample_id, p.span).second)
      throw Error(ErrorCode::DuplicatePrediction, "sample " + std::to_string(p.sample_id));
  }
  std::sort(thresholds.begin(), thresholds.end());
  GroundingMetrics m;
  std::vector<std::size_t> hits(thresholds.size(), 0);
  double sum = 0.0;
  for (const auto& s : samples) {
    if (!s.evidence.span) continue;
    ++m.n_scored;
    const auto it = predicted.find(s.sample_id);
    const double v = it == predicted.end() ? 0.0 : temporal_iou(it->second, *s.evidence.span);
    sum += v;
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      if (v >= thresholds[k]) ++hits[k];
  }
  const double n = static_cast<double>(m.n_scored);
  m.mean_tiou = m.n_scored ? sum / n : 0.0;
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    m.recall_at_1.emplace_back(thresholds[k],
                               m.n_scored ? static_cast<double>(hits[k]) / n : 0.0);
  return m;
}

inline std::string metrics_document(const GroundingMetrics& m) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json recall = nlohmann::ordered_json::object();
  for (const auto& [t, r] : m.recall_at_1) {
    std::ostringstream key;
    key << t;
    recall[key.str()] = r;
  }
  j["recall_at_1"] = std::move(recall);
  j["mean_tIoU"] = m.mean_tiou;
  j["n_scored"] = m.n_scored;
  return j.dump(1) + "\n";
}

}  // namespace tkg
