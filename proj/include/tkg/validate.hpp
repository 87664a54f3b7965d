#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tkg/error.hpp"
#include "tkg/graph.hpp"
#include "tkg/program.hpp"
#include "tkg/sample.hpp"

namespace tkg {

// The depth-d suffix shortcut of `program`: seed on the unique node carrying
// the class of evidence node designed-d, then replay the last d hops with the
// first of them released from its temporal constraint.
inline QueryProgram shortcut_program(const QueryProgram& program, std::string class_label,
                                     std::size_t d) {
  const std::size_t depth = program.designed_depth();
  QueryProgram p;
  p.seed.class_label = std::move(class_label);
  p.seed.ordinal = SeedOrdinal::Unique;
  p.answer_mode = program.answer_mode;
  p.hops.assign(program.hops.begin() + static_cast<std::ptrdiff_t>(depth - d),
                program.hops.end());
  if (!p.hops.empty()) p.hops.front().temporal = TemporalConstraint::Any;
  return p;
}

// Smallest number of hops that still derives the sample's terminal node and
// answer. Never exceeds the designed depth.
template <GraphLike G>
std::size_t verify_depth(const G& g, const QASample& sample) {
  const auto outcome = evaluate_program(g, sample.program);
  if (!outcome || outcome->answer != sample.answer ||
      outcome->evidence_nodes != sample.evidence.node_ids ||
      outcome->evidence_edges != sample.evidence.edge_ids)
    throw Error(ErrorCode::StaleSample,
                "sample " + std::to_string(sample.sample_id) + " does not re-evaluate");
  const std::size_t depth = sample.program.designed_depth();
  for (std::size_t d = 0; d < depth; ++d) {
    const NodeId via = outcome->evidence_nodes[depth - d];
    const auto shortcut = shortcut_program(sample.program, g.node(via).class_label, d);
    const auto alt = evaluate_program(g, shortcut);
    if (alt && alt->terminal == outcome->terminal && alt->answer == outcome->answer) return d;
  }
  return depth;
}

enum class ViolationKind { AnswerMismatch, MissingEvidence, SpanMismatch, DepthBookkeeping };

inline std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::AnswerMismatch: return "AnswerMismatch";
    case ViolationKind::MissingEvidence: return "MissingEvidence";
    case ViolationKind::SpanMismatch: return "SpanMismatch";
    case ViolationKind::DepthBookkeeping: return "DepthBookkeeping";
  }
  return "?";
}

struct Violation {
  std::uint64_t sample_id = 0;
  ViolationKind kind = ViolationKind::AnswerMismatch;
  std::string detail;
};

// Audits one sample against the graph. One violation per failed clause:
// answer reproduced, evidence ids exist and match, span is the hull of the
// evidence edges, depth bookkeeping consistent.
inline std::vector<Violation> check_sample(const KnowledgeGraph& g, const QASample& s) {
  std::vector<Violation> out;
  auto flag = [&](ViolationKind k, std::string detail) {
    out.push_back({s.sample_id, k, std::move(detail)});
  };
  const auto outcome = evaluate_program(g, s.program);

  if (!outcome)
    flag(ViolationKind::AnswerMismatch, "program yields no outcome on this graph");
  else if (outcome->answer != s.answer)
    flag(ViolationKind::AnswerMismatch,
         "stored " + answer_text(s.answer) + ", re-evaluated " + answer_text(outcome->answer));

  {
    std::string problem;
    for (NodeId n : s.evidence.node_ids)
      if (!g.has_node(n)) problem = "node " + std::to_string(n) + " does not exist";
    for (EdgeId e : s.evidence.edge_ids)
      if (!g.has_edge(e)) problem = "edge " + std::to_string(e) + " does not exist";
    for (EdgeId e : s.evidence.support_edge_ids)
      if (!g.has_edge(e)) problem = "support edge " + std::to_string(e) + " does not exist";
    if (problem.empty() && outcome) {
      if (outcome->evidence_nodes != s.evidence.node_ids)
        problem = "evidence nodes differ from the traversal";
      else if (outcome->evidence_edges != s.evidence.edge_ids)
        problem = "evidence edges differ from the traversal";
      else if (outcome->support_edges != s.evidence.support_edge_ids)
        problem = "support edges differ from the traversal";
    }
    if (problem.empty() && !outcome && s.designed_depth > 0 && s.evidence.edge_ids.empty())
      problem = "no evidence edges";
    if (!problem.empty()) flag(ViolationKind::MissingEvidence, problem);
  }

  {
    // The reference hull comes from the re-evaluated traversal when there is
    // one, else from the stored edges when they all exist.
    std::optional<std::optional<TimeInterval>> expected;
    if (outcome) {
      expected = evidence_span(g, outcome->evidence_edges);
    } else if (std::all_of(s.evidence.edge_ids.begin(), s.evidence.edge_ids.end(),
                           [&](EdgeId e) { return g.has_edge(e); })) {
      expected = evidence_span(g, s.evidence.edge_ids);
    }
    if (expected && *expected != s.evidence.span) {
      auto show = [](const std::optional<TimeInterval>& i) {
        return i ? "[" + std::to_string(i->start) + ", " + std::to_string(i->end) + "]"
                 : std::string("null");
      };
      flag(ViolationKind::SpanMismatch,
           "stored span " + show(s.evidence.span) + ", evidence hull " + show(*expected));
    }
  }

  if (s.designed_depth != s.program.designed_depth())
    flag(ViolationKind::DepthBookkeeping,
         "designed_depth " + std::to_string(s.designed_depth) + " but program has " +
             std::to_string(s.program.designed_depth()) + " hops");
  else if (s.verified_depth && *s.verified_depth > s.designed_depth)
    flag(ViolationKind::DepthBookkeeping, "verified_depth exceeds designed_depth");
  return out;
}

// counts[designed][verified]; entries above the diagonal stay zero.
struct AlignmentMatrix {
  std::vector<std::vector<std::uint64_t>> counts;
  std::uint64_t total = 0;

  std::size_t max_depth() const noexcept { return counts.empty() ? 0 : counts.size() - 1; }
  std::uint64_t trace() const {
    std::uint64_t t = 0;
    for (std::size_t d = 0; d < counts.size(); ++d) t += counts[d][d];
    return t;
  }
};

inline AlignmentMatrix alignment_matrix(const std::vector<QASample>& samples,
                                        std::size_t max_depth = 4) {
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "no samples");
  std::size_t dim = max_depth;
  for (const auto& s : samples) {
    if (!s.verified_depth)
      throw Error(ErrorCode::UnverifiedSample, "sample " + std::to_string(s.sample_id));
    if (*s.verified_depth > s.designed_depth)
      throw Error(ErrorCode::InvariantViolation,
                  "sample " + std::to_string(s.sample_id) + " verified above designed depth");
    dim = std::max(dim, s.designed_depth);
  }
  AlignmentMatrix m;
  m.counts.assign(dim + 1, std::vector<std::uint64_t>(dim + 1, 0));
  for (const auto& s : samples) ++m.counts[s.designed_depth][*s.verified_depth];
  m.total = samples.size();
  return m;
}

inline double diagonal_dominance(const AlignmentMatrix& m) {
  if (m.total == 0) throw Error(ErrorCode::EmptyMatrix, "matrix total is zero");
  return static_cast<double>(m.trace()) / static_cast<double>(m.total);
}

inline nlohmann::ordered_json to_json(const Violation& v) {
  nlohmann::ordered_json j;
  j["sample_id"] = v.sample_id;
  j["kind"] = to_string(v.kind);
  j["detail"] = v.detail;
  return j;
}

// Report document: matrix, dominance (null when nothing could be verified),
// violations and the number of samples in the matrix.
inline std::string validation_report(const std::optional<AlignmentMatrix>& m,
                                     const std::vector<Violation>& violations) {
  nlohmann::ordered_json j;
  j["matrix"] = m ? nlohmann::ordered_json(m->counts) : nlohmann::ordered_json::array();
  j["diagonal_dominance"] = m && m->total > 0 ? nlohmann::ordered_json(diagonal_dominance(*m))
                                              : nlohmann::ordered_json(nullptr);
  auto vs = nlohmann::ordered_json::array();
  for (const auto& v : violations) vs.push_back(to_json(v));
  j["violations"] = std::move(vs);
  j["total"] = m ? m->total : 0;
  return j.dump(1) + "\n";
}

}  // namespace tkg
