#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tkg/detect.hpp"
#include "tkg/error.hpp"
#include "tkg/graph.hpp"
#include "tkg/interval.hpp"

namespace tkg {

enum class SeedOrdinal : std::uint8_t { First, Last, Unique };
enum class HopOrdinal : std::uint8_t { First, Last };
enum class Direction : std::uint8_t { AsSubject, AsObject, Either };
enum class TemporalConstraint : std::uint8_t { Any, AfterPrev, BeforePrev };
enum class AnswerMode : std::uint8_t { EntityClass, TimeSpan, Count };

inline std::string_view to_string(SeedOrdinal o) {
  switch (o) {
    case SeedOrdinal::First: return "first";
    case SeedOrdinal::Last: return "last";
    case SeedOrdinal::Unique: return "unique";
  }
  return "?";
}
inline std::string_view to_string(HopOrdinal o) { return o == HopOrdinal::First ? "first" : "last"; }
inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::AsSubject: return "as_subject";
    case Direction::AsObject: return "as_object";
    case Direction::Either: return "either";
  }
  return "?";
}
inline std::string_view to_string(TemporalConstraint t) {
  switch (t) {
    case TemporalConstraint::Any: return "any";
    case TemporalConstraint::AfterPrev: return "after_prev";
    case TemporalConstraint::BeforePrev: return "before_prev";
  }
  return "?";
}
inline std::string_view to_string(AnswerMode m) {
  switch (m) {
    case AnswerMode::EntityClass: return "entity_class";
    case AnswerMode::TimeSpan: return "time_span";
    case AnswerMode::Count: return "count";
  }
  return "?";
}

struct SeedSelector {
  std::optional<Category> category;
  std::optional<std::string> class_label;
  SeedOrdinal ordinal = SeedOrdinal::Unique;

  friend bool operator==(const SeedSelector&, const SeedSelector&) = default;
};

struct TraverseOp {
  Predicate predicate = Predicate::Touches;
  Direction direction = Direction::Either;
  std::optional<Category> target_category;
  TemporalConstraint temporal = TemporalConstraint::Any;
  HopOrdinal ordinal = HopOrdinal::First;

  friend bool operator==(const TraverseOp&, const TraverseOp&) = default;
};

// An executable question: pick a seed entity, then follow `hops` edges.
// The hop count is the designed reasoning depth.
struct QueryProgram {
  SeedSelector seed;
  std::vector<TraverseOp> hops;
  AnswerMode answer_mode = AnswerMode::EntityClass;

  std::size_t designed_depth() const noexcept { return hops.size(); }

  friend bool operator==(const QueryProgram&, const QueryProgram&) = default;
};

// Structural well-formedness; evaluate_program yields an empty outcome for
// programs that fail it.
inline std::optional<std::string> program_problem(const QueryProgram& p) {
  if (!p.seed.category && !p.seed.class_label) return "seed selector has no filter";
  if (!p.hops.empty() && p.hops.front().temporal != TemporalConstraint::Any)
    return "first hop must use temporal constraint any";
  if (p.answer_mode != AnswerMode::EntityClass && p.hops.empty())
    return std::string(to_string(p.answer_mode)) + " answers need at least one hop";
  return std::nullopt;
}

using AnswerValue = std::variant<std::string, TimeInterval, std::uint64_t>;

struct Answer {
  AnswerMode kind = AnswerMode::EntityClass;
  AnswerValue value;

  friend bool operator==(const Answer&, const Answer&) = default;
};

struct EvalOutcome {
  NodeId terminal = 0;
  std::vector<NodeId> evidence_nodes;
  std::vector<EdgeId> evidence_edges;
  // Final-hop candidates (ascending) for count answers; empty otherwise.
  std::vector<EdgeId> support_edges;
  Answer answer;

  friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;
};

// Minimal read interface shared by KnowledgeGraph and SubgraphView.
template <typename G>
concept GraphLike = requires(const G& g, NodeId n, EdgeId e) {
  { g.node(n) } -> std::convertible_to<const EntityNode&>;
  { g.edge(e) } -> std::convertible_to<const InteractionEdge&>;
  g.for_each_node([](const EntityNode&) {});
  g.for_each_incident(n, [](const InteractionEdge&) {});
};

template <GraphLike G>
std::optional<NodeId> resolve_seed(const G& g, const SeedSelector& seed) {
  std::optional<NodeId> pick;
  std::size_t matches = 0;
  g.for_each_node([&](const EntityNode& n) {
    if (seed.category && n.category != *seed.category) return;
    if (seed.class_label && n.class_label != *seed.class_label) return;
    ++matches;
    if (!pick) {
      pick = n.node_id;
      return;
    }
    const auto& cur = g.node(*pick);
    const bool better =
        seed.ordinal == SeedOrdinal::Last
            ? (n.lifespan.start > cur.lifespan.start ||
               (n.lifespan.start == cur.lifespan.start && n.node_id < cur.node_id))
            : (n.lifespan.start < cur.lifespan.start ||
               (n.lifespan.start == cur.lifespan.start && n.node_id < cur.node_id));
    if (better) pick = n.node_id;
  });
  if (seed.ordinal == SeedOrdinal::Unique && matches != 1) return std::nullopt;
  return pick;
}

inline bool temporal_ok(TemporalConstraint c, const TimeInterval& candidate,
                        const std::optional<TimeInterval>& prev) {
  if (c == TemporalConstraint::Any || !prev) return c == TemporalConstraint::Any;
  const AllenRelation r = allen_relation(candidate, *prev);
  if (c == TemporalConstraint::AfterPrev)
    return r == AllenRelation::After || r == AllenRelation::MetBy;
  return r == AllenRelation::Before || r == AllenRelation::Meets;
}

// Edges leaving `at` that satisfy one hop, ordered by (interval.start, edge_id).
template <GraphLike G>
std::vector<EdgeId> hop_candidates(const G& g, NodeId at, const TraverseOp& op,
                                   const std::optional<TimeInterval>& prev) {
  std::vector<EdgeId> out;
  g.for_each_incident(at, [&](const InteractionEdge& e) {
    if (e.predicate != op.predicate) return;
    if (op.direction == Direction::AsSubject && e.subject != at) return;
    if (op.direction == Direction::AsObject && e.object != at) return;
    const NodeId other = e.subject == at ? e.object : e.subject;
    if (op.target_category && g.node(other).category != *op.target_category) return;
    if (!temporal_ok(op.temporal, e.interval, prev)) return;
    out.push_back(e.edge_id);
  });
  std::sort(out.begin(), out.end(), [&](EdgeId x, EdgeId y) {
    const auto& ex = g.edge(x);
    const auto& ey = g.edge(y);
    return std::tie(ex.interval.start, ex.edge_id) < std::tie(ey.interval.start, ey.edge_id);
  });
  return out;
}

// Runs a program. Every hop is single-valued through its ordinal, so the
// result is either exactly one outcome or nothing.
template <GraphLike G>
std::optional<EvalOutcome> evaluate_program(const G& g, const QueryProgram& program) {
  if (program_problem(program)) return std::nullopt;
  const auto seed = resolve_seed(g, program.seed);
  if (!seed) return std::nullopt;

  EvalOutcome out;
  NodeId at = *seed;
  out.evidence_nodes.push_back(at);
  std::optional<TimeInterval> prev;
  std::size_t last_candidates = 0;
  for (std::size_t h = 0; h < program.hops.size(); ++h) {
    const auto& op = program.hops[h];
    auto cands = hop_candidates(g, at, op, prev);
    if (cands.empty()) return std::nullopt;
    const EdgeId chosen = op.ordinal == HopOrdinal::First ? cands.front() : cands.back();
    const auto& e = g.edge(chosen);
    at = e.subject == at ? e.object : e.subject;
    prev = e.interval;
    out.evidence_edges.push_back(chosen);
    out.evidence_nodes.push_back(at);
    last_candidates = cands.size();
    if (h + 1 == program.hops.size() && program.answer_mode == AnswerMode::Count) {
      std::sort(cands.begin(), cands.end());
      out.support_edges = std::move(cands);
    }
  }
  out.terminal = at;
  out.answer.kind = program.answer_mode;
  switch (program.answer_mode) {
    case AnswerMode::EntityClass:
      out.answer.value = g.node(at).class_label;
      break;
    case AnswerMode::TimeSpan:
      out.answer.value = *prev;
      break;
    case AnswerMode::Count:
      out.answer.value = static_cast<std::uint64_t>(last_candidates);
      break;
  }
  return out;
}

// Hull of the evidence edge intervals; empty for depth-0 evidence.
template <GraphLike G>
std::optional<TimeInterval> evidence_span(const G& g, const std::vector<EdgeId>& edges) {
  std::optional<TimeInterval> span;
  for (EdgeId id : edges) {
    const auto& iv = g.edge(id).interval;
    span = span ? hull(*span, iv) : iv;
  }
  return span;
}

// ---- JSON ----------------------------------------------------------------

namespace detail {

template <typename E, std::size_t N>
E parse_enum(const nlohmann::json& v, const E (&values)[N], const char* what) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    for (E e : values)
      if (to_string(e) == s) return e;
  }
  throw Error(ErrorCode::MalformedDataset, std::string("bad ") + what + ": " + v.dump());
}

inline constexpr SeedOrdinal kSeedOrdinals[] = {SeedOrdinal::First, SeedOrdinal::Last,
                                                SeedOrdinal::Unique};
inline constexpr HopOrdinal kHopOrdinals[] = {HopOrdinal::First, HopOrdinal::Last};
inline constexpr Direction kDirections[] = {Direction::AsSubject, Direction::AsObject,
                                            Direction::Either};
inline constexpr TemporalConstraint kTemporal[] = {
    TemporalConstraint::Any, TemporalConstraint::AfterPrev, TemporalConstraint::BeforePrev};
inline constexpr AnswerMode kAnswerModes[] = {AnswerMode::EntityClass, AnswerMode::TimeSpan,
                                              AnswerMode::Count};
inline constexpr Category kCategories[] = {Category::Instrument, Category::Anatomy};

inline nlohmann::ordered_json opt_category(const std::optional<Category>& c) {
  return c ? nlohmann::ordered_json(to_string(*c)) : nlohmann::ordered_json(nullptr);
}

inline std::optional<Category> parse_opt_category(const nlohmann::json& v) {
  if (v.is_null()) return std::nullopt;
  return parse_enum(v, kCategories, "category");
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const QueryProgram& p) {
  nlohmann::ordered_json seed;
  seed["category"] = detail::opt_category(p.seed.category);
  seed["class_label"] = p.seed.class_label ? nlohmann::ordered_json(*p.seed.class_label)
                                           : nlohmann::ordered_json(nullptr);
  seed["ordinal"] = to_string(p.seed.ordinal);
  auto hops = nlohmann::ordered_json::array();
  for (const auto& h : p.hops) {
    nlohmann::ordered_json j;
    j["predicate"] = to_string(h.predicate);
    j["direction"] = to_string(h.direction);
    j["target_category"] = detail::opt_category(h.target_category);
    j["temporal_constraint"] = to_string(h.temporal);
    j["ordinal"] = to_string(h.ordinal);
    hops.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["seed"] = std::move(seed);
  j["hops"] = std::move(hops);
  j["answer_mode"] = to_string(p.answer_mode);
  return j;
}

inline QueryProgram program_from_json(const nlohmann::json& j) {
  using namespace detail;
  QueryProgram p;
  try {
    const auto& seed = j.at("seed");
    p.seed.category = parse_opt_category(seed.at("category"));
    if (!seed.at("class_label").is_null())
      p.seed.class_label = seed.at("class_label").get<std::string>();
    p.seed.ordinal = parse_enum(seed.at("ordinal"), kSeedOrdinals, "seed ordinal");
    for (const auto& h : j.at("hops")) {
      TraverseOp op;
      if (!h.at("predicate").is_string() ||
          !parse_predicate(h.at("predicate").get<std::string>(), op.predicate))
        throw Error(ErrorCode::MalformedDataset, "bad predicate");
      op.direction = parse_enum(h.at("direction"), kDirections, "direction");
      op.target_category = parse_opt_category(h.at("target_category"));
      op.temporal = parse_enum(h.at("temporal_constraint"), kTemporal, "temporal constraint");
      op.ordinal = parse_enum(h.at("ordinal"), kHopOrdinals, "hop ordinal");
      p.hops.push_back(op);
    }
    p.answer_mode = parse_enum(j.at("answer_mode"), kAnswerModes, "answer mode");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDataset, std::string("program: ") + e.what());
  }
  return p;
}

inline nlohmann::ordered_json to_json(const Answer& a) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(a.kind);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TimeInterval>)
          j["value"] = {v.start, v.end};
        else
          j["value"] = v;
      },
      a.value);
  return j;
}

inline Answer answer_from_json(const nlohmann::json& j) {
  Answer a;
  try {
    a.kind = detail::parse_enum(j.at("kind"), detail::kAnswerModes, "answer kind");
    const auto& v = j.at("value");
    switch (a.kind) {
      case AnswerMode::EntityClass:
        a.value = v.get<std::string>();
        break;
      case AnswerMode::TimeSpan:
        if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::MalformedDataset, "span value");
        a.value = TimeInterval{v[0].get<Frame>(), v[1].get<Frame>()};
        break;
      case AnswerMode::Count:
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
          throw Error(ErrorCode::MalformedDataset, "count value");
        a.value = v.get<std::uint64_t>();
        break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDataset, std::string("answer: ") + e.what());
  }
  return a;
}

inline std::string answer_text(const Answer& a) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>)
          return v;
        else if constexpr (std::is_same_v<T, TimeInterval>)
          return "[" + std::to_string(v.start) + ", " + std::to_string(v.end) + "]";
        else
          return std::to_string(v);
      },
      a.value);
}

}  // namespace tkg
