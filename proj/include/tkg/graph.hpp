#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tkg/detect.hpp"
#include "tkg/error.hpp"
#include "tkg/interval.hpp"
#include "tkg/parallel.hpp"
#include "tkg/tubelet.hpp"

namespace tkg {

struct EntityNode {
  NodeId node_id = 0;
  std::string video_id;
  std::string track_id;
  std::string class_label;
  Category category = Category::Instrument;
  TimeInterval lifespan;

  friend bool operator==(const EntityNode&, const EntityNode&) = default;
};

// Temporal knowledge graph. Immutable once built; edges are ordered by
// (interval.start, edge_id) and ids on both sides are dense from 0.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(std::vector<EntityNode> nodes, std::vector<InteractionEdge> edges,
                 DetectionConfig config)
      : nodes_(std::move(nodes)), edges_(std::move(edges)), config_(config) {
    adjacency_.resize(nodes_.size());
    for (const auto& e : edges_) {
      if (e.subject < nodes_.size()) adjacency_[e.subject].push_back(e.edge_id);
      if (e.object < nodes_.size()) adjacency_[e.object].push_back(e.edge_id);
    }
  }

  const std::vector<EntityNode>& nodes() const noexcept { return nodes_; }
  const std::vector<InteractionEdge>& edges() const noexcept { return edges_; }
  const DetectionConfig& config() const noexcept { return config_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool has_node(NodeId id) const noexcept { return id < nodes_.size(); }
  bool has_edge(EdgeId id) const noexcept { return id < edges_.size(); }
  const EntityNode& node(NodeId id) const { return nodes_.at(id); }
  const InteractionEdge& edge(EdgeId id) const { return edges_.at(id); }
  // Incident edge ids of a node, ascending.
  const std::vector<EdgeId>& incident(NodeId id) const { return adjacency_.at(id); }

  template <typename Fn>
  void for_each_node(Fn&& fn) const {
    for (const auto& n : nodes_) fn(n);
  }
  template <typename Fn>
  void for_each_incident(NodeId id, Fn&& fn) const {
    for (EdgeId e : adjacency_.at(id)) fn(edges_[e]);
  }

  // Throws InvariantViolation naming the first broken invariant.
  void validate() const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.config_ == b.config_;
  }

 private:
  std::vector<EntityNode> nodes_;
  std::vector<InteractionEdge> edges_;
  std::vector<std::vector<EdgeId>> adjacency_;
  DetectionConfig config_;
};

// The part of a graph induced by a set of nodes and edges. Ids are those of
// the parent graph. Edges whose endpoints are not both kept are dropped.
class SubgraphView {
 public:
  SubgraphView(const KnowledgeGraph& parent, const std::vector<NodeId>& nodes,
               const std::vector<EdgeId>& edges)
      : parent_(&parent), node_set_(nodes.begin(), nodes.end()) {
    for (EdgeId id : edges) {
      if (!parent.has_edge(id)) continue;
      const auto& e = parent.edge(id);
      if (node_set_.count(e.subject) && node_set_.count(e.object)) edge_set_.insert(id);
    }
  }

  const EntityNode& node(NodeId id) const { return parent_->node(id); }
  const InteractionEdge& edge(EdgeId id) const { return parent_->edge(id); }

  template <typename Fn>
  void for_each_node(Fn&& fn) const {
    for (NodeId id : node_set_)
      if (parent_->has_node(id)) fn(parent_->node(id));
  }
  template <typename Fn>
  void for_each_incident(NodeId id, Fn&& fn) const {
    if (!node_set_.count(id)) return;
    for (EdgeId e : parent_->incident(id))
      if (edge_set_.count(e)) fn(parent_->edge(e));
  }

 private:
  const KnowledgeGraph* parent_;
  std::set<NodeId> node_set_;
  std::set<EdgeId> edge_set_;
};

inline void KnowledgeGraph::validate() const {
  auto fail = [](const std::string& what) {
    return Error(ErrorCode::InvariantViolation, what);
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.node_id != i) throw fail("node_id " + std::to_string(n.node_id) + " at position " + std::to_string(i));
    if (!n.lifespan.valid()) throw fail("node " + std::to_string(i) + " has an invalid lifespan");
  }
  std::map<std::tuple<NodeId, NodeId, Predicate>, std::vector<TimeInterval>> runs;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    const std::string tag = "edge " + std::to_string(i);
    if (e.edge_id != i) throw fail(tag + " carries edge_id " + std::to_string(e.edge_id));
    if (e.subject >= nodes_.size() || e.object >= nodes_.size())
      throw fail(tag + " references node " +
                 std::to_string(std::max(e.subject, e.object)) + " of " +
                 std::to_string(nodes_.size()));
    if (e.subject == e.object) throw fail(tag + " is a self loop");
    if (!e.interval.valid()) throw fail(tag + " has an invalid interval");
    const auto& s = nodes_[e.subject];
    const auto& o = nodes_[e.object];
    if (s.video_id != o.video_id) throw fail(tag + " crosses videos");
    if (!s.lifespan.contains(e.interval) || !o.lifespan.contains(e.interval))
      throw fail(tag + " interval lies outside an endpoint lifespan");
    if (!takes_subject_role(s.category, s.track_id, o.category, o.track_id))
      throw fail(tag + " violates the subject role rule");
    if (!(e.mean_overlap >= 0.0 && e.mean_overlap <= 1.0))
      throw fail(tag + " mean_overlap outside [0,1]");
    if (i > 0 && edges_[i - 1].interval.start > e.interval.start)
      throw fail(tag + " breaks (start, edge_id) ordering");
    runs[{e.subject, e.object, e.predicate}].push_back(e.interval);
  }
  for (auto& [key, intervals] : runs) {
    std::sort(intervals.begin(), intervals.end());
    for (std::size_t k = 1; k < intervals.size(); ++k) {
      if (intervals[k].start - intervals[k - 1].end - 1 <= config_.gap_tolerance)
        throw fail("unmerged edges between nodes " + std::to_string(std::get<0>(key)) +
                   " and " + std::to_string(std::get<1>(key)));
    }
  }
}

namespace detail {

// Merges same-typed edges of one endpoint pair whose intervals overlap or sit
// within the gap tolerance. Overlap scores are averaged by frame count.
inline std::vector<InteractionEdge> merge_runs(std::vector<InteractionEdge> edges,
                                               Frame gap_tolerance) {
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.subject, x.object, x.predicate, x.interval) <
           std::tie(y.subject, y.object, y.predicate, y.interval);
  });
  std::vector<InteractionEdge> out;
  for (const auto& e : edges) {
    if (!out.empty()) {
      auto& last = out.back();
      if (last.subject == e.subject && last.object == e.object &&
          last.predicate == e.predicate &&
          e.interval.start - last.interval.end - 1 <= gap_tolerance) {
        const double wl = static_cast<double>(last.interval.length());
        const double we = static_cast<double>(e.interval.length());
        last.mean_overlap = (last.mean_overlap * wl + e.mean_overlap * we) / (wl + we);
        last.interval = hull(last.interval, e.interval);
        continue;
      }
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace detail

// Builds the graph: one node per tubelet (ids in (video_id, track_id) order),
// edges from pairwise detection over every same-video pair. Pair detection
// runs on `threads` workers; results are consumed in canonical pair order.
inline KnowledgeGraph build_graph(const std::vector<Tubelet>& tubelets,
                                  const DetectionConfig& cfg, unsigned threads = 1) {
  validate_config(cfg);
  validate_tubelets(tubelets);

  std::vector<const Tubelet*> order;
  order.reserve(tubelets.size());
  for (const auto& t : tubelets) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](const Tubelet* x, const Tubelet* y) {
    return std::tie(x->video_id, x->track_id) < std::tie(y->video_id, y->track_id);
  });

  std::vector<EntityNode> nodes;
  nodes.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& t = *order[i];
    nodes.push_back({static_cast<NodeId>(i), t.video_id, t.track_id, t.class_label,
                     t.category, t.lifespan()});
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (NodeId i = 0; i < nodes.size(); ++i)
    for (NodeId j = i + 1; j < nodes.size() && nodes[j].video_id == nodes[i].video_id; ++j)
      pairs.emplace_back(i, j);

  std::vector<std::vector<InteractionEdge>> found(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    if (!intersect(nodes[i].lifespan, nodes[j].lifespan)) return;
    found[k] = detect_interactions(*order[i], *order[j], cfg, i, j);
  });

  std::vector<InteractionEdge> edges;
  for (auto& f : found) edges.insert(edges.end(), f.begin(), f.end());
  edges = detail::merge_runs(std::move(edges), cfg.gap_tolerance);
  std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) {
    return std::tie(x.interval.start, x.interval.end, x.subject, x.object, x.predicate) <
           std::tie(y.interval.start, y.interval.end, y.subject, y.object, y.predicate);
  });
  for (std::size_t k = 0; k < edges.size(); ++k) edges[k].edge_id = static_cast<EdgeId>(k);
  return KnowledgeGraph(std::move(nodes), std::move(edges), cfg);
}

// ---- graph file ----------------------------------------------------------

inline nlohmann::ordered_json to_json(const DetectionConfig& cfg) {
  nlohmann::ordered_json j;
  j["tau_touch"] = cfg.tau_touch;
  j["tau_near"] = cfg.tau_near;
  j["gap_tolerance"] = cfg.gap_tolerance;
  j["min_duration"] = cfg.min_duration;
  return j;
}

inline std::string serialize_graph(const KnowledgeGraph& g) {
  nlohmann::ordered_json doc;
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : g.nodes()) {
    nlohmann::ordered_json j;
    j["node_id"] = n.node_id;
    j["video_id"] = n.video_id;
    j["track_id"] = n.track_id;
    j["class_label"] = n.class_label;
    j["category"] = to_string(n.category);
    j["lifespan"] = {n.lifespan.start, n.lifespan.end};
    nodes.push_back(std::move(j));
  }
  auto edges = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) {
    nlohmann::ordered_json j;
    j["edge_id"] = e.edge_id;
    j["subject"] = e.subject;
    j["object"] = e.object;
    j["predicate"] = to_string(e.predicate);
    j["interval"] = {e.interval.start, e.interval.end};
    j["mean_overlap"] = e.mean_overlap;
    edges.push_back(std::move(j));
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["config"] = to_json(g.config());
  return doc.dump(1) + "\n";
}

namespace detail {

inline const nlohmann::json& graph_field(const nlohmann::json& obj, const char* key,
                                         const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw Error(ErrorCode::MalformedGraphFile, where + ": missing \"" + key + "\"");
  return obj.at(key);
}

inline TimeInterval graph_interval(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw Error(ErrorCode::MalformedGraphFile, where + ": interval must be [start, end]");
  TimeInterval i{v[0].get<Frame>(), v[1].get<Frame>()};
  if (!i.valid()) throw Error(ErrorCode::InvariantViolation, where + ": invalid interval");
  return i;
}

template <typename T>
T graph_get(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = graph_field(obj, key, where);
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw std::invalid_argument("not a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw std::invalid_argument("not an integer");
      if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0 &&
          std::is_unsigned_v<T>)
        throw std::invalid_argument("negative");
    } else {
      if (!v.is_number()) throw std::invalid_argument("not a number");
    }
    return v.get<T>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MalformedGraphFile,
                where + ": field \"" + key + "\" " + e.what());
  }
}

}  // namespace detail

// Parses and re-validates a graph file.
inline KnowledgeGraph deserialize_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedGraphFile, e.what());
  }
  using detail::graph_field;
  using detail::graph_get;
  const auto& jn = graph_field(doc, "nodes", "document");
  const auto& je = graph_field(doc, "edges", "document");
  const auto& jc = graph_field(doc, "config", "document");
  if (!jn.is_array() || !je.is_array())
    throw Error(ErrorCode::MalformedGraphFile, "\"nodes\" and \"edges\" must be arrays");

  DetectionConfig cfg;
  cfg.tau_touch = graph_get<double>(jc, "tau_touch", "config");
  cfg.tau_near = graph_get<double>(jc, "tau_near", "config");
  cfg.gap_tolerance = graph_get<Frame>(jc, "gap_tolerance", "config");
  cfg.min_duration = graph_get<Frame>(jc, "min_duration", "config");

  std::vector<EntityNode> nodes;
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const std::string where = "node " + std::to_string(i);
    EntityNode n;
    n.node_id = graph_get<NodeId>(jn[i], "node_id", where);
    n.video_id = graph_get<std::string>(jn[i], "video_id", where);
    n.track_id = graph_get<std::string>(jn[i], "track_id", where);
    n.class_label = graph_get<std::string>(jn[i], "class_label", where);
    if (!parse_category(graph_get<std::string>(jn[i], "category", where), n.category))
      throw Error(ErrorCode::MalformedGraphFile, where + ": unknown category");
    n.lifespan = detail::graph_interval(graph_field(jn[i], "lifespan", where), where);
    nodes.push_back(std::move(n));
  }
  std::vector<InteractionEdge> edges;
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string where = "edge " + std::to_string(i);
    InteractionEdge e;
    e.edge_id = graph_get<EdgeId>(je[i], "edge_id", where);
    e.subject = graph_get<NodeId>(je[i], "subject", where);
    e.object = graph_get<NodeId>(je[i], "object", where);
    if (!parse_predicate(graph_get<std::string>(je[i], "predicate", where), e.predicate))
      throw Error(ErrorCode::MalformedGraphFile, where + ": unknown predicate");
    e.interval = detail::graph_interval(graph_field(je[i], "interval", where), where);
    e.mean_overlap = graph_get<double>(je[i], "mean_overlap", where);
    edges.push_back(e);
  }
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvariantViolation, e.detail());
  }
  KnowledgeGraph g(std::move(nodes), std::move(edges), cfg);
  g.validate();
  return g;
}

}  // namespace tkg
