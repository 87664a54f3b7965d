#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tkg/error.hpp"
#include "tkg/graph.hpp"
#include "tkg/parallel.hpp"
#include "tkg/program.hpp"
#include "tkg/random.hpp"
#include "tkg/sample.hpp"
#include "tkg/templates.hpp"
#include "tkg/validate.hpp"

namespace tkg {

inline constexpr std::size_t kMaxPlanDepth = 4;

struct SynthesisPlan {
  // quotas[d] = number of samples wanted at designed depth d.
  std::vector<std::size_t> quotas = std::vector<std::size_t>(kMaxPlanDepth + 1, 0);

  std::size_t quota(std::size_t depth) const {
    return depth < quotas.size() ? quotas[depth] : 0;
  }
  std::size_t total() const {
    std::size_t t = 0;
    for (auto q : quotas) t += q;
    return t;
  }
};

struct SynthesisOptions {
  bool enforce_minimality = true;
  std::size_t max_attempts = 200;  // per requested sample
  unsigned threads = 1;
};

enum class RejectReason { None, EmptyOutcome, DegenerateAnswer, NotMinimal };

inline std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "accepted";
    case RejectReason::EmptyOutcome: return "empty_outcome";
    case RejectReason::DegenerateAnswer: return "degenerate_answer";
    case RejectReason::NotMinimal: return "not_minimal";
  }
  return "?";
}

struct DepthTally {
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  std::map<RejectReason, std::size_t> rejected;
};

struct SynthesisResult {
  std::vector<QASample> samples;
  std::map<std::size_t, DepthTally> tallies;
};

namespace detail {

struct Attempt {
  RejectReason reason = RejectReason::EmptyOutcome;
  QASample sample;
};

// One rejection-sampling attempt, a pure function of its stream seed.
// Program parameters are read off the graph along a random walk so that
// every sampled value (class, predicate, category) occurs in the graph.
inline Attempt synthesis_attempt(const KnowledgeGraph& g, const std::vector<const QATemplate*>& pool,
                                 std::uint64_t stream_seed, bool enforce_minimality) {
  Attempt a;
  if (pool.empty() || g.node_count() == 0) return a;
  Rng rng(stream_seed);
  const QATemplate& tpl = *pool[rng.index(pool.size())];

  QueryProgram p;
  p.answer_mode = tpl.answer_mode;
  const EntityNode& seed_pick = g.node(static_cast<NodeId>(rng.index(g.node_count())));
  p.seed.class_label = seed_pick.class_label;
  static constexpr SeedOrdinal kSeedOrd[] = {SeedOrdinal::Unique, SeedOrdinal::First,
                                             SeedOrdinal::Last};
  p.seed.ordinal = kSeedOrd[rng.index(3)];
  auto at = resolve_seed(g, p.seed);
  if (!at) return a;

  std::optional<TimeInterval> prev;
  for (std::size_t k = 0; k < tpl.depth; ++k) {
    const TemporalConstraint tc =
        k < tpl.hop_temporal.size() ? tpl.hop_temporal[k] : TemporalConstraint::Any;
    std::vector<const InteractionEdge*> options;
    g.for_each_incident(*at, [&](const InteractionEdge& e) {
      if (temporal_ok(tc, e.interval, prev)) options.push_back(&e);
    });
    if (options.empty()) return a;
    const InteractionEdge& guide = *options[rng.index(options.size())];
    const NodeId other = guide.subject == *at ? guide.object : guide.subject;
    TraverseOp op;
    op.predicate = guide.predicate;
    op.direction = Direction::Either;
    if (rng.chance(0.75)) op.target_category = g.node(other).category;
    op.temporal = tc;
    op.ordinal = rng.chance(0.5) ? HopOrdinal::First : HopOrdinal::Last;
    const auto cands = hop_candidates(g, *at, op, prev);
    const EdgeId chosen = op.ordinal == HopOrdinal::First ? cands.front() : cands.back();
    const auto& e = g.edge(chosen);
    at = e.subject == *at ? e.object : e.subject;
    prev = e.interval;
    p.hops.push_back(op);
  }

  const auto outcome = evaluate_program(g, p);
  if (!outcome) return a;
  if (p.answer_mode == AnswerMode::EntityClass &&
      std::get<std::string>(outcome->answer.value) == *p.seed.class_label) {
    a.reason = RejectReason::DegenerateAnswer;
    return a;
  }

  QASample& s = a.sample;
  s.video_id = g.node(outcome->evidence_nodes.front()).video_id;
  s.question = render_question(tpl, p);
  s.answer = outcome->answer;
  s.evidence.node_ids = outcome->evidence_nodes;
  s.evidence.edge_ids = outcome->evidence_edges;
  s.evidence.support_edge_ids = outcome->support_edges;
  s.evidence.span = evidence_span(g, outcome->evidence_edges);
  s.designed_depth = p.designed_depth();
  s.program = std::move(p);
  s.template_id = tpl.template_id;
  s.generation_seed = stream_seed;
  if (enforce_minimality) {
    const std::size_t v = verify_depth(g, s);
    if (v < s.designed_depth) {
      a.reason = RejectReason::NotMinimal;
      return a;
    }
    s.verified_depth = v;
  }
  a.reason = RejectReason::None;
  return a;
}

}  // namespace detail

// Fills per-depth quotas by rejection sampling. Attempt i draws from the
// private stream derive_stream(master_seed, i); depths are filled in
// ascending order and each depth continues the attempt index right after the
// attempt that completed the previous one. Acceptance follows attempt index,
// so the output does not depend on `threads`.
inline SynthesisResult synthesize_dataset(const KnowledgeGraph& g, const SynthesisPlan& plan,
                                          const std::vector<QATemplate>& templates,
                                          std::uint64_t master_seed,
                                          const SynthesisOptions& options = {}) {
  std::map<std::size_t, std::vector<const QATemplate*>> by_depth;
  for (const auto& t : templates) by_depth[t.depth].push_back(&t);
  for (std::size_t d = 0; d < plan.quotas.size(); ++d)
    if (plan.quotas[d] > 0 && by_depth[d].empty())
      throw Error(ErrorCode::TemplateMismatch, "no template covers depth " + std::to_string(d));

  SynthesisResult result;
  std::uint64_t next_index = 0;
  const std::size_t batch = std::max<std::size_t>(64, 16 * std::max(1u, options.threads));
  std::vector<detail::Attempt> slots;
  for (std::size_t d = 0; d < plan.quotas.size(); ++d) {
    const std::size_t quota = plan.quotas[d];
    if (quota == 0) continue;
    auto& tally = result.tallies[d];
    const auto& pool = by_depth[d];
    const std::size_t budget = std::max<std::size_t>(1, options.max_attempts) * quota;
    while (tally.accepted < quota) {
      const std::size_t n = std::min(batch, budget - tally.attempts);
      if (n == 0)
        throw Error(ErrorCode::InsufficientGraph,
                    "depth " + std::to_string(d) + ": " + std::to_string(tally.accepted) + " of " +
                        std::to_string(quota) + " samples after " +
                        std::to_string(tally.attempts) + " attempts");
      const std::uint64_t base = next_index + tally.attempts;
      slots.assign(n, {});
      parallel_for(n, options.threads, [&](std::size_t i) {
        slots[i] = detail::synthesis_attempt(g, pool, derive_stream(master_seed, base + i),
                                             options.enforce_minimality);
      });
      for (std::size_t i = 0; i < n && tally.accepted < quota; ++i) {
        ++tally.attempts;
        auto& at = slots[i];
        if (at.reason != RejectReason::None) {
          ++tally.rejected[at.reason];
          continue;
        }
        at.sample.sample_id = result.samples.size();
        result.samples.push_back(std::move(at.sample));
        ++tally.accepted;
      }
    }
    next_index += tally.attempts;
  }
  return result;
}

}  // namespace tkg
