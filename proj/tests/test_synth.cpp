#include <gtest/gtest.h>

#include "support.hpp"

using namespace tkg;
using namespace testing_support;

namespace {

SynthesisPlan plan_of(std::vector<std::size_t> quotas) {
  SynthesisPlan p;
  quotas.resize(kMaxPlanDepth + 1, 0);
  p.quotas = quotas;
  return p;
}

}  // namespace

TEST(Synthesize, ToyChainDepthTwo) {
  const auto g = toy_graph();
  SynthesisOptions opt;
  opt.enforce_minimality = false;
  const auto r = synthesize_dataset(g, plan_of({0, 0, 1}), builtin_templates(), 42, opt);
  ASSERT_EQ(r.samples.size(), 1u);
  const auto& s = r.samples[0];
  EXPECT_EQ(s.designed_depth, 2u);
  EXPECT_EQ(s.evidence.edge_ids.size(), 2u);
  // The toy graph has exactly two edges, so a 2-edge evidence chain visits both.
  std::vector<EdgeId> sorted = s.evidence.edge_ids;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<EdgeId>{0, 1}));
  EXPECT_EQ(s.evidence.span, (TimeInterval{10, 40}));
  EXPECT_TRUE(check_sample(g, s).empty());
}

TEST(Synthesize, EmptyGraphIsInsufficient) {
  const KnowledgeGraph g;
  try {
    synthesize_dataset(g, plan_of({0, 1}), builtin_templates(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientGraph);
  }
}

TEST(Synthesize, MissingTemplateDepth) {
  EXPECT_THROW(synthesize_dataset(toy_graph(), plan_of({1}), builtin_templates(), 1), Error);
}

TEST(Synthesize, DeterministicAcrossRunsAndThreads) {
  const auto g = random_scene_graph(3);
  SynthesisOptions one;
  one.threads = 1;
  SynthesisOptions many;
  many.threads = 8;
  const auto plan = plan_of({0, 15, 15, 10});
  const auto a = synthesize_dataset(g, plan, builtin_templates(), 99, one);
  const auto b = synthesize_dataset(g, plan, builtin_templates(), 99, one);
  const auto c = synthesize_dataset(g, plan, builtin_templates(), 99, many);
  EXPECT_EQ(write_dataset(a.samples), write_dataset(b.samples));
  EXPECT_EQ(write_dataset(a.samples), write_dataset(c.samples));
  const auto d = synthesize_dataset(g, plan, builtin_templates(), 100, one);
  EXPECT_NE(write_dataset(a.samples), write_dataset(d.samples));
}

TEST(Synthesize, QuotasExactAndSamplesSound) {
  const auto g = random_scene_graph(5);
  const auto plan = plan_of({0, 10, 10, 10});
  const auto r = synthesize_dataset(g, plan, builtin_templates(), 7);
  std::map<std::size_t, std::size_t> per_depth;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    EXPECT_EQ(s.sample_id, i);
    ++per_depth[s.designed_depth];
    EXPECT_EQ(s.designed_depth, s.program.hops.size());
    EXPECT_EQ(s.evidence.edge_ids.size(), s.designed_depth);
    EXPECT_EQ(s.evidence.node_ids.size(), s.designed_depth + 1);
    EXPECT_TRUE(check_sample(g, s).empty()) << s.sample_id;
    ASSERT_TRUE(s.verified_depth);
    EXPECT_EQ(*s.verified_depth, s.designed_depth);
    EXPECT_EQ(verify_depth(g, s), s.designed_depth);
    if (s.answer.kind == AnswerMode::EntityClass) {
      EXPECT_NE(std::get<std::string>(s.answer.value), *s.program.seed.class_label);
    }
    for (const auto& n : g.nodes())
      if (s.program.seed.class_label == n.class_label) goto seeded;
    ADD_FAILURE() << "seed class not in graph";
  seeded:;
  }
  EXPECT_EQ(per_depth, (std::map<std::size_t, std::size_t>{{1, 10}, {2, 10}, {3, 10}}));
  for (const auto& [d, t] : r.tallies) {
    std::size_t rej = 0;
    for (const auto& [why, n] : t.rejected) rej += n;
    EXPECT_EQ(t.accepted + rej, t.attempts);
  }
}

TEST(Synthesize, EvidenceIsSufficient) {
  const auto g = random_scene_graph(11);
  const auto r = synthesize_dataset(g, plan_of({0, 10, 10, 10}), builtin_templates(), 3);
  for (const auto& s : r.samples) {
    std::vector<EdgeId> edges = s.evidence.edge_ids;
    edges.insert(edges.end(), s.evidence.support_edge_ids.begin(), s.evidence.support_edge_ids.end());
    std::vector<NodeId> nodes = s.evidence.node_ids;
    for (EdgeId e : edges) {
      nodes.push_back(g.edge(e).subject);
      nodes.push_back(g.edge(e).object);
    }
    const SubgraphView view(g, nodes, edges);
    const auto out = evaluate_program(view, s.program);
    ASSERT_TRUE(out) << s.sample_id;
    EXPECT_EQ(out->answer, s.answer);
    EXPECT_EQ(out->evidence_edges, s.evidence.edge_ids);
  }
}

TEST(Sample, JsonRoundTrip) {
  const auto g = random_scene_graph(2);
  const auto r = synthesize_dataset(g, plan_of({0, 5, 5, 5}), builtin_templates(), 21);
  const auto text = write_dataset(r.samples);
  EXPECT_EQ(parse_dataset(text), r.samples);
  EXPECT_EQ(write_dataset(parse_dataset(text)), text);
}

TEST(Sample, MalformedDatasetLine) {
  try {
    parse_dataset("{\"sample_id\": 1}\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedDataset);
    EXPECT_EQ(e.line(), 1u);
  }
}
