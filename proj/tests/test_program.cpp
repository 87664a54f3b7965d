#include <gtest/gtest.h>

#include <functional>

#include "support.hpp"

using namespace tkg;
using namespace testing_support;

namespace {

TraverseOp hop(TemporalConstraint t = TemporalConstraint::Any, HopOrdinal o = HopOrdinal::First,
               Predicate p = Predicate::Touches) {
  TraverseOp op;
  op.predicate = p;
  op.direction = Direction::Either;
  op.temporal = t;
  op.ordinal = o;
  return op;
}

QueryProgram seed_on(const std::string& cls, std::vector<TraverseOp> hops,
                     AnswerMode mode = AnswerMode::EntityClass) {
  QueryProgram p;
  p.seed.class_label = cls;
  p.seed.ordinal = SeedOrdinal::Unique;
  p.hops = std::move(hops);
  p.answer_mode = mode;
  return p;
}

// All walks of `depth` touches edges from `start` where every step after the
// first starts strictly after the previous edge ends.
std::vector<std::vector<EdgeId>> after_walks(const KnowledgeGraph& g, NodeId start,
                                             std::size_t depth) {
  std::vector<std::vector<EdgeId>> out;
  std::vector<EdgeId> path;
  std::function<void(NodeId)> rec = [&](NodeId at) {
    if (path.size() == depth) {
      out.push_back(path);
      return;
    }
    for (const auto& e : g.edges()) {
      if (e.subject != at && e.object != at) continue;
      if (!path.empty() && e.interval.start <= g.edge(path.back()).interval.end) continue;
      path.push_back(e.edge_id);
      rec(e.subject == at ? e.object : e.subject);
      path.pop_back();
    }
  };
  rec(start);
  return out;
}

}  // namespace

TEST(Evaluate, ToyChain) {
  const auto g = toy_graph();
  const auto p = seed_on("grasper", {hop(), hop(TemporalConstraint::AfterPrev)});
  const auto out = evaluate_program(g, p);
  ASSERT_TRUE(out);
  EXPECT_EQ(g.node(out->terminal).track_id, "c");
  EXPECT_EQ(out->evidence_edges, (std::vector<EdgeId>{0, 1}));
  EXPECT_EQ(out->evidence_nodes, (std::vector<NodeId>{0, 1, 2}));
  EXPECT_EQ(evidence_span(g, out->evidence_edges), (TimeInterval{10, 40}));
  EXPECT_EQ(out->answer.value, AnswerValue(std::string("hook")));

  const auto walks = after_walks(g, 0, 2);
  ASSERT_EQ(walks.size(), 1u);
  EXPECT_EQ(walks.front(), out->evidence_edges);
}

TEST(Evaluate, NoSeedMatch) {
  EXPECT_FALSE(evaluate_program(toy_graph(), seed_on("scissors", {hop()})));
}

TEST(Evaluate, DepthZero) {
  const auto out = evaluate_program(toy_graph(), seed_on("gallbladder", {}));
  ASSERT_TRUE(out);
  EXPECT_EQ(out->answer.value, AnswerValue(std::string("gallbladder")));
  EXPECT_TRUE(out->evidence_edges.empty());
  EXPECT_EQ(out->evidence_nodes.size(), 1u);
}

TEST(Evaluate, UniqueNeedsExactlyOneMatch) {
  QueryProgram p;
  p.seed.category = Category::Instrument;
  p.seed.ordinal = SeedOrdinal::Unique;
  EXPECT_FALSE(evaluate_program(toy_graph(), p));
  p.seed.ordinal = SeedOrdinal::First;
  ASSERT_TRUE(evaluate_program(toy_graph(), p));
  EXPECT_EQ(evaluate_program(toy_graph(), p)->terminal, 0u);  // tie on start, smaller id
  p.seed.ordinal = SeedOrdinal::Last;
  EXPECT_EQ(evaluate_program(toy_graph(), p)->terminal, 0u);
}

TEST(Evaluate, OrdinalsAndCount) {
  const auto g = toy_graph();
  auto p = seed_on("gallbladder", {hop(TemporalConstraint::Any, HopOrdinal::Last)},
                   AnswerMode::TimeSpan);
  auto out = evaluate_program(g, p);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->answer.value, AnswerValue(TimeInterval{30, 40}));
  p.hops[0].ordinal = HopOrdinal::First;
  EXPECT_EQ(evaluate_program(g, p)->answer.value, AnswerValue(TimeInterval{10, 20}));
  p.answer_mode = AnswerMode::Count;
  out = evaluate_program(g, p);
  EXPECT_EQ(out->answer.value, AnswerValue(std::uint64_t{2}));
  EXPECT_EQ(out->support_edges, (std::vector<EdgeId>{0, 1}));
}

TEST(Evaluate, DirectionAndTarget) {
  const auto g = toy_graph();
  auto p = seed_on("gallbladder", {hop()});
  p.hops[0].direction = Direction::AsSubject;
  EXPECT_FALSE(evaluate_program(g, p));
  p.hops[0].direction = Direction::AsObject;
  EXPECT_TRUE(evaluate_program(g, p));
  p.hops[0].target_category = Category::Anatomy;
  EXPECT_FALSE(evaluate_program(g, p));
}

TEST(Evaluate, BeforePrev) {
  const auto g = toy_graph();
  const auto p = seed_on("hook", {hop(), hop(TemporalConstraint::BeforePrev)});
  const auto out = evaluate_program(g, p);
  ASSERT_TRUE(out);
  EXPECT_EQ(g.node(out->terminal).track_id, "a");
  EXPECT_FALSE(evaluate_program(g, seed_on("hook", {hop(), hop(TemporalConstraint::AfterPrev)})));
}

TEST(Evaluate, MalformedProgramsAreEmpty) {
  const auto g = toy_graph();
  QueryProgram none;
  EXPECT_FALSE(evaluate_program(g, none));
  EXPECT_FALSE(evaluate_program(g, seed_on("grasper", {hop(TemporalConstraint::AfterPrev)})));
  EXPECT_FALSE(evaluate_program(g, seed_on("grasper", {}, AnswerMode::Count)));
}

TEST(Evaluate, TemporalConstraintSemantics) {
  EXPECT_TRUE(temporal_ok(TemporalConstraint::AfterPrev, {21, 30}, TimeInterval{10, 20}));
  EXPECT_FALSE(temporal_ok(TemporalConstraint::AfterPrev, {20, 30}, TimeInterval{10, 20}));
  EXPECT_TRUE(temporal_ok(TemporalConstraint::BeforePrev, {0, 9}, TimeInterval{10, 20}));
  EXPECT_FALSE(temporal_ok(TemporalConstraint::BeforePrev, {0, 10}, TimeInterval{10, 20}));
  EXPECT_TRUE(temporal_ok(TemporalConstraint::Any, {0, 10}, std::nullopt));
}

TEST(ProgramJson, RoundTrip) {
  auto p = seed_on("cystic_duct", {hop(), hop(TemporalConstraint::AfterPrev, HopOrdinal::Last,
                                               Predicate::Near)},
                   AnswerMode::Count);
  p.hops[1].target_category = Category::Instrument;
  p.hops[0].direction = Direction::AsObject;
  p.seed.category = Category::Anatomy;
  EXPECT_EQ(program_from_json(nlohmann::json::parse(to_json(p).dump())), p);
  for (const Answer& a : {Answer{AnswerMode::EntityClass, std::string("liver")},
                          Answer{AnswerMode::TimeSpan, TimeInterval{3, 9}},
                          Answer{AnswerMode::Count, std::uint64_t{4}}})
    EXPECT_EQ(answer_from_json(nlohmann::json::parse(to_json(a).dump())), a);
}
