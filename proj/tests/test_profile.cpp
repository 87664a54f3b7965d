#include <gtest/gtest.h>

#include "support.hpp"

using namespace tkg;

namespace {

QASample spanned(std::uint64_t id, std::size_t depth, TimeInterval span) {
  QASample s;
  s.sample_id = id;
  s.designed_depth = depth;
  s.template_id = "t" + std::to_string(depth);
  s.evidence.span = span;
  s.program.seed.class_label = "grasper";
  TraverseOp op;
  op.predicate = depth % 2 ? Predicate::Touches : Predicate::Near;
  s.program.hops.assign(depth, op);
  s.answer = {AnswerMode::TimeSpan, span};
  return s;
}

}  // namespace

TEST(Profile, PerDepthCounts) {
  const auto st = profile_dataset({spanned(0, 1, {0, 4}), spanned(1, 1, {0, 4}),
                                   spanned(2, 2, {0, 4}), spanned(3, 3, {0, 4})});
  EXPECT_EQ(st.per_depth, (std::map<std::size_t, std::size_t>{{1, 2}, {2, 1}, {3, 1}}));
  EXPECT_EQ(st.per_predicate.at("touches"), 3u);
  EXPECT_EQ(st.per_predicate.at("near"), 1u);
  EXPECT_EQ(st.size, 4u);
}

TEST(Profile, SpanStatistics) {
  const auto st = profile_dataset({spanned(0, 1, {10, 20}), spanned(1, 2, {10, 20})});
  EXPECT_DOUBLE_EQ(st.span_length.mean, 11.0);
  EXPECT_DOUBLE_EQ(st.span_length.median, 11.0);
  EXPECT_EQ(st.span_length.min, 11);
  EXPECT_EQ(st.span_length.max, 11);
}

TEST(Profile, FamiliesSumToSize) {
  const auto g = testing_support::random_scene_graph(4);
  SynthesisPlan plan;
  plan.quotas = {0, 7, 6, 5, 0};
  const auto r = synthesize_dataset(g, plan, builtin_templates(), 8);
  const auto st = profile_dataset(r.samples);
  auto sum = [](const auto& m) {
    std::size_t t = 0;
    for (const auto& [k, v] : m) t += v;
    return t;
  };
  EXPECT_EQ(sum(st.per_depth), r.samples.size());
  EXPECT_EQ(sum(st.per_template), r.samples.size());
  EXPECT_EQ(sum(st.per_predicate), r.samples.size());
  EXPECT_EQ(sum(st.per_answer_kind), r.samples.size());
  EXPECT_GT(st.classes_covered.size(), 0u);
  const auto doc = nlohmann::json::parse(stats_document(st));
  EXPECT_EQ(doc["size"], r.samples.size());
}

TEST(Profile, EmptyDataset) { EXPECT_THROW(profile_dataset({}), Error); }

TEST(Grounding, PerfectPredictions) {
  std::vector<QASample> ds = {spanned(0, 1, {0, 9}), spanned(1, 2, {5, 30}), spanned(2, 1, {7, 7})};
  std::vector<Prediction> preds;
  for (const auto& s : ds) preds.push_back({s.sample_id, *s.evidence.span});
  const auto m = evaluate_predictions(ds, preds);
  EXPECT_DOUBLE_EQ(m.mean_tiou, 1.0);
  for (const auto& [t, r] : m.recall_at_1) EXPECT_DOUBLE_EQ(r, 1.0);
  EXPECT_EQ(m.n_scored, 3u);
}

TEST(Grounding, NoPredictions) {
  std::vector<QASample> ds = {spanned(0, 1, {0, 9}), spanned(1, 2, {5, 30})};
  const auto m = evaluate_predictions(ds, {});
  EXPECT_DOUBLE_EQ(m.mean_tiou, 0.0);
  for (const auto& [t, r] : m.recall_at_1) EXPECT_DOUBLE_EQ(r, 0.0);
  EXPECT_EQ(m.n_scored, ds.size());
}

TEST(Grounding, HalfAndHalf) {
  std::vector<QASample> ds = {spanned(0, 1, {0, 9}), spanned(1, 2, {20, 30})};
  const auto m = evaluate_predictions(ds, {{0, {0, 9}}, {1, {40, 50}}});
  EXPECT_DOUBLE_EQ(m.mean_tiou, 0.5);
  EXPECT_DOUBLE_EQ(m.recall(0.5), 0.5);
}

TEST(Grounding, RecallMonotoneInThreshold) {
  std::vector<QASample> ds;
  std::vector<Prediction> preds;
  for (std::uint64_t i = 0; i < 40; ++i) {
    ds.push_back(spanned(i, 1, {10, 30}));
    preds.push_back({i, {static_cast<Frame>(i), static_cast<Frame>(i + 20)}});
  }
  const auto m = evaluate_predictions(ds, preds, {0.1, 0.3, 0.5, 0.7, 0.9});
  for (std::size_t k = 1; k < m.recall_at_1.size(); ++k)
    EXPECT_LE(m.recall_at_1[k].second, m.recall_at_1[k - 1].second);
}

TEST(Grounding, Errors) {
  std::vector<QASample> ds = {spanned(0, 1, {0, 9})};
  try {
    evaluate_predictions(ds, {{5, {0, 1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownSampleId);
  }
  try {
    evaluate_predictions(ds, {{0, {0, 1}}, {0, {0, 2}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicatePrediction);
  }
}

TEST(Predictions, RoundTrip) {
  const std::vector<Prediction> p = {{3, {1, 9}}, {0, {4, 4}}};
  const auto back = parse_predictions(write_predictions(p));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].sample_id, 3u);
  EXPECT_EQ(back[1].span, (TimeInterval{4, 4}));
  EXPECT_THROW(parse_predictions("{\"sample_id\":1,\"span\":[5,2]}\n"), Error);
}
