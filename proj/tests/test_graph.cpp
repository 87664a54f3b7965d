#include <gtest/gtest.h>

#include "support.hpp"

using namespace tkg;
using namespace testing_support;

TEST(BuildGraph, Empty) {
  const auto g = build_graph({}, DetectionConfig{});
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraph, ToyChain) {
  const auto g = toy_graph();
  ASSERT_EQ(g.node_count(), 3u);
  ASSERT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.node(0).track_id, "a");
  EXPECT_EQ(g.node(1).track_id, "b");
  EXPECT_EQ(g.node(2).track_id, "c");
  EXPECT_EQ(g.edge(0).predicate, Predicate::Touches);
  EXPECT_EQ(g.edge(0).interval, (TimeInterval{10, 20}));
  EXPECT_EQ(g.edge(0).subject, 0u);
  EXPECT_EQ(g.edge(0).object, 1u);
  EXPECT_EQ(g.edge(1).interval, (TimeInterval{30, 40}));
  EXPECT_EQ(g.edge(1).subject, 2u);
  EXPECT_EQ(g.edge(1).object, 1u);
  EXPECT_NO_THROW(g.validate());
}

TEST(BuildGraph, NeverSharingFrames) {
  std::vector<Tubelet> ts;
  for (int k = 0; k < 5; ++k) {
    Tubelet t{"v", "t" + std::to_string(k), "cls", Category::Anatomy, {}};
    for (Frame f = 10 * k; f < 10 * k + 5; ++f) t.boxes.push_back({f, {0.1, 0.1, 0.3, 0.3}});
    ts.push_back(t);
  }
  const auto g = build_graph(ts, DetectionConfig{});
  EXPECT_EQ(g.node_count(), 5u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(BuildGraph, EdgesMatchPairwiseOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    ScriptParams p;
    const auto ts = generate_scene(generate_random_script(p, seed), GeometryConfig{}, seed);
    const auto g = build_graph(ts, DetectionConfig{});
    std::set<OracleEdge> expect;
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        const auto part = oracle_detect(ts[i], ts[j], g.config());
        expect.insert(part.begin(), part.end());
      }
    std::set<OracleEdge> got;
    for (const auto& e : g.edges())
      got.insert({g.node(e.subject).track_id, g.node(e.object).track_id, e.predicate,
                  e.interval.start, e.interval.end});
    EXPECT_EQ(got, expect) << "seed " << seed;
  }
}

TEST(BuildGraph, ThreadCountDoesNotMatter) {
  ScriptParams p;
  p.n_instruments = 4;
  p.n_anatomy = 4;
  p.n_events = 12;
  const auto ts = generate_scene(generate_random_script(p, 77), GeometryConfig{}, 77);
  EXPECT_EQ(serialize_graph(build_graph(ts, DetectionConfig{}, 1)),
            serialize_graph(build_graph(ts, DetectionConfig{}, 8)));
}

TEST(BuildGraph, InputOrderDoesNotMatter) {
  ScriptParams p;
  auto ts = generate_scene(generate_random_script(p, 8), GeometryConfig{}, 8);
  const auto g1 = build_graph(ts, DetectionConfig{});
  std::reverse(ts.begin(), ts.end());
  EXPECT_EQ(build_graph(ts, DetectionConfig{}), g1);
}

TEST(GraphFile, ToyRoundTrip) {
  const auto g = toy_graph();
  EXPECT_EQ(deserialize_graph(serialize_graph(g)), g);
}

TEST(GraphFile, RandomRoundTrips) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = random_scene_graph(seed);
    const auto text = serialize_graph(g);
    const auto back = deserialize_graph(text);
    EXPECT_EQ(back, g) << "seed " << seed;
    EXPECT_EQ(serialize_graph(back), text);
  }
}

TEST(GraphFile, DanglingEdge) {
  auto j = nlohmann::json::parse(serialize_graph(toy_graph()));
  j["edges"][0]["object"] = 99;
  try {
    deserialize_graph(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvariantViolation);
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos);
  }
}

TEST(GraphFile, Malformed) {
  auto expect_code = [](const std::string& text, ErrorCode code) {
    try {
      deserialize_graph(text);
      ADD_FAILURE() << "accepted " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code) << text;
    }
  };
  expect_code("not json", ErrorCode::MalformedGraphFile);
  expect_code("{}", ErrorCode::MalformedGraphFile);
  auto j = nlohmann::json::parse(serialize_graph(toy_graph()));
  j["edges"][1]["interval"] = {50, 45};
  expect_code(j.dump(), ErrorCode::InvariantViolation);
  j = nlohmann::json::parse(serialize_graph(toy_graph()));
  j["edges"][0]["subject"] = j["edges"][0]["object"];
  expect_code(j.dump(), ErrorCode::InvariantViolation);
  j = nlohmann::json::parse(serialize_graph(toy_graph()));
  j["edges"][0]["interval"] = {0, 70};
  expect_code(j.dump(), ErrorCode::InvariantViolation);
}

TEST(GraphView, IncidentEdges) {
  const auto g = toy_graph();
  std::vector<EdgeId> seen;
  g.for_each_incident(1, [&](const InteractionEdge& e) { seen.push_back(e.edge_id); });
  EXPECT_EQ(seen, (std::vector<EdgeId>{0, 1}));
  const SubgraphView view(g, {0, 1}, {0});
  seen.clear();
  view.for_each_incident(1, [&](const InteractionEdge& e) { seen.push_back(e.edge_id); });
  EXPECT_EQ(seen, (std::vector<EdgeId>{0}));
}
