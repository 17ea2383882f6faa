#include "ideoemb/generator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "ideoemb/errors.hpp"

namespace ideoemb {
namespace {

GenConfig small_config(std::size_t items, double p, std::uint64_t seed) {
  GenConfig cfg;
  cfg.items = items;
  cfg.polarization = p;
  cfg.rng_seed = seed;
  cfg.graph = GraphSpec::parse("complete:100");
  return cfg;
}

TEST(GraphSpec, ParseAndPrint) {
  EXPECT_EQ(GraphSpec::parse("complete:100").to_string(), "complete:100");
  const auto ba = GraphSpec::parse("ba:100:10");
  EXPECT_EQ(ba.kind, GraphSpec::Kind::kBarabasiAlbert);
  EXPECT_EQ(ba.attach, 10u);
  EXPECT_THROW(GraphSpec::parse("ring:5"), ValidationError);
  EXPECT_THROW(GraphSpec::parse("complete:x"), ValidationError);
  EXPECT_THROW(GraphSpec::parse("complete:0"), ValidationError);
}

TEST(GenConfig, Validation) {
  GenConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.items = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.polarization = 0.0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.q = {1.0, -1.0, 1.0, 1.0};
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(DrawEmbeddings, InterestPriorGivesNinetyTwoPercentAboveHalf) {
  GenConfig cfg;
  cfg.topics = 1;
  Rng rng(1);
  const auto emb = draw_embeddings(cfg, 100000, rng);
  const auto theta = emb.theta_data();
  const double frac = std::count_if(theta.begin(), theta.end(), [](double x) { return x > 0.5; }) / 1e5;
  // P(Beta(0.9, 0.1) > 0.5) = 0.92274.
  EXPECT_NEAR(frac, 0.9227, 0.01);
}

TEST(DrawEmbeddings, PolarizationShapesPhi) {
  for (double p : {1.0, 16.0}) {
    GenConfig cfg;
    cfg.topics = 1;
    cfg.polarization = p;
    Rng rng(2);
    const auto emb = draw_embeddings(cfg, 100000, rng);
    const auto phi = emb.phi_data();
    const double mean = std::accumulate(phi.begin(), phi.end(), 0.0) / 1e5;
    const double middle = std::count_if(phi.begin(), phi.end(), [](double x) { return x > 0.1 && x < 0.9; }) / 1e5;
    EXPECT_NEAR(mean, 0.5, 0.01);
    // Beta(1,1) puts 0.8 of its mass in [0.1, 0.9]; Beta(1/16,1/16) puts 0.12386.
    EXPECT_NEAR(middle, p == 1.0 ? 0.8 : 0.12386, 0.01);
  }
}

TEST(DrawEmbeddings, DeterministicUnderSeed) {
  GenConfig cfg;
  Rng a(5), b(5);
  EXPECT_EQ(draw_embeddings(cfg, 50, a), draw_embeddings(cfg, 50, b));
}

TEST(DrawItemTopics, SparsePriorAndDegenerateSimplex) {
  GenConfig cfg;
  Rng rng(3);
  std::vector<double> mean(4, 0.0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto it = draw_item_topics(cfg, 0, rng);
    const auto g = it.gamma();
    ASSERT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-9);
    for (int k = 0; k < 4; ++k) mean[k] += g[k] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.25, 3 * std::sqrt(0.125 / n));

  cfg.topics = 1;
  const auto one = draw_item_topics(cfg, 0, rng);
  EXPECT_EQ(one.gamma().size(), 1u);
  EXPECT_EQ(one[0], 1.0);
}

TEST(SimulateCascade, ZeroInterestStopsAtSeed) {
  const auto g = complete_graph(20);
  const EmbeddingTable emb(20, 2, 0.0);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(simulate_cascade(g, ItemTopics(0, {0.5, 0.5}), emb, rng).size(), 1u);
}

TEST(SimulateCascade, FullAdoptionInOneRound) {
  const auto g = complete_graph(30);
  const EmbeddingTable emb(30, 1, 1.0);
  Rng rng(1);
  const auto c = simulate_cascade(g, ItemTopics(0, {1.0}), emb, rng);
  ASSERT_EQ(c.size(), 30u);
  for (std::size_t j = 1; j < c.size(); ++j) EXPECT_EQ(c[j].t, 1);
}

TEST(SimulateCascade, RoundOneFractionMatchesAlignment) {
  // theta = 1, phi = c everywhere: each exposure succeeds with c^2 + (1-c)^2.
  const auto g = complete_graph(20);
  for (double c : {0.5, 0.8}) {
    const EmbeddingTable emb(20, 1, std::vector<double>(20, 1.0), std::vector<double>(20, c));
    Rng rng(7);
    double activated = 0.0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) activated += simulate_cascade(g, ItemTopics(0, {1.0}), emb, rng).size() - 1;
    EXPECT_NEAR(activated / (19.0 * trials), c * c + (1 - c) * (1 - c), 0.02);
  }
}

TEST(SimulateCascade, CausalSupportAndAttribution) {
  GenConfig cfg;
  cfg.graph = GraphSpec::parse("ba:100:3");
  const auto g = make_graph(cfg.graph, 4);
  Rng rng(4);
  const auto emb = draw_embeddings(cfg, g.node_count(), rng);
  std::vector<NodeId> exposers;
  for (ItemId i = 0; i < 500; ++i) {
    const auto gamma = draw_item_topics(cfg, i, rng);
    const auto c = simulate_cascade(g, gamma, emb, rng, &exposers);
    ASSERT_EQ(exposers.size(), c.size());
    std::vector<Timestamp> t(g.node_count(), -1);
    for (const auto& a : c) {
      ASSERT_EQ(t[a.node], -1) << "node activated twice";
      t[a.node] = a.t;
    }
    EXPECT_EQ(c.front().t, 0);
    for (std::size_t j = 1; j < c.size(); ++j) {
      EXPECT_GT(c[j].t, 0);
      const NodeId v = exposers[j];
      EXPECT_TRUE(g.has_edge(v, c[j].node));
      EXPECT_EQ(t[v], c[j].t - 1) << "exposer was not newly active in the previous round";
    }
  }
}

TEST(GenerateDataset, CountDeterminismAndThreads) {
  const auto cfg = small_config(1000, 4.0, 7);
  const auto a = generate_dataset(cfg);
  const auto b = generate_dataset(cfg);
  const auto c = generate_dataset(cfg, 4);
  EXPECT_EQ(a.items.size(), 1000u);
  EXPECT_EQ(a.log.item_count(), 1000u);
  for (const auto* other : {&b, &c}) {
    EXPECT_TRUE(std::equal(a.log.all().begin(), a.log.all().end(), other->log.all().begin(), other->log.all().end()));
    EXPECT_EQ(a.truth, other->truth);
    for (std::size_t i = 0; i < a.items.size(); ++i)
      EXPECT_TRUE(std::equal(a.items[i].gamma().begin(), a.items[i].gamma().end(), other->items[i].gamma().begin()));
  }
  for (ItemId i : a.singleton_items) EXPECT_EQ(a.log.cascade(i).size(), 1u);
  for (ItemId i = 0; i < 1000; ++i) EXPECT_GE(a.log.cascade(i).size(), 1u);
}

TEST(GenerateDataset, SingletonCascadesAreFlagged) {
  auto cfg = small_config(200, 4.0, 3);
  cfg.alpha = 0.05;
  cfg.beta = 5.0;
  const auto ds = generate_dataset(cfg);
  EXPECT_FALSE(ds.singleton_items.empty());
  std::size_t singles = 0;
  for (ItemId i = 0; i < 200; ++i) singles += ds.log.cascade(i).size() == 1 ? 1 : 0;
  EXPECT_EQ(singles, ds.singleton_items.size());
}

// Every exposure succeeds with probability E[theta] * 1/2 whatever p is,
// because an exposed node's polarity is independent of its exposer's
// (E[phi] = 1/2). On the complete graph the mean size is 1 + 99 * 0.9 / 2;
// polarization leaves it unchanged.
TEST(GenerateDataset, MeanCascadeSizeIgnoresPolarization) {
  for (double p : {1.0, 4.0, 16.0}) {
    const auto ds = generate_dataset(small_config(4000, p, 11));
    const double mean = static_cast<double>(ds.log.size()) / 4000;
    EXPECT_NEAR(mean, 1 + 99 * 0.45, 3.0) << "p = " << p;
  }
}

// Alignment depends on phi only through p(u,v,k), which a per-topic flip
// leaves unchanged, so the simulated log is identical.
TEST(GenerateDataset, FlippedTruthReproducesTheLog) {
  GenConfig cfg;
  cfg.items = 500;
  cfg.graph = GraphSpec::parse("ba:60:4");
  const auto a = generate_dataset(cfg);
  auto flipped = a.truth;
  flipped.flip_polarity(3);
  const auto b = generate_dataset(cfg, flipped);
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log.all()[i].node, b.log.all()[i].node);
    EXPECT_EQ(a.log.all()[i].t, b.log.all()[i].t);
  }
  EXPECT_THROW(generate_dataset(cfg, EmbeddingTable(10, 4)), ShapeError);
}

}  // namespace
}  // namespace ideoemb
