// Randomised properties across modules, driven by the hand-rolled generator.
#include "kauri/baselines.hpp"
#include "kauri/metrics.hpp"
#include "kauri/stocks.hpp"
#include "kauri/tree.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace kauri;

TEST(Properties, TrainingIsDeterministic) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = gen.data(gen.integer(2, 60), gen.integer(1, 3), 20);
    const Matrix g = compute_kernel(x, gen.kernel(trial));
    TrainConfig config;
    config.k_max = gen.integer(2, 4);
    if (config.k_max > x.rows()) continue;
    const TrainResult a = train(x, g, config);
    const TrainResult b = train(x, g, config);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(export_tree_json(a.tree), export_tree_json(b.tree));
    EXPECT_EQ(a.final_objective, b.final_objective);
  }
}

TEST(Properties, AssignmentsStayConsistentDuringTraining) {
  oracle::Gen gen(12);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = gen.integer(2, 50);
    const Matrix x = gen.data(n, gen.integer(1, 4), 15);
    const Matrix g = compute_kernel(x, gen.kernel(trial));
    TrainConfig config;
    config.k_max = gen.integer(2, 5);
    if (config.k_max > n) continue;
    config.on_iteration = [&](const Assignments& a, const StockCache& cache) {
      EXPECT_NO_THROW(a.validate());
      // Every sample in exactly one leaf, every leaf in exactly one cluster,
      // and every cluster in use holds at least one leaf.
      EXPECT_EQ(static_cast<Index>(a.leaf_of_sample.size()), n);
      std::set<int> used(a.cluster_of_leaf.begin(), a.cluster_of_leaf.end());
      EXPECT_EQ(static_cast<int>(used.size()), cache.num_clusters_in_use());
      const auto members = a.leaf_members();
      for (const auto& leaf : members) EXPECT_FALSE(leaf.empty());
    };
    const TrainResult r = train(x, g, config);
    EXPECT_LE(r.num_clusters(), config.k_max);
    EXPECT_EQ(static_cast<int>(std::set<int>(r.labels.begin(), r.labels.end()).size()), r.num_clusters());
  }
}

TEST(Properties, AriEqualsPairCountingOnLargerInputs) {
  oracle::Gen gen(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = gen.integer(2, 80);
    const std::vector<int> a = gen.labels(n, gen.integer(1, 8));
    const std::vector<int> b = gen.labels(n, gen.integer(1, 8));
    EXPECT_NEAR(ari(a, b), oracle::ari_pairs(a, b), 1e-10);
  }
}

TEST(Properties, ScoreAndObjectiveSumToTrace) {
  oracle::Gen gen(14);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = gen.integer(1, 40);
    const Matrix g = compute_kernel(gen.data(n, 3, 50), gen.kernel(trial));
    const std::vector<int> labels = gen.labels(n, gen.integer(1, 6));
    const double total = partition_kmeans_score(g, labels) + oracle::objective(g, labels);
    EXPECT_NEAR(total, g.trace(), 1e-9 * std::max(1.0, std::abs(g.trace())));
  }
}

TEST(Properties, LinearScoreIsCentroidDispersion) {
  oracle::Gen gen(15);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = gen.integer(1, 40);
    const Matrix x = gen.data(n, gen.integer(1, 4), 50);
    const std::vector<int> labels = gen.labels(n, gen.integer(1, 5));
    EXPECT_NEAR(partition_kmeans_score(x * x.transpose(), labels), oracle::centroid_css(x, labels), 1e-9);
  }
}

TEST(Properties, SeededKernelKMeansRepeats) {
  oracle::Gen gen(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g = compute_kernel(gen.data(30, 2, 50), gen.kernel(trial));
    KernelKMeansOptions o;
    o.k = gen.integer(1, 5);
    o.seed = static_cast<std::uint64_t>(trial);
    EXPECT_EQ(kernel_kmeans(g, o).labels, kernel_kmeans(g, o).labels);
  }
}

TEST(Properties, ImportedTreePredictsLikeOriginal) {
  oracle::Gen gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = gen.data(gen.integer(4, 50), gen.integer(1, 3), 1000);
    TrainConfig config;
    config.k_max = 3;
    if (config.k_max > x.rows()) continue;
    const TrainResult r = train(x, compute_kernel(x, gen.kernel(trial)), config);
    const Tree back = import_tree(export_tree_json(r.tree));
    EXPECT_EQ(predict(back, x), r.labels);
    const Matrix fresh = gen.data(30, x.cols(), 1000);
    EXPECT_EQ(predict(back, fresh), predict(r.tree, fresh));
  }
}
