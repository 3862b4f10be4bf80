#include "kauri/errors.hpp"
#include "kauri/gains.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace kauri;

namespace {

struct Instance {
  Matrix gram;
  std::vector<int> labels;  // dense cluster ids, all clusters populated
  std::vector<Index> left, right;
  int kp = 0;
  int clusters = 1;
  ClusterStats stats;
  SplitStocks stocks;
};

std::vector<Index> members_of(const std::vector<int>& labels, int k) {
  std::vector<Index> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == k) out.push_back(static_cast<Index>(i));
  return out;
}

void fill_stocks(Instance& in) {
  const Matrix& g = in.gram;
  in.stats.self_stock = Vector::Zero(in.clusters);
  in.stats.sizes.assign(static_cast<std::size_t>(in.clusters), 0);
  std::vector<Index> leaf(in.left);
  leaf.insert(leaf.end(), in.right.begin(), in.right.end());
  in.stocks = SplitStocks{};
  in.stocks.sl_cluster = Vector::Zero(in.clusters);
  in.stocks.sr_cluster = Vector::Zero(in.clusters);
  in.stocks.leaf_cluster = Vector::Zero(in.clusters);
  for (int k = 0; k < in.clusters; ++k) {
    const auto ck = members_of(in.labels, k);
    in.stats.self_stock(k) = kernel_stock(ck, ck, g);
    in.stats.sizes[static_cast<std::size_t>(k)] = static_cast<Index>(ck.size());
    in.stocks.sl_cluster(k) = kernel_stock(in.left, ck, g);
    in.stocks.sr_cluster(k) = kernel_stock(in.right, ck, g);
    in.stocks.leaf_cluster(k) = kernel_stock(leaf, ck, g);
  }
  in.stocks.sl_self = kernel_stock(in.left, in.left, g);
  in.stocks.sr_self = kernel_stock(in.right, in.right, g);
  in.stocks.leaf_self = kernel_stock(leaf, leaf, g);
  in.stocks.sl_size = static_cast<Index>(in.left.size());
  in.stocks.sr_size = static_cast<Index>(in.right.size());
  in.stocks.parent_cluster = in.kp;
  in.stocks.parent_cluster_size_excl_leaf = in.stats.sizes[static_cast<std::size_t>(in.kp)] - static_cast<Index>(leaf.size());
}

// Random clusters over n samples; the leaf is a random subset of cluster kp
// split into two non-empty children.
Instance random_instance(oracle::Gen& gen, int kernel) {
  Instance in;
  const Index n = gen.integer(3, 25);
  in.clusters = gen.integer(1, static_cast<int>(std::min<Index>(4, n - 1)));
  const Matrix x = gen.data(n, gen.integer(1, 4), 20);
  in.gram = compute_kernel(x, gen.kernel(kernel));
  in.labels.resize(static_cast<std::size_t>(n));
  // Make cluster 0 at least two samples so it can hold a split leaf.
  for (Index i = 0; i < n; ++i)
    in.labels[static_cast<std::size_t>(i)] = i < 2 ? 0 : i < in.clusters + 1 ? static_cast<int>(i) - 1 : gen.integer(0, in.clusters - 1);
  std::vector<int> candidates;
  for (int k = 0; k < in.clusters; ++k)
    if (members_of(in.labels, k).size() >= 2) candidates.push_back(k);
  in.kp = candidates[static_cast<std::size_t>(gen.integer(0, static_cast<int>(candidates.size()) - 1))];
  auto ck = members_of(in.labels, in.kp);
  std::shuffle(ck.begin(), ck.end(), gen.rng);
  const int leaf_size = gen.integer(2, static_cast<int>(ck.size()));
  const int left_size = gen.integer(1, leaf_size - 1);
  in.left.assign(ck.begin(), ck.begin() + left_size);
  in.right.assign(ck.begin() + left_size, ck.begin() + leaf_size);
  fill_stocks(in);
  return in;
}

double delta(const Instance& in, int left_target, int right_target) {
  return oracle::objective(in.gram, oracle::apply_move(in.labels, in.left, in.right, left_target, right_target)) -
         oracle::objective(in.gram, in.labels);
}

double tolerance(const Instance& in) {
  return 1e-8 * std::max(1.0, std::abs(oracle::objective(in.gram, in.labels)));
}

}  // namespace

TEST(Gains, EveryMoveFormulaMatchesObjectiveDelta) {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 300; ++trial) {
    const Instance in = random_instance(gen, trial);
    const Index outside = in.stocks.parent_cluster_size_excl_leaf;
    const double tol = tolerance(in);

    EXPECT_NEAR(star_gain(in.stocks, Side::Left, in.stats), delta(in, kNewCluster1, in.kp), tol);
    EXPECT_NEAR(star_gain(in.stocks, Side::Right, in.stats), delta(in, in.kp, kNewCluster1), tol);
    if (outside >= 1) {
      const SplitConstraints wide{in.clusters, in.clusters + 2};
      EXPECT_NEAR(double_star_gain(in.stocks, in.stats, wide), delta(in, kNewCluster1, kNewCluster2), tol);
    }
    for (int k = 0; k < in.clusters; ++k) {
      if (k == in.kp) continue;
      EXPECT_NEAR(switch_gain(in.stocks, Side::Left, k, in.stats), delta(in, k, in.kp), tol);
      EXPECT_NEAR(switch_gain(in.stocks, Side::Right, k, in.stats), delta(in, in.kp, k), tol);
      for (int k2 = 0; k2 < in.clusters && outside >= 1; ++k2) {
        if (k2 == in.kp || k2 == k) continue;
        EXPECT_NEAR(reallocation_gain(in.stocks, k, k2, in.stats), delta(in, k, k2), tol);
      }
    }
  }
}

TEST(Gains, ComputeSplitsGainEqualsAppliedDeltaAndIsOptimal) {
  oracle::Gen gen(202);
  for (int trial = 0; trial < 300; ++trial) {
    const Instance in = random_instance(gen, trial);
    const SplitConstraints limits{in.clusters, in.clusters + gen.integer(0, 2)};
    const GainResult result = compute_splits(in.stocks, in.stats, limits);
    std::vector<int> in_use(static_cast<std::size_t>(in.clusters));
    std::iota(in_use.begin(), in_use.end(), 0);
    double best = 0.0;
    for (const auto& m : oracle::legal_moves(in.kp, in_use, in.stocks.parent_cluster_size_excl_leaf, limits.k_max))
      best = std::max(best, delta(in, m.left_target, m.right_target));
    const double tol = tolerance(in);
    if (result.is_noop()) {
      EXPECT_LE(best, tol);
      EXPECT_EQ(result.gain, 0.0);
    } else {
      EXPECT_GT(result.gain, 0.0);
      EXPECT_NEAR(result.gain, delta(in, result.left_target, result.right_target), tol);
      EXPECT_NEAR(result.gain, best, tol);
    }
  }
}

TEST(Gains, NewClustersRespectBudget) {
  oracle::Gen gen(303);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_instance(gen, trial);
    const GainResult result = compute_splits(in.stocks, in.stats, {in.clusters, in.clusters});
    EXPECT_NE(result.left_target, kNewCluster1);
    EXPECT_NE(result.right_target, kNewCluster1);
    EXPECT_NE(result.right_target, kNewCluster2);
  }
}

TEST(Gains, TwoSeparatedPairsPreferStar) {
  // Points {0, 0.1} and {10, 10.1} in one cluster: splitting them apart gains.
  Matrix x(4, 1);
  x << 0, 0.1, 10, 10.1;
  Instance in;
  in.gram = x * x.transpose();
  in.labels = {0, 0, 0, 0};
  in.left = {0, 1};
  in.right = {2, 3};
  in.clusters = 1;
  fill_stocks(in);
  const GainResult result = compute_splits(in.stocks, in.stats, {1, 2});
  EXPECT_EQ(result.kind, MoveKind::Star);
  EXPECT_NEAR(result.gain, delta(in, result.left_target, result.right_target), 1e-10);
  // Tie between left and right star resolves to the left side.
  EXPECT_EQ(result.left_target, kNewCluster1);
}

TEST(Gains, ZeroGainIsNoOp) {
  Instance in;
  in.gram = Matrix::Ones(4, 4);
  in.labels = {0, 0, 0, 0};
  in.left = {0, 1};
  in.right = {2, 3};
  fill_stocks(in);
  const GainResult result = compute_splits(in.stocks, in.stats, {1, 3});
  EXPECT_TRUE(result.is_noop());
}

TEST(Gains, Errors) {
  oracle::Gen gen(404);
  Instance in = random_instance(gen, 0);
  while (in.clusters < 2) in = random_instance(gen, 0);
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  EXPECT_EQ(code([&] { switch_gain(in.stocks, Side::Left, in.kp, in.stats); }), ErrorCode::SameCluster);
  EXPECT_EQ(code([&] { double_star_gain(in.stocks, in.stats, {in.clusters, in.clusters + 1}); }),
            ErrorCode::ClusterBudgetExceeded);
  const int other = in.kp == 0 ? 1 : 0;
  EXPECT_EQ(code([&] { reallocation_gain(in.stocks, other, other, in.stats); }), ErrorCode::SameCluster);

  // Whole cluster is the leaf: moving both children would empty it.
  Instance whole;
  whole.gram = Matrix::Identity(4, 4);
  whole.labels = {0, 0, 1, 2};
  whole.left = {0};
  whole.right = {1};
  whole.clusters = 3;
  fill_stocks(whole);
  EXPECT_EQ(code([&] { reallocation_gain(whole.stocks, 1, 2, whole.stats); }), ErrorCode::WouldEmptySourceCluster);
  EXPECT_EQ(code([&] { double_star_gain(whole.stocks, whole.stats, {3, 5}); }), ErrorCode::WouldEmptySourceCluster);
  whole.stats.sizes[2] = 0;
  EXPECT_EQ(code([&] { switch_gain(whole.stocks, Side::Left, 2, whole.stats); }), ErrorCode::EmptyClusterInUse);
}
