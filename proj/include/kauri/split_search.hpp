#pragma once

#include "kauri/gains.hpp"
#include "kauri/stocks.hpp"
#include "kauri/types.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace kauri {

/// Leaf members sorted ascending by one feature (ties by sample index).
struct FeatureOrdering {
  std::vector<Index> nu;       // absolute sample indices
  std::vector<double> values;  // feature values in nu's order
  int feature = 0;
};

FeatureOrdering order_leaf(const Matrix& data, std::span<const Index> leaf, int feature);

/// alpha = sum of K(nu(l'), t) over l' < l, beta = sum over l' > l, with t = nu(l).
std::pair<double, double> alpha_beta(const FeatureOrdering& ordering, const Matrix& gram, Index position);

/// Running split stocks after the first `position` samples of the ordering
/// have moved to the left child.
struct SweepState {
  Index position = 0;
  double sl_self = 0.0;
  double sr_self = 0.0;
  Vector sl_cluster;
  Vector sr_cluster;
};

/// sl_self / sr_self after each sweep position (index l holds the state once
/// l + 1 samples moved left). Depends only on the leaf and the ordering, so
/// it can be reused while the leaf is unchanged.
struct SelfStockSweep {
  std::vector<double> left;
  std::vector<double> right;
};

SelfStockSweep self_stock_sweep(const FeatureOrdering& ordering, const Matrix& gram, double leaf_self);

struct SplitProposal {
  int leaf_id = -1;
  int feature = -1;
  double threshold = 0.0;
  int left_target = kNoTarget;
  int right_target = kNoTarget;
  double gain = 0.0;
  Index split_position = 0;  // number of ordered samples routed left
  MoveKind kind = MoveKind::None;

  bool is_noop() const { return kind == MoveKind::None; }
};

struct SweepOptions {
  SplitConstraints constraints;
  Index min_leaf_size = 1;
  // Called after every state update, evaluated or not. Test hook.
  std::function<void(const SweepState&)> observer;
  // Precomputed self stocks for this leaf and ordering; recomputed when null.
  const SelfStockSweep* self_stocks = nullptr;
};

/// Sweeps every threshold of one feature inside one leaf, updating the split
/// stocks with the alpha/beta recurrences, and keeps the best move. Gains are
/// only evaluated between strictly distinct feature values; the threshold is
/// the midpoint of the two values. Throws NoValidThreshold when the feature is
/// constant over the leaf, and returns a no-op proposal when nothing gains.
SplitProposal find_best_split(std::span<const Index> leaf, int leaf_id, int leaf_cluster,
                              const FeatureOrdering& ordering, const Matrix& gram,
                              const StockCache& cache, const SweepOptions& options);

}  // namespace kauri
