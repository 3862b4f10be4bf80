#include "kauri/split_search.hpp"

#include "kauri/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace kauri {

FeatureOrdering order_leaf(const Matrix& data, std::span<const Index> leaf, int feature) {
  if (feature < 0 || feature >= data.cols())
    throw Error(ErrorCode::IndexOutOfRange, "feature " + std::to_string(feature) + " out of range");
  FeatureOrdering ordering;
  ordering.feature = feature;
  ordering.nu.assign(leaf.begin(), leaf.end());
  std::stable_sort(ordering.nu.begin(), ordering.nu.end(), [&](Index a, Index b) {
    const double va = data(a, feature);
    const double vb = data(b, feature);
    return va < vb || (va == vb && a < b);
  });
  ordering.values.reserve(ordering.nu.size());
  for (Index i : ordering.nu) ordering.values.push_back(data(i, feature));
  return ordering;
}

std::pair<double, double> alpha_beta(const FeatureOrdering& ordering, const Matrix& gram, Index position) {
  const auto size = static_cast<Index>(ordering.nu.size());
  if (position < 0 || position >= size)
    throw Error(ErrorCode::IndexOutOfRange, "sweep position " + std::to_string(position) + " out of range");
  const Index t = ordering.nu[static_cast<std::size_t>(position)];
  const auto column = gram.col(t);
  double alpha = 0.0;
  double beta = 0.0;
  for (Index l = 0; l < position; ++l) alpha += column(ordering.nu[static_cast<std::size_t>(l)]);
  for (Index l = position + 1; l < size; ++l) beta += column(ordering.nu[static_cast<std::size_t>(l)]);
  return {alpha, beta};
}

SelfStockSweep self_stock_sweep(const FeatureOrdering& ordering, const Matrix& gram, double leaf_self) {
  const auto size = static_cast<Index>(ordering.nu.size());
  SelfStockSweep sweep;
  sweep.left.reserve(ordering.nu.size());
  sweep.right.reserve(ordering.nu.size());
  double left = 0.0;
  double right = leaf_self;
  for (Index l = 0; l + 1 < size; ++l) {
    const Index t = ordering.nu[static_cast<std::size_t>(l)];
    const auto [alpha, beta] = alpha_beta(ordering, gram, l);
    left += 2.0 * alpha + gram(t, t);
    right -= 2.0 * beta + gram(t, t);
    sweep.left.push_back(left);
    sweep.right.push_back(right);
  }
  return sweep;
}

SplitProposal find_best_split(std::span<const Index> leaf, int leaf_id, int leaf_cluster,
                              const FeatureOrdering& ordering, const Matrix& gram,
                              const StockCache& cache, const SweepOptions& options) {
  const auto size = static_cast<Index>(leaf.size());
  if (size < 2 || static_cast<Index>(ordering.nu.size()) != size)
    throw Error(ErrorCode::NoValidThreshold, "leaf must hold at least two ordered samples");
  if (ordering.values.front() == ordering.values.back())
    throw Error(ErrorCode::NoValidThreshold,
                "feature " + std::to_string(ordering.feature) + " is constant over leaf " + std::to_string(leaf_id));

  const ClusterStats stats = ClusterStats::from_cache(cache);
  const Index clusters = cache.omega.rows();
  const auto lambda_row = cache.lambda.row(leaf_id);

  SplitStocks stocks;
  stocks.parent_cluster = leaf_cluster;
  stocks.parent_cluster_size_excl_leaf = cache.cluster_sizes[static_cast<std::size_t>(leaf_cluster)] - size;
  stocks.leaf_self = 0.0;
  stocks.leaf_cluster = Vector::Zero(clusters);
  for (Index i : leaf) {
    stocks.leaf_self += lambda_row(i);
    stocks.leaf_cluster += cache.omega.col(i);
  }

  SweepState state;
  state.sl_self = 0.0;
  state.sr_self = stocks.leaf_self;
  state.sl_cluster = Vector::Zero(clusters);
  state.sr_cluster = stocks.leaf_cluster;

  SplitProposal best;
  best.leaf_id = leaf_id;
  best.feature = ordering.feature;

  const SelfStockSweep* precomputed = options.self_stocks;
  if (precomputed && static_cast<Index>(precomputed->left.size()) != size - 1)
    throw Error(ErrorCode::DimensionMismatch, "precomputed sweep does not match the leaf");

  for (Index l = 0; l + 1 < size; ++l) {
    const Index t = ordering.nu[static_cast<std::size_t>(l)];
    if (precomputed) {
      state.sl_self = precomputed->left[static_cast<std::size_t>(l)];
      state.sr_self = precomputed->right[static_cast<std::size_t>(l)];
    } else {
      const auto [alpha, beta] = alpha_beta(ordering, gram, l);
      const double diag = gram(t, t);
      state.sl_self += 2.0 * alpha + diag;
      state.sr_self -= 2.0 * beta + diag;
    }
    state.sl_cluster += cache.omega.col(t);
    state.sr_cluster -= cache.omega.col(t);
    state.position = l + 1;
    if (options.observer) options.observer(state);

    const Index left_size = l + 1;
    const Index right_size = size - left_size;
    const double lo = ordering.values[static_cast<std::size_t>(l)];
    const double hi = ordering.values[static_cast<std::size_t>(l + 1)];
    if (!(lo < hi) || left_size < options.min_leaf_size || right_size < options.min_leaf_size) continue;

    stocks.sl_self = state.sl_self;
    stocks.sr_self = state.sr_self;
    stocks.sl_size = left_size;
    stocks.sr_size = right_size;
    stocks.sl_cluster = state.sl_cluster;
    stocks.sr_cluster = state.sr_cluster;

    const GainResult result = compute_splits(stocks, stats, options.constraints);
    if (!result.is_noop() && result.gain > best.gain) {
      best.gain = result.gain;
      best.left_target = result.left_target;
      best.right_target = result.right_target;
      best.kind = result.kind;
      best.split_position = left_size;
      // Routing is "value < threshold", so the threshold must satisfy lo < t <= hi.
      const double mid = lo + 0.5 * (hi - lo);
      best.threshold = mid > lo ? mid : hi;
    }
  }
  return best;
}

}  // namespace kauri
