#pragma once

#include "kauri/stocks.hpp"
#include "kauri/types.hpp"

#include <string_view>
#include <vector>

namespace kauri {

enum class Side { Left, Right };

enum class MoveKind { None, Star, DoubleStar, Switch, Reallocation };

std::string_view to_string(MoveKind kind);

// Target sentinels. Brand-new clusters are resolved to concrete ids when a
// proposal is applied.
inline constexpr int kNoTarget = -1;
inline constexpr int kNewCluster1 = -2;
inline constexpr int kNewCluster2 = -3;

/// Per-cluster self stocks sigma(C_k^2) and sizes |C_k|.
struct ClusterStats {
  Vector self_stock;
  std::vector<Index> sizes;

  static ClusterStats from_cache(const StockCache& cache);
  int num_in_use() const;
};

/// Stocks describing one candidate split of leaf T_p into S_L and S_R.
struct SplitStocks {
  double sl_self = 0.0;  // sigma(S_L^2)
  double sr_self = 0.0;  // sigma(S_R^2)
  Index sl_size = 0;
  Index sr_size = 0;
  Vector sl_cluster;  // sigma(S_L x C_k) for every k
  Vector sr_cluster;  // sigma(S_R x C_k) for every k
  double leaf_self = 0.0;  // sigma(T_p^2)
  Vector leaf_cluster;     // sigma(T_p x C_k) for every k
  int parent_cluster = 0;
  Index parent_cluster_size_excl_leaf = 0;  // |C_kp| - |T_p|

  Index leaf_size() const { return sl_size + sr_size; }
  double self(Side side) const { return side == Side::Left ? sl_self : sr_self; }
  Index size(Side side) const { return side == Side::Left ? sl_size : sr_size; }
  const Vector& cluster(Side side) const { return side == Side::Left ? sl_cluster : sr_cluster; }
};

struct SplitConstraints {
  int num_clusters = 1;  // K, clusters currently in use
  int k_max = 2;
};

struct GainResult {
  double gain = 0.0;
  int left_target = kNoTarget;
  int right_target = kNoTarget;
  MoveKind kind = MoveKind::None;

  bool is_noop() const { return kind == MoveKind::None; }
};

/// Gain of sending one child to a brand-new cluster while the other stays.
double star_gain(const SplitStocks& stocks, Side side, const ClusterStats& stats);

/// Gain of sending both children to two brand-new clusters: the whole leaf
/// moves to a first new cluster, then the right child moves on to a second.
double double_star_gain(const SplitStocks& stocks, const ClusterStats& stats,
                        const SplitConstraints& constraints);

/// Gain of moving one child into the existing cluster `target`.
double switch_gain(const SplitStocks& stocks, Side side, int target, const ClusterStats& stats);

/// Correction turning two independent switch gains into the gain of moving
/// both children out of the parent's cluster. Independent of the targets.
double corrective_epsilon(const SplitStocks& stocks, const ClusterStats& stats);

double reallocation_gain(const SplitStocks& stocks, int left_target, int right_target,
                         const ClusterStats& stats);

/// Best legal reassignment of the two children, or a no-op with gain 0 when
/// no move has positive gain. Reallocation is resolved from the two best
/// switch gains per side, which is exact because the correction does not
/// depend on the chosen targets.
///
/// Gains within 1e-12 (relative) are ties, resolved by fewer new clusters,
/// then lower target id, then left before right.
GainResult compute_splits(const SplitStocks& stocks, const ClusterStats& stats,
                          const SplitConstraints& constraints);

}  // namespace kauri
