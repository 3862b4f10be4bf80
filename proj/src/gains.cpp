#include "kauri/gains.hpp"

#include "kauri/errors.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace kauri {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Moving S out of C (S strictly inside C) into a cluster of its own.
double star_formula(double s_self, double s_size, double c_self, double c_size, double c_cross_s) {
  const double rem = c_size - s_size;
  return s_self * (1.0 / s_size + 1.0 / rem) + c_self * (1.0 / rem - 1.0 / c_size) -
         2.0 * c_cross_s / rem;
}

void require_remainder(Index remainder, const char* what) {
  if (remainder < 1)
    throw Error(ErrorCode::WouldEmptySourceCluster, std::string(what) + " would empty the parent's cluster");
}

void require_cluster(const ClusterStats& stats, int k) {
  if (k < 0 || static_cast<std::size_t>(k) >= stats.sizes.size())
    throw Error(ErrorCode::IndexOutOfRange, "cluster id " + std::to_string(k) + " out of range");
}

Index parent_size(const SplitStocks& stocks) {
  return stocks.parent_cluster_size_excl_leaf + stocks.leaf_size();
}

double switch_unchecked(const SplitStocks& s, Side side, int target, const ClusterStats& stats) {
  const auto kp = static_cast<Index>(s.parent_cluster);
  const auto kt = static_cast<Index>(target);
  const double size = static_cast<double>(s.size(side));
  const double self = s.self(side);
  const double cp = static_cast<double>(parent_size(s));
  const double ct = static_cast<double>(stats.sizes[static_cast<std::size_t>(target)]);
  const double rem = cp - size;
  const double grown = ct + size;
  const double cp_self = stats.self_stock(kp);
  const double ct_self = stats.self_stock(kt);
  return self * (1.0 / grown + 1.0 / rem) - 2.0 * s.cluster(side)(kp) / rem +
         cp_self * (1.0 / rem - 1.0 / cp) + ct_self * (1.0 / grown - 1.0 / ct) +
         2.0 * s.cluster(side)(kt) / grown;
}

double epsilon_unchecked(const SplitStocks& s, const ClusterStats& stats) {
  const auto kp = static_cast<Index>(s.parent_cluster);
  const double c = static_cast<double>(parent_size(s));
  const double c_self = stats.self_stock(kp);
  const double t = static_cast<double>(s.leaf_size());
  const double l = static_cast<double>(s.sl_size);
  const double r = static_cast<double>(s.sr_size);
  return (c_self + s.leaf_self - 2.0 * s.leaf_cluster(kp)) / (c - t) + c_self / c -
         (c_self + s.sl_self - 2.0 * s.sl_cluster(kp)) / (c - l) -
         (c_self + s.sr_self - 2.0 * s.sr_cluster(kp)) / (c - r);
}

// Candidate ordering for TakeBest.
struct Candidate {
  GainResult result;
  int new_clusters = 0;
  int first_target = INT_MAX;
  int second_target = INT_MAX;
  int side = 0;
};

int tie_rank(int target) {
  if (target == kNewCluster1) return INT_MAX - 1;
  if (target == kNewCluster2) return INT_MAX;
  return target;
}

bool better(const Candidate& a, const Candidate& b) {
  if (b.result.is_noop()) return a.result.gain > 0.0;
  const double scale = std::max({1.0, std::abs(a.result.gain), std::abs(b.result.gain)});
  if (a.result.gain > b.result.gain + 1e-12 * scale) return true;
  if (a.result.gain < b.result.gain - 1e-12 * scale) return false;
  return std::tie(a.new_clusters, a.first_target, a.second_target, a.side) <
         std::tie(b.new_clusters, b.first_target, b.second_target, b.side);
}

struct TopTwo {
  double top = kNegInf;
  double second = kNegInf;
  int top_k = kNoTarget;
  int second_k = kNoTarget;

  void offer(double gain, int k) {
    if (gain > top) {
      second = top;
      second_k = top_k;
      top = gain;
      top_k = k;
    } else if (gain > second) {
      second = gain;
      second_k = k;
    }
  }
};

}  // namespace

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::None: return "none";
    case MoveKind::Star: return "star";
    case MoveKind::DoubleStar: return "double_star";
    case MoveKind::Switch: return "switch";
    case MoveKind::Reallocation: return "reallocation";
  }
  return "unknown";
}

ClusterStats ClusterStats::from_cache(const StockCache& cache) {
  ClusterStats stats;
  stats.self_stock = cache.gamma.diagonal();
  stats.sizes = cache.cluster_sizes;
  return stats;
}

int ClusterStats::num_in_use() const {
  return static_cast<int>(std::count_if(sizes.begin(), sizes.end(), [](Index s) { return s > 0; }));
}

double star_gain(const SplitStocks& stocks, Side side, const ClusterStats& stats) {
  require_cluster(stats, stocks.parent_cluster);
  const Index c = parent_size(stocks);
  const Index s = stocks.size(side);
  require_remainder(c - s, "star move");
  const auto kp = static_cast<Index>(stocks.parent_cluster);
  return star_formula(stocks.self(side), static_cast<double>(s), stats.self_stock(kp),
                      static_cast<double>(c), stocks.cluster(side)(kp));
}

double double_star_gain(const SplitStocks& stocks, const ClusterStats& stats,
                        const SplitConstraints& constraints) {
  require_cluster(stats, stocks.parent_cluster);
  if (constraints.num_clusters + 2 > constraints.k_max)
    throw Error(ErrorCode::ClusterBudgetExceeded, "double star needs two free cluster slots");
  require_remainder(stocks.parent_cluster_size_excl_leaf, "double star move");

  const auto kp = static_cast<Index>(stocks.parent_cluster);
  const double t = static_cast<double>(stocks.leaf_size());
  const double whole_leaf = star_formula(stocks.leaf_self, t, stats.self_stock(kp),
                                         static_cast<double>(parent_size(stocks)), stocks.leaf_cluster(kp));
  // sigma(T_p x S_R) = sigma(S_R^2) + sigma(S_L x S_R)
  const double leaf_cross_right = 0.5 * (stocks.leaf_self + stocks.sr_self - stocks.sl_self);
  const double right_off = star_formula(stocks.sr_self, static_cast<double>(stocks.sr_size),
                                        stocks.leaf_self, t, leaf_cross_right);
  return whole_leaf + right_off;
}

double switch_gain(const SplitStocks& stocks, Side side, int target, const ClusterStats& stats) {
  require_cluster(stats, stocks.parent_cluster);
  require_cluster(stats, target);
  if (target == stocks.parent_cluster)
    throw Error(ErrorCode::SameCluster, "switch target equals the parent's cluster");
  if (stats.sizes[static_cast<std::size_t>(target)] == 0)
    throw Error(ErrorCode::EmptyClusterInUse, "switch target " + std::to_string(target) + " is empty");
  require_remainder(parent_size(stocks) - stocks.size(side), "switch move");
  return switch_unchecked(stocks, side, target, stats);
}

double corrective_epsilon(const SplitStocks& stocks, const ClusterStats& stats) {
  require_cluster(stats, stocks.parent_cluster);
  require_remainder(stocks.parent_cluster_size_excl_leaf, "reallocation");
  return epsilon_unchecked(stocks, stats);
}

double reallocation_gain(const SplitStocks& stocks, int left_target, int right_target,
                         const ClusterStats& stats) {
  if (left_target == right_target)
    throw Error(ErrorCode::SameCluster, "reallocation targets must differ");
  require_remainder(stocks.parent_cluster_size_excl_leaf, "reallocation");
  return switch_gain(stocks, Side::Left, left_target, stats) +
         switch_gain(stocks, Side::Right, right_target, stats) + corrective_epsilon(stocks, stats);
}

GainResult compute_splits(const SplitStocks& stocks, const ClusterStats& stats,
                          const SplitConstraints& constraints) {
  const int kp = stocks.parent_cluster;
  const auto kpi = static_cast<Index>(kp);
  const Index c = parent_size(stocks);
  const bool leaf_has_remainder = stocks.parent_cluster_size_excl_leaf >= 1;
  const int k_count = constraints.num_clusters;

  Candidate best;
  auto take = [&best](Candidate cand) {
    if (std::isfinite(cand.result.gain) && better(cand, best)) best = cand;
  };

  if (k_count + 1 <= constraints.k_max) {
    const double cp_self = stats.self_stock(kpi);
    if (c - stocks.sl_size >= 1) {
      const double g = star_formula(stocks.sl_self, static_cast<double>(stocks.sl_size), cp_self,
                                    static_cast<double>(c), stocks.sl_cluster(kpi));
      take({{g, kNewCluster1, kp, MoveKind::Star}, 1, tie_rank(kNewCluster1), INT_MAX, 0});
    }
    if (c - stocks.sr_size >= 1) {
      const double g = star_formula(stocks.sr_self, static_cast<double>(stocks.sr_size), cp_self,
                                    static_cast<double>(c), stocks.sr_cluster(kpi));
      take({{g, kp, kNewCluster1, MoveKind::Star}, 1, tie_rank(kNewCluster1), INT_MAX, 1});
    }
  }

  if (k_count + 2 <= constraints.k_max && leaf_has_remainder) {
    const double g = double_star_gain(stocks, stats, constraints);
    take({{g, kNewCluster1, kNewCluster2, MoveKind::DoubleStar}, 2, tie_rank(kNewCluster1),
          tie_rank(kNewCluster2), 0});
  }

  TopTwo left;
  TopTwo right;
  const auto clusters = static_cast<int>(stats.sizes.size());
  for (int k = 0; k < clusters; ++k) {
    if (k == kp || stats.sizes[static_cast<std::size_t>(k)] == 0) continue;
    if (c - stocks.sl_size >= 1) {
      const double g = switch_unchecked(stocks, Side::Left, k, stats);
      take({{g, k, kp, MoveKind::Switch}, 0, k, INT_MAX, 0});
      left.offer(g, k);
    }
    if (c - stocks.sr_size >= 1) {
      const double g = switch_unchecked(stocks, Side::Right, k, stats);
      take({{g, kp, k, MoveKind::Switch}, 0, k, INT_MAX, 1});
      right.offer(g, k);
    }
  }

  if (leaf_has_remainder && left.second_k != kNoTarget && right.second_k != kNoTarget) {
    const double eps = epsilon_unchecked(stocks, stats);
    auto offer_pair = [&](double gl, int kl, double gr, int kr) {
      if (kl == kNoTarget || kr == kNoTarget || kl == kr) return;
      take({{gl + gr + eps, kl, kr, MoveKind::Reallocation}, 0, kl, kr, 0});
    };
    if (left.top_k != right.top_k) {
      offer_pair(left.top, left.top_k, right.top, right.top_k);
    } else {
      offer_pair(left.top, left.top_k, right.second, right.second_k);
      offer_pair(left.second, left.second_k, right.top, right.top_k);
    }
  }

  return best.result;
}

}  // namespace kauri
