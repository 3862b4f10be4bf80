#pragma once

#include "kauri/types.hpp"

#include <span>
#include <vector>

namespace kauri {

/// Partition state of a tree. leaf_of_sample encodes the leaf-membership
/// matrix Z (one leaf per sample), cluster_of_leaf encodes the
/// leaf-to-cluster matrix Y (one cluster per leaf).
struct Assignments {
  std::vector<int> leaf_of_sample;
  std::vector<int> cluster_of_leaf;

  int num_leaves() const { return static_cast<int>(cluster_of_leaf.size()); }
  int num_clusters_in_use() const;
  // One past the largest cluster id referenced by any leaf.
  int cluster_id_bound() const;

  // Throws IndexOutOfRange when a sample points at a missing leaf or a leaf
  // at a negative cluster id.
  void validate() const;

  // Members of every leaf, each list in ascending sample order.
  std::vector<std::vector<Index>> leaf_members() const;
  std::vector<int> sample_clusters() const;
};

/// Kernel stocks for one partition snapshot:
///   lambda(p, j) = sigma(T_p x {x_j})          (leaves x n)
///   omega(k, j)  = sigma(C_k x {x_j})          (clusters x n)
///   gamma(k, k') = sigma(C_k x C_k')           (clusters x clusters)
struct StockCache {
  Matrix lambda;
  Matrix omega;
  Matrix gamma;
  std::vector<Index> cluster_sizes;
  // Clusters referenced by at least one leaf, whether or not the leaf is populated.
  std::vector<bool> cluster_referenced;

  int num_clusters_in_use() const;
};

/// sigma(E x F): sum of K(i, j) over i in E, j in F.
double kernel_stock(std::span<const Index> rows, std::span<const Index> cols, const Matrix& gram);

/// Rebuilds every stock from scratch. `cluster_rows` fixes the number of rows
/// of omega/gamma; it defaults to assign.cluster_id_bound().
StockCache recompute_caches(const Assignments& assign, const Matrix& gram, int cluster_rows = -1);

/// Sum over non-empty clusters of sigma(C_k^2) / |C_k|. Throws
/// EmptyClusterInUse if a referenced cluster has no samples.
double objective(const StockCache& cache);

/// Within-cluster dispersion sum_i K(i,i) - objective(cache); never
/// negative for positive semi-definite kernels.
double kernel_kmeans_score(const StockCache& cache, const Matrix& gram);

/// Same dispersion for an arbitrary labelling (labels need not be dense).
double partition_kmeans_score(const Matrix& gram, std::span<const int> labels);

}  // namespace kauri
