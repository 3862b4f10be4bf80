#pragma once

#include "kauri/tree.hpp"
#include "kauri/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace kauri {

struct KernelKMeansOptions {
  int k = 2;
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> init_labels;  // overrides the random init
  int max_iter = 300;
  double tol = 1e-9;
  // Moves the sample farthest from its centroid into each emptied cluster.
  bool reseed_empty = false;
};

struct KernelKMeansState {
  std::vector<int> labels;
  int k = 0;
  int iteration = 0;
  bool converged = false;
  double score = 0.0;                // within-cluster dispersion of `labels`
  std::vector<double> score_history;  // score after init and after every iteration
};

/// Lloyd iterations in feature space through the kernel trick:
///   dist(i, C) = K(i,i) - 2 sigma({i} x C) / |C| + sigma(C^2) / |C|^2
/// Labels start uniform at random over [0, k) unless init_labels is given.
/// Each sample moves to the nearest non-empty cluster (lowest id on ties).
/// Clusters that empty out stay empty unless reseed_empty is set.
KernelKMeansState kernel_kmeans(const Matrix& gram, const KernelKMeansOptions& options);

int count_nonempty(const KernelKMeansState& state);

/// Gini CART grown best-first: the leaf whose best split removes the most
/// weighted impurity is split next, until max_leaves or no decrease remains.
/// Leaves of the returned tree carry the majority class in `cluster`.
Tree cart_fit(const Matrix& data, std::span<const int> labels, int max_leaves);

/// Lowest-score state over `restarts` runs (empty clusters re-seeded), with
/// restart seeds drawn from a generator seeded by `seed`.
KernelKMeansState best_kernel_kmeans(const Matrix& gram, int k, std::uint64_t seed, int restarts = 10);

struct KMeansTreeResult {
  Tree tree;
  std::vector<int> kmeans_labels;
  std::vector<int> labels;  // tree predictions on the training data
  double kmeans_score = 0.0;
};

/// Best of `restarts` kernel KMeans runs (lowest score, empty clusters
/// re-seeded), then a CART with max_leaves leaves fitted on those labels.
KMeansTreeResult kmeans_dt(const Matrix& data, const Matrix& gram, int k, int max_leaves, std::uint64_t seed,
                           int restarts = 10);

}  // namespace kauri
