#pragma once

#include "kauri/tree.hpp"
#include "kauri/types.hpp"

#include <span>
#include <vector>

namespace kauri {

/// Co-occurrence counts of two labelings: rows follow the sorted distinct
/// values of `a`, columns those of `b`.
struct ContingencyTable {
  std::vector<std::vector<Index>> counts;
  std::vector<Index> row_sums;
  std::vector<Index> col_sums;
  Index total = 0;
};

ContingencyTable contingency(std::span<const int> a, std::span<const int> b);

struct AriResult {
  double value = 0.0;
  bool degenerate = false;  // both labelings trivial; value set to 1
};

/// Adjusted Rand index (Hubert and Arabie). Throws LengthMismatch on unequal
/// or too short inputs.
AriResult ari_detailed(std::span<const int> a, std::span<const int> b);
double ari(std::span<const int> a, std::span<const int> b);

/// Mean over samples of the depth of their leaf, counting nodes (root = 1).
double wad(const Tree& tree, const Matrix& data);

/// Mean over samples of the number of distinct (feature, direction)
/// conditions on the path to their leaf, plus one.
double waes(const Tree& tree, const Matrix& data);

/// partition_score / reference_score. Throws NonPositiveReference.
double normalized_kmeans_score(double partition_score, double reference_score);

/// Best matched fraction over one-to-one cluster-to-class assignments.
double unsupervised_accuracy(std::span<const int> predicted, std::span<const int> truth);

/// Maximum-weight assignment on a rectangular weight matrix; entry r holds
/// the column matched to row r or -1.
std::vector<int> max_weight_matching(const Matrix& weights);

}  // namespace kauri
