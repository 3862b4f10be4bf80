#include "kauri/stocks.hpp"

#include "kauri/errors.hpp"

#include <Eigen/SparseCore>

#include <algorithm>
#include <map>
#include <string>

namespace kauri {

namespace {

using SparseIndicator = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Rows are groups, columns are members; one nonzero per column.
SparseIndicator indicator(std::span<const int> group_of, Index groups) {
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(group_of.size());
  for (std::size_t j = 0; j < group_of.size(); ++j)
    entries.emplace_back(group_of[j], static_cast<Index>(j), 1.0);
  SparseIndicator m(groups, static_cast<Index>(group_of.size()));
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

}  // namespace

int Assignments::num_clusters_in_use() const {
  std::vector<bool> seen(static_cast<std::size_t>(cluster_id_bound()), false);
  std::vector<bool> populated(cluster_of_leaf.size(), false);
  for (int leaf : leaf_of_sample) populated[static_cast<std::size_t>(leaf)] = true;
  int count = 0;
  for (std::size_t p = 0; p < cluster_of_leaf.size(); ++p) {
    const auto k = static_cast<std::size_t>(cluster_of_leaf[p]);
    if (populated[p] && !seen[k]) {
      seen[k] = true;
      ++count;
    }
  }
  return count;
}

int Assignments::cluster_id_bound() const {
  int bound = 0;
  for (int k : cluster_of_leaf) bound = std::max(bound, k + 1);
  return bound;
}

void Assignments::validate() const {
  const int leaves = num_leaves();
  for (std::size_t i = 0; i < leaf_of_sample.size(); ++i) {
    if (leaf_of_sample[i] < 0 || leaf_of_sample[i] >= leaves)
      throw Error(ErrorCode::IndexOutOfRange,
                  "sample " + std::to_string(i) + " references leaf " + std::to_string(leaf_of_sample[i]));
  }
  for (std::size_t p = 0; p < cluster_of_leaf.size(); ++p) {
    if (cluster_of_leaf[p] < 0)
      throw Error(ErrorCode::IndexOutOfRange, "leaf " + std::to_string(p) + " has no cluster");
  }
}

std::vector<std::vector<Index>> Assignments::leaf_members() const {
  std::vector<std::vector<Index>> members(cluster_of_leaf.size());
  for (std::size_t i = 0; i < leaf_of_sample.size(); ++i)
    members[static_cast<std::size_t>(leaf_of_sample[i])].push_back(static_cast<Index>(i));
  return members;
}

std::vector<int> Assignments::sample_clusters() const {
  std::vector<int> out(leaf_of_sample.size());
  for (std::size_t i = 0; i < leaf_of_sample.size(); ++i)
    out[i] = cluster_of_leaf[static_cast<std::size_t>(leaf_of_sample[i])];
  return out;
}

int StockCache::num_clusters_in_use() const {
  return static_cast<int>(std::count_if(cluster_sizes.begin(), cluster_sizes.end(),
                                        [](Index s) { return s > 0; }));
}

double kernel_stock(std::span<const Index> rows, std::span<const Index> cols, const Matrix& gram) {
  const Index n = gram.rows();
  auto check = [n](Index i) {
    if (i < 0 || i >= n)
      throw Error(ErrorCode::IndexOutOfRange, "sample index " + std::to_string(i) + " outside [0, " +
                                                  std::to_string(n) + ")");
  };
  for (Index i : rows) check(i);
  for (Index j : cols) check(j);

  double total = 0.0;
  for (Index j : cols)
    for (Index i : rows) total += gram(i, j);
  return total;
}

StockCache recompute_caches(const Assignments& assign, const Matrix& gram, int cluster_rows) {
  assign.validate();
  const Index n = gram.rows();
  if (static_cast<Index>(assign.leaf_of_sample.size()) != n)
    throw Error(ErrorCode::DimensionMismatch, "assignment covers " +
                                                  std::to_string(assign.leaf_of_sample.size()) +
                                                  " samples, kernel has " + std::to_string(n));
  const int clusters = std::max(cluster_rows, assign.cluster_id_bound());

  const SparseIndicator z = indicator(assign.leaf_of_sample, assign.num_leaves());
  const SparseIndicator y = indicator(assign.cluster_of_leaf, clusters);
  const SparseIndicator yz = (y * z).pruned();

  StockCache cache;
  // gram is symmetric, so Z * gram == (gram * Z^T)^T; the latter walks contiguous columns.
  cache.lambda = (gram * z.transpose()).transpose();
  cache.omega = y * cache.lambda;
  cache.gamma = cache.omega * yz.transpose();

  cache.cluster_sizes.assign(static_cast<std::size_t>(clusters), 0);
  for (int leaf : assign.leaf_of_sample)
    ++cache.cluster_sizes[static_cast<std::size_t>(assign.cluster_of_leaf[static_cast<std::size_t>(leaf)])];
  cache.cluster_referenced.assign(static_cast<std::size_t>(clusters), false);
  for (int k : assign.cluster_of_leaf) cache.cluster_referenced[static_cast<std::size_t>(k)] = true;
  return cache;
}

double objective(const StockCache& cache) {
  double total = 0.0;
  for (std::size_t k = 0; k < cache.cluster_sizes.size(); ++k) {
    const Index size = cache.cluster_sizes[k];
    if (size == 0) {
      if (k < cache.cluster_referenced.size() && cache.cluster_referenced[k])
        throw Error(ErrorCode::EmptyClusterInUse, "cluster " + std::to_string(k) + " is empty");
      continue;
    }
    const auto kk = static_cast<Index>(k);
    total += cache.gamma(kk, kk) / static_cast<double>(size);
  }
  return total;
}

double kernel_kmeans_score(const StockCache& cache, const Matrix& gram) {
  return gram.trace() - objective(cache);
}

double partition_kmeans_score(const Matrix& gram, std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != gram.rows())
    throw Error(ErrorCode::LengthMismatch, "labels do not match kernel size");
  std::map<int, int> dense;
  std::vector<int> remapped(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    remapped[i] = dense.emplace(labels[i], static_cast<int>(dense.size())).first->second;

  const SparseIndicator h = indicator(remapped, static_cast<Index>(dense.size()));
  const Matrix stocks = h * (gram * h.transpose());
  Vector sizes = h * Vector::Ones(gram.rows());
  double within = 0.0;
  for (Index k = 0; k < stocks.rows(); ++k) within += stocks(k, k) / sizes(k);
  return gram.trace() - within;
}

}  // namespace kauri
