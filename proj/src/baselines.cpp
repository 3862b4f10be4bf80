#include "kauri/baselines.hpp"

#include "kauri/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

namespace kauri {

namespace {

// sigma({i} x C) for every sample i and cluster C, plus sizes and self stocks.
struct ClusterSums {
  Matrix cross;  // n x k
  Vector self;
  std::vector<Index> sizes;
};

ClusterSums cluster_sums(const Matrix& gram, const std::vector<int>& labels, int k) {
  const Index n = gram.rows();
  ClusterSums sums;
  sums.cross = Matrix::Zero(n, k);
  sums.sizes.assign(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < n; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    sums.cross.col(c) += gram.col(i);
    ++sums.sizes[static_cast<std::size_t>(c)];
  }
  sums.self = Vector::Zero(k);
  for (Index i = 0; i < n; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    sums.self(c) += sums.cross(i, c);
  }
  return sums;
}

double dispersion(const Matrix& gram, const ClusterSums& sums) {
  double within = 0.0;
  for (std::size_t c = 0; c < sums.sizes.size(); ++c)
    if (sums.sizes[c] > 0) within += sums.self(static_cast<Index>(c)) / static_cast<double>(sums.sizes[c]);
  return gram.trace() - within;
}

}  // namespace

KernelKMeansState kernel_kmeans(const Matrix& gram, const KernelKMeansOptions& options) {
  const Index n = gram.rows();
  const int k = options.k;
  if (gram.cols() != n) throw Error(ErrorCode::DimensionMismatch, "kernel matrix must be square");
  if (k < 1) throw Error(ErrorCode::ConfigInvalid, "k must be at least 1");
  if (k > n) throw Error(ErrorCode::KTooLarge, "k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));

  KernelKMeansState state;
  state.k = k;
  if (options.init_labels) {
    state.labels = *options.init_labels;
    if (static_cast<Index>(state.labels.size()) != n)
      throw Error(ErrorCode::LengthMismatch, "init labels do not cover every sample");
    for (int c : state.labels)
      if (c < 0 || c >= k) throw Error(ErrorCode::IndexOutOfRange, "init label " + std::to_string(c));
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> pick(0, k - 1);
    state.labels.resize(static_cast<std::size_t>(n));
    for (int& c : state.labels) c = pick(rng);
  }

  ClusterSums sums = cluster_sums(gram, state.labels, k);
  state.score = dispersion(gram, sums);
  state.score_history.push_back(state.score);

  std::vector<int> next(state.labels.size());
  std::vector<double> distance(state.labels.size());
  while (state.iteration < options.max_iter) {
    ++state.iteration;
    for (Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = state.labels[static_cast<std::size_t>(i)];
      for (int c = 0; c < k; ++c) {
        const auto size = static_cast<double>(sums.sizes[static_cast<std::size_t>(c)]);
        if (size == 0.0) continue;
        const double dist = gram(i, i) - 2.0 * sums.cross(i, c) / size + sums.self(c) / (size * size);
        if (dist < best) {
          best = dist;
          best_c = c;
        }
      }
      next[static_cast<std::size_t>(i)] = best_c;
      distance[static_cast<std::size_t>(i)] = best;
    }

    if (options.reseed_empty) {
      std::vector<Index> counts(static_cast<std::size_t>(k), 0);
      for (int c : next) ++counts[static_cast<std::size_t>(c)];
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) continue;
        Index far = -1;
        for (Index i = 0; i < n; ++i) {
          const auto ii = static_cast<std::size_t>(i);
          if (counts[static_cast<std::size_t>(next[ii])] < 2) continue;
          if (far < 0 || distance[ii] > distance[static_cast<std::size_t>(far)]) far = i;
        }
        if (far < 0) break;
        const auto ff = static_cast<std::size_t>(far);
        --counts[static_cast<std::size_t>(next[ff])];
        next[ff] = c;
        distance[ff] = 0.0;
        ++counts[static_cast<std::size_t>(c)];
      }
    }

    if (next == state.labels) {
      state.converged = true;
      break;
    }
    state.labels = next;
    sums = cluster_sums(gram, state.labels, k);
    const double previous = state.score;
    state.score = dispersion(gram, sums);
    state.score_history.push_back(state.score);
    if (std::abs(previous - state.score) < options.tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

int count_nonempty(const KernelKMeansState& state) {
  std::vector<bool> seen(static_cast<std::size_t>(state.k), false);
  for (int c : state.labels) seen[static_cast<std::size_t>(c)] = true;
  return static_cast<int>(std::count(seen.begin(), seen.end(), true));
}

namespace {

struct CartSplit {
  double decrease = 0.0;
  int feature = -1;
  double threshold = 0.0;
  bool found = false;
};

double weighted_gini(const std::vector<Index>& counts, Index total) {
  if (total == 0) return 0.0;
  double sq = 0.0;
  for (Index c : counts) sq += static_cast<double>(c) * static_cast<double>(c);
  return static_cast<double>(total) - sq / static_cast<double>(total);
}

int majority(const std::vector<Index>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

CartSplit best_cart_split(const Matrix& data, const std::vector<int>& classes, int n_classes,
                          const std::vector<Index>& members) {
  CartSplit best;
  const auto size = static_cast<Index>(members.size());
  if (size < 2) return best;
  std::vector<Index> total(static_cast<std::size_t>(n_classes), 0);
  for (Index i : members) ++total[static_cast<std::size_t>(classes[static_cast<std::size_t>(i)])];
  const double parent = weighted_gini(total, size);
  if (parent <= 0.0) return best;

  std::vector<Index> order(members);
  for (int f = 0; f < data.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return data(a, f) < data(b, f); });
    std::vector<Index> left(static_cast<std::size_t>(n_classes), 0);
    std::vector<Index> right(total);
    for (Index l = 0; l + 1 < size; ++l) {
      const int c = classes[static_cast<std::size_t>(order[static_cast<std::size_t>(l)])];
      ++left[static_cast<std::size_t>(c)];
      --right[static_cast<std::size_t>(c)];
      const double lo = data(order[static_cast<std::size_t>(l)], f);
      const double hi = data(order[static_cast<std::size_t>(l + 1)], f);
      if (!(lo < hi)) continue;
      const double decrease = parent - weighted_gini(left, l + 1) - weighted_gini(right, size - l - 1);
      if (decrease > best.decrease + 1e-12) {
        const double mid = lo + 0.5 * (hi - lo);
        best = {decrease, f, mid > lo ? mid : hi, true};
      }
    }
  }
  return best;
}

}  // namespace

Tree cart_fit(const Matrix& data, std::span<const int> labels, int max_leaves) {
  const Index n = data.rows();
  if (static_cast<Index>(labels.size()) != n) throw Error(ErrorCode::LengthMismatch, "one label per sample");
  if (max_leaves < 1) throw Error(ErrorCode::ConfigInvalid, "max_leaves must be at least 1");
  if (n < 1) throw Error(ErrorCode::ConfigInvalid, "empty dataset");

  std::map<int, int> dense;
  for (int c : labels) dense.emplace(c, 0);
  std::vector<int> original;
  for (auto& [label, id] : dense) {
    id = static_cast<int>(original.size());
    original.push_back(label);
  }
  std::vector<int> classes(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) classes[i] = dense[labels[i]];
  const int n_classes = static_cast<int>(original.size());

  auto counts_of = [&](const std::vector<Index>& members) {
    std::vector<Index> counts(static_cast<std::size_t>(n_classes), 0);
    for (Index i : members) ++counts[static_cast<std::size_t>(classes[static_cast<std::size_t>(i)])];
    return counts;
  };

  std::vector<std::vector<Index>> members(1);
  for (Index i = 0; i < n; ++i) members[0].push_back(i);
  Tree tree = Tree::single_leaf(static_cast<int>(data.cols()), original[static_cast<std::size_t>(majority(counts_of(members[0])))]);
  std::vector<int> node_of_leaf = {0};
  std::vector<CartSplit> splits = {best_cart_split(data, classes, n_classes, members[0])};

  while (static_cast<int>(members.size()) < max_leaves) {
    int leaf = -1;
    for (std::size_t p = 0; p < splits.size(); ++p) {
      if (!splits[p].found) continue;
      if (leaf < 0 || splits[p].decrease > splits[static_cast<std::size_t>(leaf)].decrease + 1e-12)
        leaf = static_cast<int>(p);
    }
    if (leaf < 0) break;

    const auto p = static_cast<std::size_t>(leaf);
    const CartSplit split = splits[p];
    std::vector<Index> left;
    std::vector<Index> right;
    for (Index i : members[p]) (data(i, split.feature) < split.threshold ? left : right).push_back(i);

    const int right_leaf = static_cast<int>(members.size());
    const auto [left_node, right_node] =
        tree.split_leaf(node_of_leaf[p], split.feature, split.threshold, leaf,
                        original[static_cast<std::size_t>(majority(counts_of(left)))], right_leaf,
                        original[static_cast<std::size_t>(majority(counts_of(right)))]);
    node_of_leaf[p] = left_node;
    node_of_leaf.push_back(right_node);
    splits[p] = best_cart_split(data, classes, n_classes, left);
    splits.push_back(best_cart_split(data, classes, n_classes, right));
    members[p] = std::move(left);
    members.push_back(std::move(right));
  }
  return tree;
}

KernelKMeansState best_kernel_kmeans(const Matrix& gram, int k, std::uint64_t seed, int restarts) {
  if (restarts < 1) throw Error(ErrorCode::ConfigInvalid, "restarts must be at least 1");
  std::mt19937_64 seeds(seed);
  KernelKMeansState best;
  for (int r = 0; r < restarts; ++r) {
    KernelKMeansOptions options;
    options.k = k;
    options.seed = seeds();
    options.reseed_empty = true;
    KernelKMeansState state = kernel_kmeans(gram, options);
    if (r == 0 || state.score < best.score) best = std::move(state);
  }
  return best;
}

KMeansTreeResult kmeans_dt(const Matrix& data, const Matrix& gram, int k, int max_leaves, std::uint64_t seed,
                           int restarts) {
  KernelKMeansState best = best_kernel_kmeans(gram, k, seed, restarts);
  KMeansTreeResult result;
  result.tree = cart_fit(data, best.labels, max_leaves);
  result.labels = predict(result.tree, data);
  result.kmeans_labels = std::move(best.labels);
  result.kmeans_score = best.score;
  return result;
}

}  // namespace kauri
