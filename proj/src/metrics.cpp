#include "kauri/metrics.hpp"

#include "kauri/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>

namespace kauri {

namespace {

double pairs(Index count) { return 0.5 * static_cast<double>(count) * static_cast<double>(count - 1); }

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b)
    throw Error(ErrorCode::LengthMismatch, "labelings have " + std::to_string(a) + " and " + std::to_string(b) +
                                               " entries");
}

// Leaf reached by every sample, paired with the node path to it.
template <class Visit>
void walk_paths(const Tree& tree, const Matrix& data, Visit&& visit) {
  if (data.cols() != tree.n_features())
    throw Error(ErrorCode::DimensionMismatch, "data width does not match the tree");
  std::vector<int> path;
  for (Index i = 0; i < data.rows(); ++i) {
    path.clear();
    int index = 0;
    path.push_back(index);
    while (!tree.node(index).is_leaf) {
      const TreeNode& n = tree.node(index);
      index = data(i, n.feature) < n.threshold ? n.left : n.right;
      path.push_back(index);
    }
    visit(path);
  }
}

}  // namespace

ContingencyTable contingency(std::span<const int> a, std::span<const int> b) {
  require_same_length(a.size(), b.size());
  std::map<int, std::size_t> rows;
  std::map<int, std::size_t> cols;
  for (int v : a) rows.emplace(v, 0);
  for (int v : b) cols.emplace(v, 0);
  std::size_t next = 0;
  for (auto& [v, id] : rows) id = next++;
  next = 0;
  for (auto& [v, id] : cols) id = next++;

  ContingencyTable table;
  table.counts.assign(rows.size(), std::vector<Index>(cols.size(), 0));
  table.row_sums.assign(rows.size(), 0);
  table.col_sums.assign(cols.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t r = rows[a[i]];
    const std::size_t c = cols[b[i]];
    ++table.counts[r][c];
    ++table.row_sums[r];
    ++table.col_sums[c];
  }
  table.total = static_cast<Index>(a.size());
  return table;
}

AriResult ari_detailed(std::span<const int> a, std::span<const int> b) {
  require_same_length(a.size(), b.size());
  if (a.size() < 2) throw Error(ErrorCode::LengthMismatch, "ARI needs at least two samples");
  const ContingencyTable table = contingency(a, b);

  double index = 0.0;
  for (const auto& row : table.counts)
    for (Index c : row) index += pairs(c);
  double sum_a = 0.0;
  for (Index c : table.row_sums) sum_a += pairs(c);
  double sum_b = 0.0;
  for (Index c : table.col_sums) sum_b += pairs(c);

  const double expected = sum_a * sum_b / pairs(table.total);
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum - expected == 0.0) return {1.0, true};
  return {(index - expected) / (maximum - expected), false};
}

double ari(std::span<const int> a, std::span<const int> b) { return ari_detailed(a, b).value; }

double wad(const Tree& tree, const Matrix& data) {
  if (data.rows() == 0) return 0.0;
  double total = 0.0;
  walk_paths(tree, data, [&](const std::vector<int>& path) { total += static_cast<double>(path.size()); });
  return total / static_cast<double>(data.rows());
}

double waes(const Tree& tree, const Matrix& data) {
  if (data.rows() == 0) return 0.0;
  // Explanation size depends only on the leaf, so memoise it per node.
  std::vector<int> size_of(tree.nodes().size(), -1);
  double total = 0.0;
  walk_paths(tree, data, [&](const std::vector<int>& path) {
    int& cached = size_of[static_cast<std::size_t>(path.back())];
    if (cached < 0) {
      std::vector<std::pair<int, bool>> conditions;
      for (std::size_t s = 0; s + 1 < path.size(); ++s) {
        const TreeNode& n = tree.node(path[s]);
        conditions.emplace_back(n.feature, path[s + 1] == n.left);
      }
      std::sort(conditions.begin(), conditions.end());
      conditions.erase(std::unique(conditions.begin(), conditions.end()), conditions.end());
      cached = static_cast<int>(conditions.size()) + 1;
    }
    total += cached;
  });
  return total / static_cast<double>(data.rows());
}

double normalized_kmeans_score(double partition_score, double reference_score) {
  if (!(reference_score > 0.0))
    throw Error(ErrorCode::NonPositiveReference, "reference score " + std::to_string(reference_score));
  return partition_score / reference_score;
}

std::vector<int> max_weight_matching(const Matrix& weights) {
  const auto rows = static_cast<int>(weights.rows());
  const auto cols = static_cast<int>(weights.cols());
  const int size = std::max(rows, cols);
  if (size == 0) return {};

  // Hungarian algorithm (potentials form) minimising the negated weights on a
  // square padding of the matrix.
  Matrix cost = Matrix::Zero(size, size);
  cost.topLeftCorner(rows, cols) = -weights;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(size) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(size) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(size) + 1, 0);  // column -> row, 1-based
  std::vector<int> way(static_cast<std::size_t>(size) + 1, 0);

  for (int r = 1; r <= size; ++r) {
    match[0] = r;
    int col = 0;
    std::vector<double> slack(static_cast<std::size_t>(size) + 1, inf);
    std::vector<bool> used(static_cast<std::size_t>(size) + 1, false);
    do {
      used[static_cast<std::size_t>(col)] = true;
      const int row = match[static_cast<std::size_t>(col)];
      double delta = inf;
      int next = 0;
      for (int c = 1; c <= size; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        if (used[cc]) continue;
        const double reduced = cost(row - 1, c - 1) - u[static_cast<std::size_t>(row)] - v[cc];
        if (reduced < slack[cc]) {
          slack[cc] = reduced;
          way[cc] = col;
        }
        if (slack[cc] < delta) {
          delta = slack[cc];
          next = c;
        }
      }
      for (int c = 0; c <= size; ++c) {
        const auto cc = static_cast<std::size_t>(c);
        if (used[cc]) {
          u[static_cast<std::size_t>(match[cc])] += delta;
          v[cc] -= delta;
        } else {
          slack[cc] -= delta;
        }
      }
      col = next;
    } while (match[static_cast<std::size_t>(col)] != 0);
    do {
      const int prev = way[static_cast<std::size_t>(col)];
      match[static_cast<std::size_t>(col)] = match[static_cast<std::size_t>(prev)];
      col = prev;
    } while (col != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(rows), -1);
  for (int c = 1; c <= size; ++c) {
    const int r = match[static_cast<std::size_t>(c)];
    if (r >= 1 && r <= rows && c <= cols) assignment[static_cast<std::size_t>(r - 1)] = c - 1;
  }
  return assignment;
}

double unsupervised_accuracy(std::span<const int> predicted, std::span<const int> truth) {
  require_same_length(predicted.size(), truth.size());
  if (predicted.empty()) return 0.0;
  const ContingencyTable table = contingency(predicted, truth);
  const std::size_t rows = table.counts.size();
  const std::size_t cols = table.col_sums.size();

  double matched = 0.0;
  if (std::max(rows, cols) <= 8) {
    // Enumerate injections from the smaller side into the larger one.
    const bool transpose = rows > cols;
    const std::size_t small = transpose ? cols : rows;
    const std::size_t large = transpose ? rows : cols;
    std::vector<std::size_t> perm(large);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double total = 0.0;
      for (std::size_t s = 0; s < small; ++s)
        total += static_cast<double>(transpose ? table.counts[perm[s]][s] : table.counts[s][perm[s]]);
      matched = std::max(matched, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    Matrix weights(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        weights(static_cast<Index>(r), static_cast<Index>(c)) = static_cast<double>(table.counts[r][c]);
    const std::vector<int> assignment = max_weight_matching(weights);
    for (std::size_t r = 0; r < rows; ++r)
      if (assignment[r] >= 0) matched += static_cast<double>(table.counts[r][static_cast<std::size_t>(assignment[r])]);
  }
  return matched / static_cast<double>(predicted.size());
}

}  // namespace kauri
