#pragma once

#include "kauri/gains.hpp"
#include "kauri/split_search.hpp"
#include "kauri/stocks.hpp"
#include "kauri/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kauri {

/// Binary rule node. Internal nodes route a sample left iff
/// sample[feature] < threshold; leaves carry the cluster they vote for.
struct TreeNode {
  bool is_leaf = true;
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int leaf_id = -1;
  int cluster = -1;
  MoveKind split_kind = MoveKind::None;  // move that assigned this node's children
};

class Tree {
 public:
  Tree() = default;
  explicit Tree(int n_features);

  // Single-leaf tree voting for `cluster`.
  static Tree single_leaf(int n_features, int cluster, int leaf_id = 0);

  int n_features() const { return n_features_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }
  int num_leaves() const;

  // Turns leaf `node_index` into an internal node with two fresh leaves and
  // returns their node indices (left, right).
  std::pair<int, int> split_leaf(int node_index, int feature, double threshold, int left_leaf_id,
                                 int left_cluster, int right_leaf_id, int right_cluster,
                                 MoveKind kind = MoveKind::None);
  int add_node(const TreeNode& node);
  void set_children(int node_index, int left, int right);

  // Node index of the leaf reached by `sample` (anything indexable by feature).
  template <class Row>
  int route(const Row& sample) const {
    int index = 0;
    while (!nodes_[static_cast<std::size_t>(index)].is_leaf) {
      const TreeNode& n = nodes_[static_cast<std::size_t>(index)];
      index = sample(n.feature) < n.threshold ? n.left : n.right;
    }
    return index;
  }

 private:
  int n_features_ = 0;
  std::vector<TreeNode> nodes_;
};

struct TrainConfig {
  int k_max = 2;
  std::optional<int> t_max;   // defaults to n
  std::optional<int> d_max;   // number of leading features scanned; defaults to d
  Index min_leaf_size = 1;
  double gain_tolerance = 0.0;
  std::uint64_t seed = 0;     // unused by training, carried for the bench harness
  // Invoked once per outer iteration with the freshly recomputed caches.
  std::function<void(const Assignments&, const StockCache&)> on_iteration;
};

struct IterationRecord {
  SplitProposal proposal;
  double objective_before = 0.0;
  double objective_after = 0.0;
  int num_leaves_after = 0;
  int num_clusters_after = 0;
};

struct TrainResult {
  Tree tree;
  Assignments assignments;
  std::vector<int> labels;  // training cluster of every sample
  std::vector<IterationRecord> history;
  double final_objective = 0.0;

  int num_clusters() const { return assignments.num_clusters_in_use(); }
};

/// Greedy training: start from one leaf in one cluster, then repeatedly apply
/// the single best split over all explorable leaves and features until no
/// gain exceeds the tolerance, the leaf budget is spent or no leaf can split.
/// Deterministic for fixed inputs.
TrainResult train(const Matrix& data, const Matrix& gram, const TrainConfig& config);

int predict_sample(const Tree& tree, const Eigen::Ref<const Vector>& sample);
std::vector<int> predict(const Tree& tree, const Matrix& data);

// {"version":1,"n_features":d,"root":node}; thresholds printed with 17 significant digits.
std::string export_tree_json(const Tree& tree);
std::string export_tree_dot(const Tree& tree);
Tree import_tree(std::string_view json_text);

}  // namespace kauri
