#include "kauri/tree.hpp"

#include "kauri/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace kauri {

Tree::Tree(int n_features) : n_features_(n_features) {}

Tree Tree::single_leaf(int n_features, int cluster, int leaf_id) {
  Tree tree(n_features);
  TreeNode root;
  root.leaf_id = leaf_id;
  root.cluster = cluster;
  tree.nodes_.push_back(root);
  return tree;
}

int Tree::num_leaves() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf; }));
}

int Tree::add_node(const TreeNode& node) {
  nodes_.push_back(node);
  return static_cast<int>(nodes_.size()) - 1;
}

void Tree::set_children(int node_index, int left, int right) {
  TreeNode& n = nodes_[static_cast<std::size_t>(node_index)];
  n.left = left;
  n.right = right;
}

std::pair<int, int> Tree::split_leaf(int node_index, int feature, double threshold, int left_leaf_id,
                                     int left_cluster, int right_leaf_id, int right_cluster, MoveKind kind) {
  TreeNode left;
  left.leaf_id = left_leaf_id;
  left.cluster = left_cluster;
  TreeNode right;
  right.leaf_id = right_leaf_id;
  right.cluster = right_cluster;
  const int li = add_node(left);
  const int ri = add_node(right);

  TreeNode& parent = nodes_[static_cast<std::size_t>(node_index)];
  parent.is_leaf = false;
  parent.feature = feature;
  parent.threshold = threshold;
  parent.left = li;
  parent.right = ri;
  parent.leaf_id = -1;
  parent.cluster = -1;
  parent.split_kind = kind;
  return {li, ri};
}

namespace {

void validate_config(const TrainConfig& config, Index n, Index d) {
  const int t_max = config.t_max.value_or(static_cast<int>(n));
  if (config.k_max < 2) throw Error(ErrorCode::ConfigInvalid, "k_max must be at least 2");
  if (t_max < 1 || t_max > n) throw Error(ErrorCode::ConfigInvalid, "t_max must lie in [1, n]");
  if (config.k_max > t_max) throw Error(ErrorCode::ConfigInvalid, "k_max cannot exceed t_max");
  if (config.d_max && (*config.d_max < 1 || *config.d_max > d))
    throw Error(ErrorCode::ConfigInvalid, "d_max must lie in [1, d]");
  if (config.min_leaf_size < 1) throw Error(ErrorCode::ConfigInvalid, "min_leaf_size must be >= 1");
}

bool explorable(Index size, Index min_leaf_size) { return size >= std::max<Index>(2, 2 * min_leaf_size); }

// Orderings and self-stock sweeps of one leaf. Neither depends on the cluster
// layout, so they stay valid until the leaf itself is split.
struct LeafSearch {
  std::vector<FeatureOrdering> orderings;
  std::vector<SelfStockSweep> sweeps;  // empty sweep marks a constant feature
};

LeafSearch prepare_leaf(const Matrix& data, const Matrix& gram, const StockCache& cache,
                        std::span<const Index> members, int leaf, int features) {
  double leaf_self = 0.0;
  for (Index i : members) leaf_self += cache.lambda(leaf, i);
  LeafSearch search;
  for (int f = 0; f < features; ++f) {
    FeatureOrdering ordering = order_leaf(data, members, f);
    SelfStockSweep sweep;
    if (ordering.values.front() != ordering.values.back()) sweep = self_stock_sweep(ordering, gram, leaf_self);
    search.orderings.push_back(std::move(ordering));
    search.sweeps.push_back(std::move(sweep));
  }
  return search;
}

}  // namespace

TrainResult train(const Matrix& data, const Matrix& gram, const TrainConfig& config) {
  if (!data.allFinite()) throw Error(ErrorCode::NonFiniteInput, "dataset contains NaN or Inf");
  const Index n = data.rows();
  const Index d = data.cols();
  if (n < 1 || d < 1) throw Error(ErrorCode::ConfigInvalid, "empty dataset");
  if (gram.rows() != n || gram.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "kernel must be n x n for the given dataset");
  validate_config(config, n, d);

  const int t_max = config.t_max.value_or(static_cast<int>(n));
  const int features = config.d_max.value_or(static_cast<int>(d));

  TrainResult result;
  result.tree = Tree::single_leaf(static_cast<int>(d), 0, 0);
  Assignments& assign = result.assignments;
  assign.leaf_of_sample.assign(static_cast<std::size_t>(n), 0);
  assign.cluster_of_leaf = {0};

  std::vector<int> node_of_leaf = {0};
  std::vector<int> frontier;
  if (explorable(n, config.min_leaf_size)) frontier.push_back(0);
  int next_cluster = 1;
  std::vector<std::optional<LeafSearch>> searches(1);

  StockCache cache;
  while (true) {
    cache = recompute_caches(assign, gram, config.k_max);
    const double current = objective(cache);
    if (!result.history.empty()) result.history.back().objective_after = current;
    if (config.on_iteration) config.on_iteration(assign, cache);
    if (frontier.empty() || assign.num_leaves() >= t_max) break;

    SweepOptions options;
    options.constraints = {cache.num_clusters_in_use(), config.k_max};
    options.min_leaf_size = config.min_leaf_size;

    const auto members = assign.leaf_members();
    SplitProposal best;
    for (int leaf : frontier) {
      const auto& leaf_samples = members[static_cast<std::size_t>(leaf)];
      const int cluster = assign.cluster_of_leaf[static_cast<std::size_t>(leaf)];
      auto& search = searches[static_cast<std::size_t>(leaf)];
      if (!search) search = prepare_leaf(data, gram, cache, leaf_samples, leaf, features);
      for (int f = 0; f < features; ++f) {
        const auto& sweep = search->sweeps[static_cast<std::size_t>(f)];
        if (sweep.left.empty()) continue;
        options.self_stocks = &sweep;
        const SplitProposal candidate =
            find_best_split(leaf_samples, leaf, cluster, search->orderings[static_cast<std::size_t>(f)], gram,
                            cache, options);
        if (!candidate.is_noop() && candidate.gain > best.gain) best = candidate;
      }
    }
    if (best.is_noop() || !(best.gain > config.gain_tolerance)) break;

    // Resolve new-cluster sentinels to fresh ids.
    auto resolve = [&next_cluster](int target, int& fresh_used) {
      if (target == kNewCluster1) return next_cluster;
      if (target == kNewCluster2) {
        fresh_used = 2;
        return next_cluster + 1;
      }
      return target;
    };
    int fresh_used = 0;
    const int left_cluster = resolve(best.left_target, fresh_used);
    const int right_cluster = resolve(best.right_target, fresh_used);
    if (best.left_target == kNewCluster1 || best.right_target == kNewCluster1) fresh_used = std::max(fresh_used, 1);
    next_cluster += fresh_used;

    const int leaf = best.leaf_id;
    const int right_leaf = assign.num_leaves();
    const FeatureOrdering ordering =
        std::move(searches[static_cast<std::size_t>(leaf)]->orderings[static_cast<std::size_t>(best.feature)]);
    searches[static_cast<std::size_t>(leaf)].reset();
    searches.emplace_back();
    for (std::size_t l = static_cast<std::size_t>(best.split_position); l < ordering.nu.size(); ++l)
      assign.leaf_of_sample[static_cast<std::size_t>(ordering.nu[l])] = right_leaf;
    assign.cluster_of_leaf[static_cast<std::size_t>(leaf)] = left_cluster;
    assign.cluster_of_leaf.push_back(right_cluster);

    const auto [left_node, right_node] =
        result.tree.split_leaf(node_of_leaf[static_cast<std::size_t>(leaf)], best.feature, best.threshold, leaf,
                               left_cluster, right_leaf, right_cluster, best.kind);
    node_of_leaf[static_cast<std::size_t>(leaf)] = left_node;
    node_of_leaf.push_back(right_node);

    frontier.erase(std::remove(frontier.begin(), frontier.end(), leaf), frontier.end());
    const auto left_size = best.split_position;
    const auto right_size = static_cast<Index>(ordering.nu.size()) - best.split_position;
    if (explorable(left_size, config.min_leaf_size)) frontier.push_back(leaf);
    if (explorable(right_size, config.min_leaf_size)) frontier.push_back(right_leaf);

    IterationRecord record;
    record.proposal = best;
    record.objective_before = current;
    record.objective_after = std::numeric_limits<double>::quiet_NaN();
    record.num_leaves_after = assign.num_leaves();
    record.num_clusters_after = assign.num_clusters_in_use();
    result.history.push_back(record);
  }

  result.final_objective = objective(cache);
  result.labels = assign.sample_clusters();
  return result;
}

int predict_sample(const Tree& tree, const Eigen::Ref<const Vector>& sample) {
  if (sample.size() != tree.n_features())
    throw Error(ErrorCode::DimensionMismatch, "sample has " + std::to_string(sample.size()) +
                                                  " features, tree expects " + std::to_string(tree.n_features()));
  if (!sample.allFinite()) throw Error(ErrorCode::NonFiniteInput, "sample contains NaN or Inf");
  return tree.node(tree.route(sample)).cluster;
}

std::vector<int> predict(const Tree& tree, const Matrix& data) {
  if (data.cols() != tree.n_features())
    throw Error(ErrorCode::DimensionMismatch, "data has " + std::to_string(data.cols()) +
                                                  " features, tree expects " + std::to_string(tree.n_features()));
  if (!data.allFinite()) throw Error(ErrorCode::NonFiniteInput, "data contains NaN or Inf");
  std::vector<int> out(static_cast<std::size_t>(data.rows()));
  for (Index i = 0; i < data.rows(); ++i) out[static_cast<std::size_t>(i)] = tree.node(tree.route(data.row(i))).cluster;
  return out;
}

namespace {

std::string format_threshold(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return buffer;
}

void write_json_node(const Tree& tree, int index, std::string& out) {
  const TreeNode& n = tree.node(index);
  if (n.is_leaf) {
    out += "{\"type\":\"leaf\",\"leaf_id\":" + std::to_string(n.leaf_id) +
           ",\"cluster\":" + std::to_string(n.cluster) + "}";
    return;
  }
  out += "{\"type\":\"internal\",\"feature\":" + std::to_string(n.feature) +
         ",\"threshold\":" + format_threshold(n.threshold, 17) + ",\"left\":";
  write_json_node(tree, n.left, out);
  out += ",\"right\":";
  write_json_node(tree, n.right, out);
  out += "}";
}

void write_dot_node(const Tree& tree, int index, int& counter, std::ostringstream& out) {
  const int id = counter++;
  const TreeNode& n = tree.node(index);
  if (n.is_leaf) {
    out << "  n" << id << " [label=\"leaf " << n.leaf_id << " → cluster " << n.cluster << "\"];\n";
    return;
  }
  out << "  n" << id << " [label=\"f" << n.feature << " < " << format_threshold(n.threshold, 6) << "\"];\n";
  const int left_id = counter;
  write_dot_node(tree, n.left, counter, out);
  const int right_id = counter;
  write_dot_node(tree, n.right, counter, out);
  out << "  n" << id << " -> n" << left_id << " [label=\"yes\"];\n";
  out << "  n" << id << " -> n" << right_id << " [label=\"no\"];\n";
}

int require_int(const nlohmann::json& node, const char* key, int lower) {
  if (!node.contains(key) || !node[key].is_number_integer())
    throw Error(ErrorCode::SchemaViolation, std::string("missing integer field '") + key + "'");
  const auto value = node[key].get<long long>();
  if (value < lower || value > std::numeric_limits<int>::max())
    throw Error(ErrorCode::SchemaViolation, std::string("field '") + key + "' out of range");
  return static_cast<int>(value);
}

int read_json_node(const nlohmann::json& node, Tree& tree, std::set<int>& leaf_ids, int depth) {
  if (depth > 100000) throw Error(ErrorCode::SchemaViolation, "tree too deep");
  if (!node.is_object() || !node.contains("type") || !node["type"].is_string())
    throw Error(ErrorCode::SchemaViolation, "node must be an object with a string 'type'");
  const std::string type = node["type"].get<std::string>();
  if (type == "leaf") {
    TreeNode leaf;
    leaf.leaf_id = require_int(node, "leaf_id", 0);
    leaf.cluster = require_int(node, "cluster", 0);
    if (!leaf_ids.insert(leaf.leaf_id).second)
      throw Error(ErrorCode::SchemaViolation, "duplicate leaf_id " + std::to_string(leaf.leaf_id));
    return tree.add_node(leaf);
  }
  if (type != "internal") throw Error(ErrorCode::SchemaViolation, "unknown node type '" + type + "'");

  TreeNode internal;
  internal.is_leaf = false;
  internal.feature = require_int(node, "feature", 0);
  if (internal.feature >= tree.n_features())
    throw Error(ErrorCode::SchemaViolation, "feature index exceeds n_features");
  if (!node.contains("threshold") || !node["threshold"].is_number())
    throw Error(ErrorCode::SchemaViolation, "internal node needs a numeric threshold");
  internal.threshold = node["threshold"].get<double>();
  if (!std::isfinite(internal.threshold)) throw Error(ErrorCode::SchemaViolation, "threshold must be finite");
  if (!node.contains("left") || !node.contains("right"))
    throw Error(ErrorCode::SchemaViolation, "internal node needs left and right children");
  const int self = tree.add_node(internal);
  const int left = read_json_node(node["left"], tree, leaf_ids, depth + 1);
  const int right = read_json_node(node["right"], tree, leaf_ids, depth + 1);
  tree.set_children(self, left, right);
  return self;
}

}  // namespace

std::string export_tree_json(const Tree& tree) {
  std::string out = "{\"version\":1,\"n_features\":" + std::to_string(tree.n_features()) + ",\"root\":";
  write_json_node(tree, 0, out);
  out += "}";
  return out;
}

std::string export_tree_dot(const Tree& tree) {
  std::ostringstream out;
  out << "digraph kauri {\n  node [shape=box];\n";
  int counter = 0;
  write_dot_node(tree, 0, counter, out);
  out << "}\n";
  return out.str();
}

Tree import_tree(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "top level must be an object");
  if (require_int(doc, "version", 0) != 1) throw Error(ErrorCode::SchemaViolation, "unsupported version");
  const int n_features = require_int(doc, "n_features", 1);
  if (!doc.contains("root")) throw Error(ErrorCode::SchemaViolation, "missing root");
  Tree tree(n_features);
  std::set<int> leaf_ids;
  read_json_node(doc["root"], tree, leaf_ids, 0);
  return tree;
}

}  // namespace kauri
