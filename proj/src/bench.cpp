#include "kauri/bench.hpp"

#include "kauri/baselines.hpp"
#include "kauri/errors.hpp"
#include "kauri/metrics.hpp"
#include "kauri/stocks.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>

namespace kauri {

BenchMethod parse_bench_method(std::string_view name) {
  if (name == "kauri") return BenchMethod::Kauri;
  if (name == "kmeans-dt" || name == "kmeans_dt") return BenchMethod::KMeansDt;
  throw Error(ErrorCode::ConfigInvalid, "unknown method '" + std::string(name) + "'");
}

std::string_view to_string(BenchMethod method) {
  return method == BenchMethod::Kauri ? "kauri" : "kmeans-dt";
}

Report run_bench(const Matrix& data, const std::vector<int>* truth, const BenchConfig& config, BenchMethod method) {
  check_finite(data);
  if (truth && static_cast<Index>(truth->size()) != data.rows())
    throw Error(ErrorCode::LengthMismatch, "labels do not match the dataset");
  if (config.runs < 1) throw Error(ErrorCode::ConfigInvalid, "runs must be at least 1");
  if (config.leaves_per_cluster < 1) throw Error(ErrorCode::ConfigInvalid, "leaves per cluster must be >= 1");

  const Matrix prepared = config.scale ? minmax_scale(data) : data;
  Report report;
  for (int r = 0; r < config.runs; ++r) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(r);
    const std::vector<Index> rows = subsample_indices(prepared.rows(), config.subsample, seed);
    if (rows.size() < 2) throw Error(ErrorCode::ConfigInvalid, "subsample keeps fewer than two rows");
    const Matrix sample = take_rows(prepared, rows);
    const Matrix gram = compute_kernel(sample, config.kernel);
    const auto n = static_cast<int>(sample.rows());
    const int budget = std::min(n, config.max_leaves.value_or(config.k_max * config.leaves_per_cluster));

    RunRecord record;
    record.seed = seed;
    std::vector<int> labels;
    Tree tree;
    std::optional<double> reference;
    if (method == BenchMethod::Kauri) {
      TrainConfig train_config;
      train_config.k_max = config.k_max;
      train_config.t_max = budget;
      train_config.gain_tolerance = config.gain_tolerance;
      train_config.seed = seed;
      TrainResult result = train(sample, gram, train_config);
      if (config.on_kauri_run) config.on_kauri_run(sample, gram, result);
      labels = std::move(result.labels);
      tree = std::move(result.tree);
    } else {
      KMeansTreeResult result = kmeans_dt(sample, gram, config.k_max, budget, seed, config.kmeans_restarts);
      labels = std::move(result.labels);
      tree = std::move(result.tree);
      reference = result.kmeans_score;
    }

    if (truth) record.metrics.emplace_back("ari", ari(labels, take(*truth, rows)));
    record.metrics.emplace_back("wad", wad(tree, sample));
    record.metrics.emplace_back("waes", waes(tree, sample));
    const double score = partition_kmeans_score(gram, labels);
    record.metrics.emplace_back("kmeans_score", score);
    if (config.reference_score) {
      if (!reference) reference = best_kernel_kmeans(gram, config.k_max, seed, config.kmeans_restarts).score;
      record.metrics.emplace_back("normalized_score", normalized_kmeans_score(score, *reference));
    }
    record.metrics.emplace_back("leaves", static_cast<double>(tree.num_leaves()));
    record.metrics.emplace_back("clusters", static_cast<double>(std::set<int>(labels.begin(), labels.end()).size()));
    report.runs.push_back(std::move(record));
  }
  return report;
}

}  // namespace kauri
