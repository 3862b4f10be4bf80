#pragma once

#include "kauri/data_io.hpp"
#include "kauri/kernels.hpp"
#include "kauri/tree.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace kauri {

enum class BenchMethod { Kauri, KMeansDt };

BenchMethod parse_bench_method(std::string_view name);
std::string_view to_string(BenchMethod method);

struct BenchConfig {
  KernelSpec kernel;
  int k_max = 2;
  int leaves_per_cluster = 1;     // leaf budget = k_max * leaves_per_cluster
  std::optional<int> max_leaves;  // overrides the budget above; clamped to n
  int runs = 30;
  double subsample = 0.8;
  std::uint64_t seed = 0;         // run r uses seed + r
  bool scale = true;              // minmax before subsampling
  double gain_tolerance = 0.0;
  int kmeans_restarts = 10;
  bool reference_score = true;    // normalised score against kernel KMeans
  // Called after each Kauri run with the run's data, kernel and result.
  std::function<void(const Matrix&, const Matrix&, const TrainResult&)> on_kauri_run;
};

/// Runs the subsample protocol for one method and collects per-run ARI (when
/// truth is given), WAD, WAES, kernel KMeans score and its normalised form.
Report run_bench(const Matrix& data, const std::vector<int>* truth, const BenchConfig& config, BenchMethod method);

}  // namespace kauri
