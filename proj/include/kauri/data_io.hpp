#pragma once

#include "kauri/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kauri {

enum class ColumnKind { Numeric, Categorical, Vote, Label, Skip };

ColumnKind parse_column_kind(const std::string& name);

/// Column kinds keyed by header name or by zero-based column index written
/// as a string. "*" sets the kind of every column not listed.
struct ColumnSchema {
  std::map<std::string, ColumnKind> kinds;
  ColumnKind fallback = ColumnKind::Numeric;
  std::optional<bool> has_header;  // detected from the first line when unset

  ColumnKind kind_of(const std::string& name, std::size_t index) const;
};

// Reads a sidecar {"column": "numeric" | "categorical" | "vote" | "label" | "skip", ...}.
ColumnSchema load_schema(const std::string& path);

struct LoadedData {
  Dataset data;
  std::optional<std::vector<int>> labels;  // from the label column, ids by first appearance
  std::vector<std::string> label_names;
  Index dropped_rows = 0;
};

/// Comma separated values with optional double quoting. Numeric columns are
/// parsed as doubles, categorical ones expanded to one-hot indicators, vote
/// columns mapped y -> 1, n -> -1, ? -> 0. Rows with a missing numeric or
/// categorical value ("" or "?") are dropped.
LoadedData parse_csv(std::istream& in, const ColumnSchema& schema);
LoadedData load_csv(const std::string& path, const ColumnSchema& schema);

/// Every feature mapped affinely onto [0, 1]; constant features become 0.
Matrix minmax_scale(const Matrix& data);

struct LabeledData {
  Matrix rows;
  std::vector<int> labels;
};

/// Two isotropic 2-D Gaussians (covariance 0.2 I) centred at
/// +-(sqrt(2)/2)(cos theta, sin theta); the first ceil(n/2) samples are class 0.
LabeledData gen_rotated_gaussians(Index n, double theta, std::uint64_t seed);

/// n_gauss samples from each of N((-2, 0), eps I) and N((2, 0), eps I),
/// followed by the two points (-2, v) and (2, v) labelled 2.
LabeledData gen_imm_pathology(Index n_gauss, double epsilon, double v, std::uint64_t seed);

/// Seven compact 3-D blobs: one at the origin (32 points) and one at +-3 on
/// each axis (30 points each).
LabeledData gen_hepta_like(std::uint64_t seed);

/// 770 points in 2-D: a central disc (363), a surrounding ring (395) and
/// four corner groups of three points.
LabeledData gen_target_like(std::uint64_t seed);

/// floor(fraction * n) distinct indices drawn uniformly, returned ascending.
std::vector<Index> subsample_indices(Index n, double fraction, std::uint64_t seed);
Matrix take_rows(const Matrix& data, const std::vector<Index>& indices);
std::vector<int> take(const std::vector<int>& values, const std::vector<Index>& indices);

void write_labels(std::ostream& out, const std::vector<int>& labels);
void write_labels(const std::string& path, const std::vector<int>& labels);
void write_dataset_csv(std::ostream& out, const Matrix& rows, const std::vector<int>* labels);
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

/// Per-run metrics in insertion order.
struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;
};

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> std;  // sample (n - 1) convention; unset for a single run
};

struct Report {
  std::vector<RunRecord> runs;

  std::vector<std::pair<std::string, MetricSummary>> aggregate() const;
  std::string to_json(int indent = 2) const;
  std::string to_text(const std::string& prefix = "") const;
};

MetricSummary summarize(const std::vector<double>& values);

}  // namespace kauri
