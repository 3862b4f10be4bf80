#include "kauri/data_io.hpp"

#include "kauri/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace kauri {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// One CSV record; handles quoted fields with doubled quotes. Returns false at EOF.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in, line)) return false;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == line.size()) {
      if (quoted) {
        // Quoted newline: continue with the next physical line.
        std::string more;
        if (!std::getline(in, more)) break;
        field += '\n';
        line = more;
        i = static_cast<std::size_t>(-1);
        continue;
      }
      break;
    }
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  fields.push_back(trim(field));
  return true;
}

bool is_blank(const std::vector<std::string>& fields) {
  return std::all_of(fields.begin(), fields.end(), [](const std::string& f) { return f.empty(); });
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  try {
    const double value = std::stod(text, &used);
    if (used != text.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

bool is_missing(const std::string& text) { return text.empty() || text == "?"; }

std::optional<double> parse_vote(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "y" || lower == "yes" || lower == "1") return 1.0;
  if (lower == "n" || lower == "no" || lower == "-1") return -1.0;
  if (lower == "?" || lower.empty() || lower == "0") return 0.0;
  return std::nullopt;
}

std::string parse_error(std::size_t row, std::size_t col, const std::string& what) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col + 1) + ": " + what;
}

}  // namespace

ColumnKind parse_column_kind(const std::string& name) {
  if (name == "numeric") return ColumnKind::Numeric;
  if (name == "categorical") return ColumnKind::Categorical;
  if (name == "vote") return ColumnKind::Vote;
  if (name == "label") return ColumnKind::Label;
  if (name == "skip") return ColumnKind::Skip;
  throw Error(ErrorCode::ConfigInvalid, "unknown column kind '" + name + "'");
}

ColumnKind ColumnSchema::kind_of(const std::string& name, std::size_t index) const {
  if (auto it = kinds.find(name); it != kinds.end()) return it->second;
  if (auto it = kinds.find(std::to_string(index)); it != kinds.end()) return it->second;
  if (auto it = kinds.find("*"); it != kinds.end()) return it->second;
  return fallback;
}

ColumnSchema load_schema(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, path + ": schema must be a JSON object");
  ColumnSchema schema;
  for (const auto& [name, value] : doc.items()) {
    if (name == "header" && value.is_boolean()) {
      schema.has_header = value.get<bool>();
      continue;
    }
    if (!value.is_string()) throw Error(ErrorCode::ParseError, path + ": kind of '" + name + "' must be a string");
    schema.kinds[name] = parse_column_kind(value.get<std::string>());
  }
  return schema;
}

LoadedData parse_csv(std::istream& in, const ColumnSchema& schema) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  while (read_record(in, fields))
    if (!is_blank(fields)) records.push_back(fields);
  if (records.empty()) throw Error(ErrorCode::EmptyAfterDropping, "no rows in input");

  const std::size_t width = records.front().size();
  std::vector<std::string> names(width);
  for (std::size_t c = 0; c < width; ++c) names[c] = "c" + std::to_string(c);

  bool header = false;
  if (schema.has_header) {
    header = *schema.has_header;
  } else {
    // A first line is a header when a numeric or vote column does not parse.
    const auto& first = records.front();
    for (std::size_t c = 0; c < first.size() && !header; ++c) {
      const ColumnKind kind = schema.kind_of(first[c], c);
      if (kind == ColumnKind::Numeric && !is_missing(first[c]) && !parse_number(first[c])) header = true;
      if (kind == ColumnKind::Vote && !parse_vote(first[c])) header = true;
    }
  }
  if (header) {
    names = records.front();
    records.erase(records.begin());
  }

  std::vector<ColumnKind> kinds(width);
  for (std::size_t c = 0; c < width; ++c) kinds[c] = schema.kind_of(names[c], c);
  if (std::none_of(kinds.begin(), kinds.end(), [](ColumnKind k) {
        return k == ColumnKind::Numeric || k == ColumnKind::Categorical || k == ColumnKind::Vote;
      }))
    throw Error(ErrorCode::ConfigInvalid, "schema leaves no feature columns");

  // First pass: validate, drop rows with missing features, collect levels.
  std::vector<const std::vector<std::string>*> kept;
  std::vector<std::vector<std::string>> levels(width);
  LoadedData out;
  const std::size_t row_offset = header ? 2 : 1;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(r + row_offset) + ": expected " +
                                             std::to_string(width) + " fields, got " + std::to_string(rec.size()));
    bool missing = false;
    for (std::size_t c = 0; c < width; ++c) {
      switch (kinds[c]) {
        case ColumnKind::Numeric:
          if (is_missing(rec[c])) {
            missing = true;
          } else if (!parse_number(rec[c])) {
            throw Error(ErrorCode::ParseError, parse_error(r + row_offset, c, "'" + rec[c] + "' is not numeric"));
          }
          break;
        case ColumnKind::Categorical:
          if (is_missing(rec[c])) missing = true;
          break;
        case ColumnKind::Vote:
          if (!parse_vote(rec[c]))
            throw Error(ErrorCode::ParseError, parse_error(r + row_offset, c, "'" + rec[c] + "' is not a vote"));
          break;
        case ColumnKind::Label:
        case ColumnKind::Skip:
          break;
      }
    }
    if (missing) {
      ++out.dropped_rows;
      continue;
    }
    kept.push_back(&rec);
    for (std::size_t c = 0; c < width; ++c) {
      if (kinds[c] != ColumnKind::Categorical) continue;
      auto& lv = levels[c];
      if (std::find(lv.begin(), lv.end(), rec[c]) == lv.end()) lv.push_back(rec[c]);
    }
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyAfterDropping, "every row had missing values");

  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < width; ++c) {
    if (kinds[c] == ColumnKind::Categorical) {
      for (const auto& level : levels[c]) feature_names.push_back(names[c] + "=" + level);
    } else if (kinds[c] == ColumnKind::Numeric || kinds[c] == ColumnKind::Vote) {
      feature_names.push_back(names[c]);
    }
  }

  const auto n = static_cast<Index>(kept.size());
  Matrix rows = Matrix::Zero(n, static_cast<Index>(feature_names.size()));
  const bool has_label = std::count(kinds.begin(), kinds.end(), ColumnKind::Label) > 0;
  std::vector<int> labels;
  for (Index i = 0; i < n; ++i) {
    const auto& rec = *kept[static_cast<std::size_t>(i)];
    Index f = 0;
    for (std::size_t c = 0; c < width; ++c) {
      switch (kinds[c]) {
        case ColumnKind::Numeric:
          rows(i, f++) = *parse_number(rec[c]);
          break;
        case ColumnKind::Vote:
          rows(i, f++) = *parse_vote(rec[c]);
          break;
        case ColumnKind::Categorical: {
          const auto& lv = levels[c];
          const auto level = std::find(lv.begin(), lv.end(), rec[c]) - lv.begin();
          rows(i, f + level) = 1.0;
          f += static_cast<Index>(lv.size());
          break;
        }
        case ColumnKind::Label: {
          if (!labels.empty() && static_cast<Index>(labels.size()) > i) break;  // first label column wins
          auto it = std::find(out.label_names.begin(), out.label_names.end(), rec[c]);
          if (it == out.label_names.end()) it = out.label_names.insert(out.label_names.end(), rec[c]);
          labels.push_back(static_cast<int>(it - out.label_names.begin()));
          break;
        }
        case ColumnKind::Skip:
          break;
      }
    }
  }
  if (!rows.allFinite()) throw Error(ErrorCode::NonFiniteInput, "input contains NaN or Inf");

  out.data.rows = std::move(rows);
  out.data.feature_names = std::move(feature_names);
  if (has_label) out.labels = std::move(labels);
  return out;
}

LoadedData load_csv(const std::string& path, const ColumnSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return parse_csv(in, schema);
}

Matrix minmax_scale(const Matrix& data) {
  Matrix out(data.rows(), data.cols());
  if (data.rows() == 0) return out;
  const Eigen::RowVectorXd lo = data.colwise().minCoeff();
  const Eigen::RowVectorXd span = data.colwise().maxCoeff() - lo;
  for (Index f = 0; f < data.cols(); ++f) {
    if (span(f) > 0.0)
      out.col(f) = (data.col(f).array() - lo(f)) / span(f);
    else
      out.col(f).setZero();
  }
  return out;
}

LabeledData gen_rotated_gaussians(Index n, double theta, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::ConfigInvalid, "need at least two samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(0.2));
  const double half = std::sqrt(2.0) / 2.0;
  const Eigen::Vector2d mean(half * std::cos(theta), half * std::sin(theta));
  const Index first = (n + 1) / 2;

  LabeledData out;
  out.rows.resize(n, 2);
  out.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const bool positive = i < first;
    const Eigen::Vector2d centre = positive ? mean : Eigen::Vector2d(-mean);
    const double x = noise(rng);
    const double y = noise(rng);
    out.rows(i, 0) = centre(0) + x;
    out.rows(i, 1) = centre(1) + y;
    out.labels[static_cast<std::size_t>(i)] = positive ? 0 : 1;
  }
  return out;
}

LabeledData gen_imm_pathology(Index n_gauss, double epsilon, double v, std::uint64_t seed) {
  if (n_gauss < 2) throw Error(ErrorCode::ConfigInvalid, "need at least two samples per Gaussian");
  if (!(v > 0.0)) throw Error(ErrorCode::ConfigInvalid, "outlier height must be positive");
  if (epsilon < 0.0) throw Error(ErrorCode::ConfigInvalid, "variance must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double scale = std::sqrt(epsilon);

  LabeledData out;
  out.rows.resize(2 * n_gauss + 2, 2);
  out.labels.resize(static_cast<std::size_t>(2 * n_gauss + 2));
  Index i = 0;
  for (int side = 0; side < 2; ++side) {
    const double cx = side == 0 ? -2.0 : 2.0;
    for (Index s = 0; s < n_gauss; ++s, ++i) {
      const double x = noise(rng);
      const double y = noise(rng);
      out.rows(i, 0) = cx + scale * x;
      out.rows(i, 1) = scale * y;
      out.labels[static_cast<std::size_t>(i)] = side;
    }
  }
  out.rows.row(i) << -2.0, v;
  out.labels[static_cast<std::size_t>(i++)] = 2;
  out.rows.row(i) << 2.0, v;
  out.labels[static_cast<std::size_t>(i)] = 2;
  return out;
}

LabeledData gen_hepta_like(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.45);
  const double centres[7][3] = {{0, 0, 0}, {3, 0, 0}, {-3, 0, 0}, {0, 3, 0}, {0, -3, 0}, {0, 0, 3}, {0, 0, -3}};
  LabeledData out;
  out.rows.resize(32 + 6 * 30, 3);
  Index i = 0;
  for (int c = 0; c < 7; ++c) {
    const int count = c == 0 ? 32 : 30;
    for (int s = 0; s < count; ++s, ++i) {
      for (int f = 0; f < 3; ++f) {
        const double z = noise(rng);
        out.rows(i, f) = centres[c][f] + z;
      }
      out.labels.push_back(c);
    }
  }
  return out;
}

LabeledData gen_target_like(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 0.08);
  const double pi = std::acos(-1.0);
  LabeledData out;
  out.rows.resize(770, 2);
  Index i = 0;
  auto polar = [&](double radius, int label) {
    const double angle = 2.0 * pi * unit(rng);
    out.rows(i, 0) = radius * std::cos(angle);
    out.rows(i, 1) = radius * std::sin(angle);
    out.labels.push_back(label);
    ++i;
  };
  for (int s = 0; s < 363; ++s) polar(0.6 * std::sqrt(unit(rng)), 0);
  for (int s = 0; s < 395; ++s) polar(2.0 + 0.3 * (unit(rng) - 0.5), 1);
  const double corners[4][2] = {{-3.5, -3.5}, {-3.5, 3.5}, {3.5, -3.5}, {3.5, 3.5}};
  for (int c = 0; c < 4; ++c) {
    for (int s = 0; s < 3; ++s, ++i) {
      const double dx = jitter(rng);
      const double dy = jitter(rng);
      out.rows(i, 0) = corners[c][0] + dx;
      out.rows(i, 1) = corners[c][1] + dy;
      out.labels.push_back(2 + c);
    }
  }
  return out;
}

std::vector<Index> subsample_indices(Index n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "fraction must lie in (0, 1]");
  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < keep; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(keep);
  std::sort(all.begin(), all.end());
  return all;
}

Matrix take_rows(const Matrix& data, const std::vector<Index>& indices) {
  return data(indices, Eigen::all);
}

std::vector<int> take(const std::vector<int>& values, const std::vector<Index>& indices) {
  std::vector<int> out;
  out.reserve(indices.size());
  for (Index i : indices) out.push_back(values[static_cast<std::size_t>(i)]);
  return out;
}

void write_labels(std::ostream& out, const std::vector<int>& labels) {
  out << "sample_id,cluster\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << ',' << labels[i] << '\n';
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ostringstream text;
  write_labels(text, labels);
  write_text_file(path, text.str());
}

void write_dataset_csv(std::ostream& out, const Matrix& rows, const std::vector<int>* labels) {
  for (Index f = 0; f < rows.cols(); ++f) out << (f ? "," : "") << 'x' << f;
  if (labels) out << ",label";
  out << '\n';
  char buffer[32];
  for (Index i = 0; i < rows.rows(); ++i) {
    for (Index f = 0; f < rows.cols(); ++f) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", rows(i, f));
      out << (f ? "," : "") << buffer;
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary summary;
  if (values.empty()) return summary;
  const double n = static_cast<double>(values.size());
  summary.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - summary.mean) * (v - summary.mean);
    summary.std = std::sqrt(sq / (n - 1.0));
  }
  return summary;
}

std::vector<std::pair<std::string, MetricSummary>> Report::aggregate() const {
  std::vector<std::string> order;
  for (const auto& run : runs)
    for (const auto& [name, value] : run.metrics)
      if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);

  std::vector<std::pair<std::string, MetricSummary>> out;
  for (const auto& name : order) {
    std::vector<double> values;
    for (const auto& run : runs)
      for (const auto& [key, value] : run.metrics)
        if (key == name && std::isfinite(value)) values.push_back(value);
    out.emplace_back(name, summarize(values));
  }
  return out;
}

std::string Report::to_json(int indent) const {
  nlohmann::ordered_json doc;
  doc["runs"] = nlohmann::ordered_json::array();
  for (const auto& run : runs) {
    nlohmann::ordered_json entry;
    entry["seed"] = run.seed;
    for (const auto& [name, value] : run.metrics) entry[name] = std::isfinite(value) ? nlohmann::ordered_json(value) : nullptr;
    doc["runs"].push_back(entry);
  }
  nlohmann::ordered_json agg = nlohmann::ordered_json::object();
  for (const auto& [name, summary] : aggregate()) {
    agg[name]["mean"] = summary.mean;
    agg[name]["std"] = summary.std ? nlohmann::ordered_json(*summary.std) : nullptr;
  }
  doc["aggregate"] = agg;
  return doc.dump(indent);
}

std::string Report::to_text(const std::string& prefix) const {
  std::ostringstream out;
  char buffer[64];
  out << prefix << "runs=" << runs.size() << '\n';
  for (const auto& [name, summary] : aggregate()) {
    std::snprintf(buffer, sizeof(buffer), "%.6g", summary.mean);
    out << prefix << name << ".mean=" << buffer << '\n';
    if (summary.std) {
      std::snprintf(buffer, sizeof(buffer), "%.6g", *summary.std);
      out << prefix << name << ".std=" << buffer << '\n';
    } else {
      out << prefix << name << ".std=null\n";
    }
  }
  return out.str();
}

}  // namespace kauri
