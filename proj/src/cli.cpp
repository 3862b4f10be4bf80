#include "kauri/cli.hpp"

#include "kauri/baselines.hpp"
#include "kauri/bench.hpp"
#include "kauri/data_io.hpp"
#include "kauri/errors.hpp"
#include "kauri/kernels.hpp"
#include "kauri/stocks.hpp"
#include "kauri/tree.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace kauri {

namespace {

struct DataFlags {
  std::string path;
  std::string schema;
  std::string labels_col;
  std::string scale = "minmax";
  long max_samples = 25000;  // dense Gram matrices grow as n^2; 0 lifts the cap
};

struct KernelFlags {
  std::string kind = "linear";
  std::optional<double> gamma;
  int degree = 3;
  double coef0 = 1.0;

  KernelSpec spec() const {
    KernelSpec s;
    s.kind = parse_kernel_kind(kind);
    s.gamma = gamma;
    s.degree = degree;
    s.coef0 = coef0;
    return s;
  }
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--data", flags.path, "input CSV")->required();
  cmd->add_option("--schema", flags.schema, "sidecar JSON mapping columns to kinds");
  cmd->add_option("--labels-col", flags.labels_col, "column holding reference labels");
  cmd->add_option("--scale", flags.scale, "feature scaling")
      ->check(CLI::IsMember({"minmax", "none"}))
      ->capture_default_str();
  cmd->add_option("--max-samples", flags.max_samples, "refuse inputs with more rows (0 for no limit)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

void add_kernel_flags(CLI::App* cmd, KernelFlags& flags) {
  cmd->add_option("--kernel", flags.kind, "linear|rbf|laplacian|chi2|additive-chi2|polynomial")
      ->check(CLI::IsMember({"linear", "rbf", "laplacian", "chi2", "additive-chi2", "additive_chi2", "polynomial"}))
      ->capture_default_str();
  cmd->add_option("--gamma", flags.gamma, "kernel bandwidth (default depends on kernel)");
  cmd->add_option("--degree", flags.degree, "polynomial degree")->capture_default_str();
  cmd->add_option("--coef0", flags.coef0, "polynomial offset")->capture_default_str();
}

LoadedData load(const DataFlags& flags, std::ostream& err) {
  ColumnSchema schema = flags.schema.empty() ? ColumnSchema{} : load_schema(flags.schema);
  if (!flags.labels_col.empty()) schema.kinds[flags.labels_col] = ColumnKind::Label;
  LoadedData loaded = load_csv(flags.path, schema);
  if (loaded.dropped_rows > 0)
    err << "dropped " << loaded.dropped_rows << " rows with missing values\n";
  if (flags.max_samples > 0 && loaded.data.n() > flags.max_samples)
    throw Error(ErrorCode::ConfigInvalid, std::to_string(loaded.data.n()) + " samples exceed --max-samples " +
                                              std::to_string(flags.max_samples));
  if (flags.scale == "minmax") loaded.data.rows = minmax_scale(loaded.data.rows);
  return loaded;
}

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-based unsupervised clustering trees"};
  app.require_subcommand(1);

  DataFlags data_flags;
  KernelFlags kernel_flags;

  // fit
  CLI::App* fit = app.add_subcommand("fit", "train a clustering tree");
  int k_max = 0;
  std::optional<int> max_leaves;
  double gain_tol = 0.0;
  int min_leaf = 1;
  std::string out_tree, out_dot, out_labels;
  add_data_flags(fit, data_flags);
  add_kernel_flags(fit, kernel_flags);
  fit->add_option("--k-max", k_max, "maximum number of clusters")->required()->check(CLI::Range(2, 1 << 30));
  fit->add_option("--max-leaves", max_leaves, "leaf budget (default n)");
  fit->add_option("--gain-tol", gain_tol, "minimum gain for a split")->capture_default_str();
  fit->add_option("--min-leaf", min_leaf, "minimum samples per leaf")->capture_default_str();
  fit->add_option("--out-tree", out_tree, "write tree JSON");
  fit->add_option("--out-dot", out_dot, "write tree DOT");
  fit->add_option("--out-labels", out_labels, "write sample_id,cluster CSV");

  // predict
  CLI::App* pred = app.add_subcommand("predict", "route samples through a saved tree");
  DataFlags pred_data;
  pred_data.max_samples = 0;  // routing needs no Gram matrix
  std::string tree_path;
  std::string pred_out;
  add_data_flags(pred, pred_data);
  pred->add_option("--tree", tree_path, "tree JSON")->required();
  pred->add_option("--out-labels", pred_out, "output CSV (default stdout)");

  // bench
  CLI::App* bench = app.add_subcommand("bench", "repeated subsample benchmark");
  DataFlags bench_data;
  KernelFlags bench_kernel;
  BenchConfig bench_config;
  std::string method = "kauri";
  std::string report_path;
  std::string report_format = "json";
  add_data_flags(bench, bench_data);
  add_kernel_flags(bench, bench_kernel);
  bench->add_option("--k-max", bench_config.k_max, "number of clusters")->required()->check(CLI::Range(2, 1 << 30));
  bench->add_option("--runs", bench_config.runs, "number of runs")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--subsample", bench_config.subsample, "fraction kept per run")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--seed", bench_config.seed, "base seed; run r uses seed + r")->capture_default_str();
  bench->add_option("--method", method, "kauri|kmeans-dt|both")
      ->check(CLI::IsMember({"kauri", "kmeans-dt", "both"}))
      ->capture_default_str();
  bench->add_option("--leaves-per-cluster", bench_config.leaves_per_cluster, "leaf budget per cluster")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--max-leaves", bench_config.max_leaves, "explicit leaf budget");
  bench->add_option("--gain-tol", bench_config.gain_tolerance, "minimum gain for a split")->capture_default_str();
  bench->add_option("--restarts", bench_config.kmeans_restarts, "kernel KMeans restarts")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--format", report_format, "json|text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  bench->add_option("--out", report_path, "also write the report here");

  // gen
  CLI::App* gen = app.add_subcommand("gen", "write a synthetic dataset");
  std::string gen_kind;
  Index gen_n = 1000;
  double theta = std::acos(-1.0) / 4.0;
  double epsilon = 0.05;
  double height = 1000.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--kind", gen_kind, "rotated-gaussians|imm-pathology|hepta-like|target-like")
      ->required()
      ->check(CLI::IsMember({"rotated-gaussians", "imm-pathology", "hepta-like", "target-like"}));
  gen->add_option("--n", gen_n, "samples (per Gaussian for imm-pathology)")->capture_default_str();
  gen->add_option("--theta", theta, "rotation angle in radians")->capture_default_str();
  gen->add_option("--epsilon", epsilon, "Gaussian variance for imm-pathology")->capture_default_str();
  gen->add_option("--v", height, "outlier height for imm-pathology")->capture_default_str();
  gen->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output CSV (default stdout)");

  // kkmeans
  CLI::App* kkm = app.add_subcommand("kkmeans", "kernel KMeans restarts and non-empty cluster histogram");
  DataFlags kkm_data;
  KernelFlags kkm_kernel;
  int kkm_k = 2;
  int kkm_runs = 100;
  std::uint64_t kkm_seed = 0;
  add_data_flags(kkm, kkm_data);
  add_kernel_flags(kkm, kkm_kernel);
  kkm->add_option("--k", kkm_k, "number of clusters")->required()->check(CLI::PositiveNumber);
  kkm->add_option("--runs", kkm_runs, "random restarts")->capture_default_str()->check(CLI::PositiveNumber);
  kkm->add_option("--seed", kkm_seed, "base seed; run r uses seed + r")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  try {
    if (fit->parsed()) {
      const LoadedData loaded = load(data_flags, err);
      const Matrix& x = loaded.data.rows;
      const Matrix gram = compute_kernel(x, kernel_flags.spec());
      TrainConfig config;
      config.k_max = k_max;
      config.t_max = max_leaves;
      config.gain_tolerance = gain_tol;
      config.min_leaf_size = min_leaf;
      const TrainResult result = train(x, gram, config);
      if (!out_tree.empty()) write_text_file(out_tree, export_tree_json(result.tree) + "\n");
      if (!out_dot.empty()) write_text_file(out_dot, export_tree_dot(result.tree));
      if (!out_labels.empty()) write_labels(out_labels, result.labels);
      out << "objective=" << fmt(result.final_objective) << '\n';
      out << "kmeans_score=" << fmt(partition_kmeans_score(gram, result.labels)) << '\n';
      out << "leaves=" << result.tree.num_leaves() << '\n';
      out << "clusters=" << result.num_clusters() << '\n';
      out << "iterations=" << result.history.size() << '\n';
    } else if (pred->parsed()) {
      const Tree tree = import_tree(read_text_file(tree_path));
      const LoadedData loaded = load(pred_data, err);
      const std::vector<int> labels = predict(tree, loaded.data.rows);
      if (pred_out.empty())
        write_labels(out, labels);
      else
        write_labels(pred_out, labels);
    } else if (bench->parsed()) {
      const LoadedData loaded = load(bench_data, err);
      if (!bench_data.labels_col.empty() && !loaded.labels)
        throw Error(ErrorCode::ConfigInvalid, "label column '" + bench_data.labels_col + "' not found");
      bench_config.kernel = bench_kernel.spec();
      bench_config.scale = false;  // load() already scaled
      const std::vector<int>* truth = loaded.labels ? &*loaded.labels : nullptr;

      std::vector<std::pair<BenchMethod, Report>> reports;
      if (method == "both") {
        for (BenchMethod m : {BenchMethod::Kauri, BenchMethod::KMeansDt})
          reports.emplace_back(m, run_bench(loaded.data.rows, truth, bench_config, m));
      } else {
        const BenchMethod m = parse_bench_method(method);
        reports.emplace_back(m, run_bench(loaded.data.rows, truth, bench_config, m));
      }

      std::string text;
      if (report_format == "text") {
        for (const auto& [m, report] : reports)
          text += report.to_text(reports.size() > 1 ? std::string(to_string(m)) + "." : "");
      } else if (reports.size() == 1) {
        text = reports.front().second.to_json() + "\n";
      } else {
        nlohmann::ordered_json doc;
        for (const auto& [m, report] : reports)
          doc[std::string(to_string(m))] = nlohmann::ordered_json::parse(report.to_json());
        text = doc.dump(2) + "\n";
      }
      out << text;
      if (!report_path.empty()) write_text_file(report_path, text);
    } else if (gen->parsed()) {
      LabeledData data;
      if (gen_kind == "rotated-gaussians")
        data = gen_rotated_gaussians(gen_n, theta, gen_seed);
      else if (gen_kind == "imm-pathology")
        data = gen_imm_pathology(gen_n, epsilon, height, gen_seed);
      else if (gen_kind == "hepta-like")
        data = gen_hepta_like(gen_seed);
      else
        data = gen_target_like(gen_seed);
      std::ostringstream text;
      write_dataset_csv(text, data.rows, &data.labels);
      if (gen_out.empty())
        out << text.str();
      else
        write_text_file(gen_out, text.str());
    } else if (kkm->parsed()) {
      const LoadedData loaded = load(kkm_data, err);
      const Matrix gram = compute_kernel(loaded.data.rows, kkm_kernel.spec());
      std::map<int, int> histogram;
      for (int c = 1; c <= kkm_k; ++c) histogram[c] = 0;
      nlohmann::ordered_json doc;
      doc["k"] = kkm_k;
      doc["runs"] = kkm_runs;
      doc["nonempty"] = nlohmann::ordered_json::array();
      for (int r = 0; r < kkm_runs; ++r) {
        KernelKMeansOptions options;
        options.k = kkm_k;
        options.seed = kkm_seed + static_cast<std::uint64_t>(r);
        const KernelKMeansState state = kernel_kmeans(gram, options);
        const int count = count_nonempty(state);
        ++histogram[count];
        doc["nonempty"].push_back(count);
      }
      nlohmann::ordered_json hist = nlohmann::ordered_json::object();
      for (const auto& [count, runs] : histogram) hist[std::to_string(count)] = runs;
      doc["histogram"] = hist;
      out << doc.dump(2) << '\n';
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace kauri
