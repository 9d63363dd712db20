// Command-line front door: run AGC, evaluate partitions, apply filters,
// generate synthetic data, emit sweep tables.
//
// Exit codes: 0 success, 2 usage/validation/parse errors, 1 internal errors.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "agc/agc.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

agc::NmiNorm parse_nmi_norm(const std::string& name) {
  if (name == "geometric") return agc::NmiNorm::geometric;
  if (name == "arithmetic") return agc::NmiNorm::arithmetic;
  if (name == "max") return agc::NmiNorm::max;
  throw agc::ValidationError("unknown NMI normalization: " + name);
}

struct CommonInputs {
  std::string edges;
  std::string features;
  std::string labels;  // optional ground truth
  agc::Index n_hint = 0;
};

struct DriverFlags {
  int clusters = 0;
  int max_iter = 60;
  std::uint64_t seed = 0;
  int restarts = 10;
  bool row_normalize = false;
  bool scale_embedding = false;
  std::string nmi_norm = "geometric";
  agc::Index dense_eig_cutoff = 1024;
};

agc::AgcConfig make_config(const DriverFlags& f) {
  agc::AgcConfig cfg;
  cfg.m = f.clusters;
  cfg.max_iter = f.max_iter;
  cfg.seed = f.seed;
  cfg.kmeans.restarts = f.restarts;
  cfg.row_normalize = f.row_normalize;
  cfg.scale_by_eigenvalues = f.scale_embedding;
  cfg.eigs.dense_cutoff = f.dense_eig_cutoff;
  cfg.nmi_norm = parse_nmi_norm(f.nmi_norm);
  return cfg;
}

json config_json(const DriverFlags& f) {
  return json{{"clusters", f.clusters},
              {"max_iter", f.max_iter},
              {"seed", f.seed},
              {"restarts", f.restarts},
              {"row_normalize", f.row_normalize},
              {"scale_embedding", f.scale_embedding},
              {"nmi_norm", f.nmi_norm},
              {"dense_eig_cutoff", f.dense_eig_cutoff}};
}

agc::SparseGraph load_graph(const std::string& path, agc::Index n_hint) {
  auto in = agc::open_input(path);
  try {
    return agc::load_edge_list(in, n_hint);
  } catch (const agc::ParseError& e) {
    throw agc::ParseError(path + ": " + e.what(), e.line());
  }
}

agc::FeatureMatrix load_features(const std::string& path) {
  auto in = agc::open_input(path);
  return agc::read_features_csv(in);
}

agc::ClusterPartition load_partition(const std::string& path) {
  auto in = agc::open_input(path);
  return agc::ClusterPartition::from_labels(agc::read_labels(in));
}

void check_n(const agc::SparseGraph& g, const agc::FeatureMatrix& x) {
  if (g.num_nodes() != x.rows())
    throw agc::ValidationError(
        "graph has " + std::to_string(g.num_nodes()) + " nodes but features have " +
        std::to_string(x.rows()) + " rows; pass --n if the edge file alone "
        "does not determine the node count");
}

/// Emits JSON to a file (atomically) or, for path "-" or empty, to stdout.
void emit_json(const std::string& path, const json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
  } else {
    agc::atomic_write_file(path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
  }
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command, std::string explicit_path)
      : command_(std::move(command)), explicit_path_(std::move(explicit_path)) {}

  void add_input(const std::string& key, const std::string& path) {
    if (!path.empty()) inputs_[key] = path;
  }
  void add_output(const std::string& key, const std::string& path) {
    if (!path.empty() && path != "-") outputs_[key] = path;
  }
  void set_config(json cfg) { config_ = std::move(cfg); }
  void set_results(json results) { results_ = std::move(results); }
  void add_timing(const std::string& stage, double ms) { timings_[stage] = ms; }

  /// Writes next to the first output file unless an explicit path was given.
  void write() const {
    std::string path = explicit_path_;
    if (path.empty()) {
      if (outputs_.empty()) return;  // nothing on disk to sit alongside
      path = outputs_.begin()->second + ".manifest.json";
    }
    json j{{"tool", "agc"},
           {"version", agc::kVersion},
           {"command", command_},
           {"inputs", inputs_},
           {"config", config_},
           {"outputs", outputs_},
           {"timings_ms", timings_}};
    if (!results_.is_null()) j["results"] = results_;
    agc::atomic_write_file(path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
  }

 private:
  std::string command_;
  std::string explicit_path_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
  json config_;
  json results_;
  std::map<std::string, double> timings_;
};

int cmd_run(const CommonInputs& in, const DriverFlags& flags,
            const std::string& out_labels, const std::string& out_metrics,
            const std::string& out_trace, const std::string& out_filtered,
            const std::string& out_manifest) {
  ManifestWriter manifest("run", out_manifest);
  manifest.add_input("edges", in.edges);
  manifest.add_input("features", in.features);
  manifest.add_input("labels", in.labels);
  json cfg_json = config_json(flags);
  cfg_json["n"] = in.n_hint;
  manifest.set_config(cfg_json);

  auto t0 = Clock::now();
  const agc::SparseGraph g = load_graph(in.edges, in.n_hint);
  const agc::FeatureMatrix x = load_features(in.features);
  check_n(g, x);
  std::optional<agc::ClusterPartition> truth;
  if (!in.labels.empty()) {
    truth = load_partition(in.labels);
    if (truth->size() != static_cast<std::size_t>(g.num_nodes()))
      throw agc::ValidationError("label count does not match node count");
  }
  manifest.add_timing("load", ms_since(t0));

  t0 = Clock::now();
  const agc::AgcConfig cfg = make_config(flags);
  const agc::AgcResult result = agc::run_agc(g, x, cfg);
  manifest.add_timing("run", ms_since(t0));

  // The iteration at t = selected_k already measured the reported partition.
  const double intra =
      result.trace.iterations[static_cast<std::size_t>(result.k) - 1].intra;
  std::cout << "selected_k: " << result.k << "\n";
  std::cout << "intra: " << agc::detail::format_double(intra) << "\n";
  std::cout << "stop_reason: " << agc::to_string(result.trace.stop_reason) << "\n";

  agc::MetricsReport report;
  report.k_selected = result.k;
  report.intra = intra;
  if (truth) {
    auto [acc_value, matching] = agc::accuracy(result.partition, *truth);
    report.acc = acc_value;
    report.matching = std::move(matching);
    report.nmi = agc::nmi(result.partition, *truth, cfg.nmi_norm);
    report.macro_f1 = agc::macro_f1(result.partition, *truth);
    std::cout << "acc: " << agc::detail::format_double(*report.acc) << "\n";
    std::cout << "nmi: " << agc::detail::format_double(*report.nmi) << "\n";
    std::cout << "f1: " << agc::detail::format_double(*report.macro_f1) << "\n";
  }

  t0 = Clock::now();
  if (!out_labels.empty())
    agc::atomic_write_file(out_labels, [&](std::ostream& out) {
      agc::write_labels(out, result.partition.labels);
    });
  if (!out_metrics.empty()) emit_json(out_metrics, report.to_json());
  if (!out_trace.empty())
    agc::atomic_write_file(out_trace, [&](std::ostream& out) {
      agc::write_trace_jsonl(out, result.trace);
    });
  if (!out_filtered.empty())
    agc::atomic_write_file(out_filtered, [&](std::ostream& out) {
      agc::write_features_csv(out, result.filtered);
    });
  manifest.add_timing("write", ms_since(t0));

  manifest.add_output("labels", out_labels);
  manifest.add_output("metrics", out_metrics);
  manifest.add_output("trace", out_trace);
  manifest.add_output("filtered", out_filtered);
  manifest.set_results(json{{"selected_k", result.k},
                            {"intra", intra},
                            {"stop_reason", agc::to_string(result.trace.stop_reason)}});
  manifest.write();
  return 0;
}

int cmd_sweep(const CommonInputs& in, const DriverFlags& flags, int k_max,
              const std::string& out, const std::string& out_manifest) {
  ManifestWriter manifest("sweep", out_manifest);
  manifest.add_input("edges", in.edges);
  manifest.add_input("features", in.features);
  manifest.add_input("labels", in.labels);
  json cfg_json = config_json(flags);
  cfg_json["n"] = in.n_hint;
  cfg_json["k_max"] = k_max;
  manifest.set_config(cfg_json);

  auto t0 = Clock::now();
  const agc::SparseGraph g = load_graph(in.edges, in.n_hint);
  const agc::FeatureMatrix x = load_features(in.features);
  check_n(g, x);
  std::optional<agc::ClusterPartition> truth;
  if (!in.labels.empty()) truth = load_partition(in.labels);
  manifest.add_timing("load", ms_since(t0));

  t0 = Clock::now();
  const auto rows =
      agc::sweep_k(g, x, k_max, make_config(flags), truth ? &*truth : nullptr);
  manifest.add_timing("sweep", ms_since(t0));

  if (out.empty() || out == "-") {
    agc::write_sweep_tsv(std::cout, rows);
  } else {
    agc::atomic_write_file(
        out, [&](std::ostream& os) { agc::write_sweep_tsv(os, rows); });
    manifest.add_output("table", out);
  }
  manifest.write();
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& features_path, const std::string& out,
             const std::string& nmi_norm) {
  const agc::ClusterPartition pred = load_partition(pred_path);
  const agc::ClusterPartition truth = load_partition(truth_path);
  if (pred.size() != truth.size())
    throw agc::ValidationError("prediction and truth have different lengths");
  std::optional<agc::FeatureMatrix> x;
  if (!features_path.empty()) {
    x = load_features(features_path);
    if (x->rows() != static_cast<agc::Index>(pred.size()))
      throw agc::ValidationError("feature rows do not match label count");
  }
  const agc::MetricsReport report =
      agc::evaluate(pred, &truth, x ? &*x : nullptr, parse_nmi_norm(nmi_norm));
  emit_json(out, report.to_json());
  return 0;
}

int cmd_filter(const CommonInputs& in, int k, const std::string& out,
               const std::string& response_table, int response_samples,
               const std::string& out_manifest) {
  ManifestWriter manifest("filter", out_manifest);
  manifest.add_input("edges", in.edges);
  manifest.add_input("features", in.features);
  manifest.set_config(json{{"k", k}, {"n", in.n_hint}});

  const agc::SparseGraph g = load_graph(in.edges, in.n_hint);
  const agc::FeatureMatrix x = load_features(in.features);
  check_n(g, x);
  const agc::PropagationOperator op(g);
  const agc::FeatureMatrix xbar = agc::convolve_k(op, x, k);

  if (out.empty() || out == "-") {
    agc::write_features_csv(std::cout, xbar);
  } else {
    agc::atomic_write_file(
        out, [&](std::ostream& os) { agc::write_features_csv(os, xbar); });
    manifest.add_output("filtered", out);
  }
  if (!response_table.empty()) {
    agc::atomic_write_file(response_table, [&](std::ostream& os) {
      agc::write_response_table(os, k, response_samples);
    });
    manifest.add_output("response_table", response_table);
  }
  manifest.write();
  return 0;
}

int cmd_gen_sbm(const agc::SbmSpec& spec, const std::string& prefix) {
  const agc::SbmInstance inst = agc::gen_sbm(spec);

  agc::atomic_write_file(prefix + ".edges", [&](std::ostream& out) {
    const auto& g = inst.graph;
    out << "# sbm n=" << spec.n << " m=" << spec.m << " seed=" << spec.seed << "\n";
    for (agc::Index u = 0; u < g.num_nodes(); ++u) {
      auto cols = g.neighbors(u);
      for (std::size_t p = 0; p < cols.size(); ++p)
        if (cols[p] >= u) out << u << '\t' << cols[p] << '\n';
    }
  });
  agc::atomic_write_file(prefix + ".features.csv", [&](std::ostream& out) {
    agc::write_features_csv(out, inst.features);
  });
  agc::atomic_write_file(prefix + ".labels", [&](std::ostream& out) {
    agc::write_labels(out, inst.labels.labels);
  });
  const json spec_json{{"n", spec.n},         {"m", spec.m},
                       {"p_in", spec.p_in},   {"p_out", spec.p_out},
                       {"d", spec.d},         {"mu_sep", spec.mu_sep},
                       {"sigma", spec.sigma}, {"seed", spec.seed}};
  agc::atomic_write_file(prefix + ".spec.json", [&](std::ostream& out) {
    out << spec_json.dump(2) << "\n";
  });

  ManifestWriter manifest("gen-sbm", "");
  manifest.set_config(spec_json);
  manifest.add_output("edges", prefix + ".edges");
  manifest.add_output("features", prefix + ".features.csv");
  manifest.add_output("labels", prefix + ".labels");
  manifest.add_output("spec", prefix + ".spec.json");
  manifest.write();

  std::cout << "nodes: " << inst.graph.num_nodes() << "\n";
  std::cout << "undirected_edges: " << inst.graph.num_undirected_edges() << "\n";
  return 0;
}

int cmd_baseline(const CommonInputs& in, const std::string& mode, int clusters,
                 std::uint64_t seed, int restarts, const std::string& out_labels,
                 const std::string& out_metrics) {
  agc::SpectralOptions opt;
  opt.seed = seed;
  opt.kmeans.restarts = restarts;

  agc::ClusterPartition part;
  std::optional<agc::FeatureMatrix> x;
  if (mode == "spectral-f" || mode == "kmeans") {
    if (in.features.empty())
      throw agc::ValidationError("--features required for mode " + mode);
    x = load_features(in.features);
    part = mode == "kmeans" ? agc::kmeans(*x, clusters, seed, opt.kmeans)
                            : agc::spectral_cluster(*x, clusters, opt);
  } else if (mode == "spectral-g") {
    if (in.edges.empty())
      throw agc::ValidationError("--edges required for mode spectral-g");
    const agc::SparseGraph g = load_graph(in.edges, in.n_hint);
    part = agc::cluster_similarity(g.to_dense(), clusters, opt);
  } else {
    throw agc::ValidationError("unknown baseline mode: " + mode);
  }

  agc::MetricsReport report;
  if (!in.labels.empty()) {
    const agc::ClusterPartition truth = load_partition(in.labels);
    report = agc::evaluate(part, &truth, x ? &*x : nullptr);
    std::cout << "acc: " << agc::detail::format_double(*report.acc) << "\n";
    std::cout << "nmi: " << agc::detail::format_double(*report.nmi) << "\n";
    std::cout << "f1: " << agc::detail::format_double(*report.macro_f1) << "\n";
  }
  if (!out_labels.empty())
    agc::atomic_write_file(out_labels, [&](std::ostream& out) {
      agc::write_labels(out, part.labels);
    });
  if (!out_metrics.empty()) emit_json(out_metrics, report.to_json());
  return 0;
}

int cmd_remap_ids(const std::string& edges_in, const std::string& edges_out,
                  const std::string& map_out) {
  auto in = agc::open_input(edges_in);
  std::string line;
  std::size_t lineno = 0;
  std::map<long long, agc::Index> id_map;  // sorted old id -> dense id
  std::vector<std::tuple<long long, long long, std::string>> raw;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u >> v)) throw agc::ParseError("expected \"u v [w]\"", lineno);
    std::string rest;
    std::getline(ls, rest);
    id_map[u] = 0;
    id_map[v] = 0;
    raw.emplace_back(u, v, rest);
  }
  agc::Index next = 0;
  for (auto& [old_id, dense] : id_map) dense = next++;

  agc::atomic_write_file(edges_out, [&](std::ostream& out) {
    for (const auto& [u, v, rest] : raw)
      out << id_map.at(u) << '\t' << id_map.at(v) << rest << '\n';
  });
  agc::atomic_write_file(map_out, [&](std::ostream& out) {
    for (const auto& [old_id, dense] : id_map)
      out << old_id << '\t' << dense << '\n';
  });
  std::cout << "nodes: " << next << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive graph convolution clustering for attributed graphs"};
  app.set_version_flag("--version", agc::kVersion);
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("-t,--threads", threads,
                 "Worker threads (default: AGC_THREADS env or all cores); "
                 "results do not depend on this")
      ->envname("AGC_THREADS");

  CommonInputs in;
  DriverFlags flags;

  // run
  auto* run = app.add_subcommand("run", "Adaptive k-order filtering + clustering");
  run->add_option("--edges", in.edges, "Edge-list file")->required();
  run->add_option("--features", in.features, "Feature CSV")->required();
  run->add_option("--clusters", flags.clusters, "Number of clusters")->required();
  run->add_option("--labels", in.labels, "Ground-truth labels (optional)");
  run->add_option("--n", in.n_hint, "Node-count hint");
  run->add_option("--max-iter", flags.max_iter, "Maximum filter order")->capture_default_str();
  run->add_option("--seed", flags.seed, "Master seed")->capture_default_str();
  run->add_option("--restarts", flags.restarts, "k-means restarts")->capture_default_str();
  run->add_flag("--row-normalize", flags.row_normalize,
                "Row-normalize the spectral embedding before k-means");
  run->add_flag("--scale-embedding", flags.scale_embedding,
                "Scale eigenvectors by their eigenvalues before k-means");
  run->add_option("--nmi-norm", flags.nmi_norm,
                  "NMI normalization: geometric|arithmetic|max")->capture_default_str();
  run->add_option("--dense-eig-cutoff", flags.dense_eig_cutoff,
                  "Matrix size above which the Lanczos path is used")->capture_default_str();
  std::string out_labels, out_metrics, out_trace, out_filtered, out_manifest;
  run->add_option("--out-labels", out_labels, "Predicted labels output");
  run->add_option("--out-metrics", out_metrics, "Metrics JSON output (- for stdout)");
  run->add_option("--out-trace", out_trace, "Per-iteration trace (JSON lines)");
  run->add_option("--out-filtered", out_filtered, "Filtered features CSV output");
  run->add_option("--out-manifest", out_manifest, "Run manifest path");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate every order k = 1..k_max");
  int k_max = 1;
  std::string sweep_out;
  sweep->add_option("--edges", in.edges, "Edge-list file")->required();
  sweep->add_option("--features", in.features, "Feature CSV")->required();
  sweep->add_option("--clusters", flags.clusters, "Number of clusters")->required();
  sweep->add_option("--k-max", k_max, "Largest order to evaluate")->required();
  sweep->add_option("--labels", in.labels, "Ground-truth labels (optional)");
  sweep->add_option("--n", in.n_hint, "Node-count hint");
  sweep->add_option("--seed", flags.seed, "Master seed")->capture_default_str();
  sweep->add_option("--restarts", flags.restarts, "k-means restarts")->capture_default_str();
  sweep->add_flag("--row-normalize", flags.row_normalize, "");
  sweep->add_flag("--scale-embedding", flags.scale_embedding, "");
  sweep->add_option("--nmi-norm", flags.nmi_norm, "")->capture_default_str();
  sweep->add_option("--dense-eig-cutoff", flags.dense_eig_cutoff, "")->capture_default_str();
  sweep->add_option("--out", sweep_out, "TSV output path (- for stdout)");
  sweep->add_option("--out-manifest", out_manifest, "Run manifest path");

  // eval
  auto* eval = app.add_subcommand("eval", "Metrics for a predicted partition");
  std::string pred_path, truth_path, eval_features, eval_out;
  std::string eval_nmi_norm = "geometric";
  eval->add_option("--pred", pred_path, "Predicted labels")->required();
  eval->add_option("--truth", truth_path, "Ground-truth labels")->required();
  eval->add_option("--features", eval_features, "Features for intra (optional)");
  eval->add_option("--out", eval_out, "Metrics JSON output (default stdout)");
  eval->add_option("--nmi-norm", eval_nmi_norm, "")->capture_default_str();

  // filter
  auto* filter = app.add_subcommand("filter", "Write k-order filtered features");
  int filter_k = 1;
  std::string filter_out, response_table;
  int response_samples = 101;
  filter->add_option("--edges", in.edges, "Edge-list file")->required();
  filter->add_option("--features", in.features, "Feature CSV")->required();
  filter->add_option("--k", filter_k, "Filter order")->required();
  filter->add_option("--n", in.n_hint, "Node-count hint");
  filter->add_option("--out", filter_out, "Filtered CSV output (- for stdout)");
  filter->add_option("--response-table", response_table,
                     "Also write p(lambda) samples to this path");
  filter->add_option("--response-samples", response_samples,
                     "Grid points for the response table")->capture_default_str();
  filter->add_option("--out-manifest", out_manifest, "Run manifest path");

  // gen-sbm
  auto* gen = app.add_subcommand("gen-sbm", "Generate a synthetic SBM instance");
  agc::SbmSpec spec;
  std::string prefix;
  gen->add_option("--n", spec.n, "Nodes")->capture_default_str();
  gen->add_option("--blocks", spec.m, "Blocks (= clusters)")->capture_default_str();
  gen->add_option("--p-in", spec.p_in, "Intra-block edge probability")->capture_default_str();
  gen->add_option("--p-out", spec.p_out, "Inter-block edge probability")->capture_default_str();
  gen->add_option("--dim", spec.d, "Feature dimension")->capture_default_str();
  gen->add_option("--mu-sep", spec.mu_sep, "Center separation")->capture_default_str();
  gen->add_option("--sigma", spec.sigma, "Feature noise std")->capture_default_str();
  gen->add_option("--seed", spec.seed, "Seed")->capture_default_str();
  gen->add_option("--out-prefix", prefix, "Output path prefix")->required();

  // baseline
  auto* baseline = app.add_subcommand(
      "baseline", "Feature/graph-only baselines: spectral-f, spectral-g, kmeans");
  std::string mode = "spectral-f";
  baseline->add_option("--mode", mode, "spectral-f|spectral-g|kmeans")->capture_default_str();
  baseline->add_option("--features", in.features, "Feature CSV (feature modes)");
  baseline->add_option("--edges", in.edges, "Edge-list file (spectral-g)");
  baseline->add_option("--clusters", flags.clusters, "Number of clusters")->required();
  baseline->add_option("--labels", in.labels, "Ground-truth labels (optional)");
  baseline->add_option("--n", in.n_hint, "Node-count hint");
  baseline->add_option("--seed", flags.seed, "Master seed")->capture_default_str();
  baseline->add_option("--restarts", flags.restarts, "k-means restarts")->capture_default_str();
  baseline->add_option("--out-labels", out_labels, "Predicted labels output");
  baseline->add_option("--out-metrics", out_metrics, "Metrics JSON output");

  // remap-ids
  auto* remap = app.add_subcommand(
      "remap-ids", "Map sparse node ids to dense 0..n-1, emitting an id map");
  std::string remap_in, remap_out, remap_map;
  remap->add_option("--edges", remap_in, "Edge-list with arbitrary integer ids")
      ->required();
  remap->add_option("--out-edges", remap_out, "Remapped edge-list")->required();
  remap->add_option("--out-map", remap_map, "TSV old-id -> dense-id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  agc::set_thread_count(threads);

  try {
    if (run->parsed())
      return cmd_run(in, flags, out_labels, out_metrics, out_trace,
                     out_filtered, out_manifest);
    if (sweep->parsed()) return cmd_sweep(in, flags, k_max, sweep_out, out_manifest);
    if (eval->parsed())
      return cmd_eval(pred_path, truth_path, eval_features, eval_out, eval_nmi_norm);
    if (filter->parsed())
      return cmd_filter(in, filter_k, filter_out, response_table,
                        response_samples, out_manifest);
    if (gen->parsed()) return cmd_gen_sbm(spec, prefix);
    if (baseline->parsed())
      return cmd_baseline(in, mode, flags.clusters, flags.seed, flags.restarts,
                          out_labels, out_metrics);
    if (remap->parsed()) return cmd_remap_ids(remap_in, remap_out, remap_map);
  } catch (const agc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const agc::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
