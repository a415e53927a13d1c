// Command-line front end: SBM generation, SGC-GEN detection, clustering
// evaluation, the detectability phase diagram, and method ranking.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "sgcgen/error.hpp"
#include "sgcgen/format.hpp"
#include "sgcgen/graph.hpp"
#include "sgcgen/metrics.hpp"
#include "sgcgen/model_selection.hpp"
#include "sgcgen/phase_diagram.hpp"
#include "sgcgen/sbm.hpp"
#include "sgcgen/spectral.hpp"

namespace {

using namespace sgcgen;

std::vector<std::size_t> parse_sizes(const std::string& spec) {
  std::vector<std::size_t> out;
  for (const std::string& f : split_csv_line(spec)) {
    if (f.empty()) continue;
    const double v = parse_double(f, "--sizes");
    if (v < 1.0 || v != std::floor(v))
      throw Error(ErrorCode::validation, "--sizes entries must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw Error(ErrorCode::validation, "--sizes is empty");
  return out;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot open output file: " + path);
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out = open_output(path);
  out << content;
  if (!out) throw Error(ErrorCode::io, "failed writing: " + path);
}

SbmParams params_from_flags(const std::string& params_path, const std::string& sizes_spec,
                            const std::string& p_spec, double p_in, double p_out) {
  if (!params_path.empty()) {
    std::ifstream in(params_path);
    if (!in) throw Error(ErrorCode::io, "cannot open params file: " + params_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, std::string("bad params JSON: ") + e.what());
    }
    return SbmParams::from_json(j);
  }
  if (sizes_spec.empty())
    throw Error(ErrorCode::validation, "either --params or --sizes is required");
  SbmParams params;
  params.sizes = parse_sizes(sizes_spec);
  params.K = static_cast<int>(params.sizes.size());
  params.P.resize(params.K, params.K);
  if (!p_spec.empty()) {
    const auto fields = split_csv_line(p_spec);
    if (static_cast<int>(fields.size()) != params.K * params.K)
      throw Error(ErrorCode::validation, "--p needs K*K row-major entries");
    for (int r = 0; r < params.K; ++r)
      for (int c = 0; c < params.K; ++c)
        params.P(r, c) = parse_double(fields[static_cast<std::size_t>(r) * params.K + c], "--p");
  } else {
    for (int r = 0; r < params.K; ++r)
      for (int c = 0; c < params.K; ++c) params.P(r, c) = (r == c) ? p_in : p_out;
  }
  params.validate();
  return params;
}

struct MetricRow {
  std::string dataset, method, metric;
  double value;
};

const std::map<std::string, bool>& builtin_orientations() {
  // true = higher is better
  static const std::map<std::string, bool> table = {
      {"nmi", true}, {"ri", true},      {"fm", true},  {"mod", true},
      {"cond", false}, {"nc", false},   {"avg_odf", false}, {"accuracy", true},
  };
  return table;
}

std::map<std::string, bool> load_orientations(const std::string& path) {
  std::map<std::string, bool> table = builtin_orientations();
  if (path.empty()) return table;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open orientations file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string metric, dir;
    if (!(ss >> metric)) continue;
    if (metric.starts_with("#")) continue;
    if (!(ss >> dir) || (dir != "higher" && dir != "lower"))
      throw Error(ErrorCode::parse, "orientations line " + std::to_string(line_no) +
                                        ": expected \"<metric> higher|lower\"");
    table[metric] = (dir == "higher");
  }
  return table;
}

std::vector<MetricRow> read_metric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open results CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::parse, "results CSV is empty");
  const auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"dataset", "method", "metric", "value"})
    throw Error(ErrorCode::parse, "results CSV header must be dataset,method,metric,value");
  std::vector<MetricRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw Error(ErrorCode::parse,
                  "results CSV line " + std::to_string(line_no) + ": expected 4 fields");
    rows.push_back({fields[0], fields[1], fields[2],
                    parse_double(fields[3], "results CSV line " + std::to_string(line_no))});
  }
  if (rows.empty()) throw Error(ErrorCode::parse, "results CSV has no data rows");
  return rows;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string params_path, sizes, p_spec, output, labels_out;
  double p_in = 0.0, p_out = 0.0;
  std::uint64_t seed = 1;
};

int cmd_generate(const GenerateArgs& args) {
  SbmParams params = params_from_flags(args.params_path, args.sizes, args.p_spec, args.p_in,
                                       args.p_out);
  SbmSample sample = generate_sbm(params, args.seed);

  std::ostringstream edges;
  edges << "# sgcgen generate seed=" << args.seed << "\n";
  write_edge_list(sample.graph, edges);
  write_text_file(args.output, edges.str());

  if (!args.labels_out.empty()) {
    std::ostringstream labels;
    labels << "# sgcgen generate seed=" << args.seed << "\n";
    write_labels(labels, sample.partition.labels());
    write_text_file(args.labels_out, labels.str());
  }
  std::cerr << "generated n=" << sample.graph.n() << " m=" << sample.graph.m() << "\n";
  return 0;
}

// ------------------------------------------------------------------ detect

struct DetectArgs {
  std::string input, output, labels_out, method = "sgc", mismatch = "mod", comment_prefix = "#";
  std::optional<double> alpha;
  int kmax = 50;
  std::uint64_t seed = 1;
  bool one_indexed = false;
};

int cmd_detect(const DetectArgs& args) {
  EdgeListOptions opts;
  opts.comment_prefix = args.comment_prefix;
  opts.one_indexed = args.one_indexed;
  ParsedGraph parsed = parse_edge_list_file(args.input, opts);
  LccResult lcc = largest_connected_component(parsed.graph);
  const std::size_t dropped = parsed.graph.n() - lcc.graph.n();

  SelectionConfig cfg;
  if (args.method == "sgc")
    cfg.method = SgcMethod::standard;
  else if (args.method == "regsgc")
    cfg.method = SgcMethod::regularized;
  else
    throw Error(ErrorCode::validation, "--method must be sgc or regsgc");
  if (args.mismatch == "eig")
    cfg.mismatch = MismatchMetric::spectral_radius;
  else if (args.mismatch == "mod")
    cfg.mismatch = MismatchMetric::negative_modularity;
  else if (args.mismatch == "aic")
    cfg.mismatch = MismatchMetric::aic;
  else if (args.mismatch == "bic")
    cfg.mismatch = MismatchMetric::bic;
  else
    throw Error(ErrorCode::validation, "--mismatch must be eig, mod, aic or bic");
  cfg.alpha = args.alpha;
  if (args.kmax < 2) throw Error(ErrorCode::validation, "--kmax must be >= 2");
  cfg.k_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(args.kmax),
                                                     lcc.graph.n()));
  cfg.seed = args.seed;

  SelectionReport report = select(lcc.graph, cfg);
  nlohmann::json j = selection_report_to_json(report, cfg);
  if (cfg.k_max != args.kmax) j["config"]["k_max_requested"] = args.kmax;
  j["input"] = args.input;
  j["lcc"] = {{"n", lcc.graph.n()}, {"m", lcc.graph.m()}, {"dropped_nodes", dropped}};
  std::vector<long long> node_ids;
  node_ids.reserve(lcc.graph.n());
  for (NodeId local : lcc.original_ids)
    node_ids.push_back(parsed.original_ids[static_cast<std::size_t>(local)]);
  j["node_ids"] = node_ids;

  const std::string text = j.dump(2) + "\n";
  if (args.output.empty())
    std::cout << text;
  else
    write_text_file(args.output, text);

  if (!args.labels_out.empty()) {
    std::ostringstream out;
    for (std::size_t i = 0; i < report.labels.size(); ++i)
      out << node_ids[i] << ' ' << report.labels[i] << '\n';
    write_text_file(args.labels_out, out.str());
  }
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string input, predicted, labels, output, dataset, method, comment_prefix = "#";
  bool one_indexed = false;
};

int cmd_eval(const EvalArgs& args) {
  EdgeListOptions opts;
  opts.comment_prefix = args.comment_prefix;
  opts.one_indexed = args.one_indexed;
  ParsedGraph parsed = parse_edge_list_file(args.input, opts);

  const auto predicted_raw = join_labels(parsed.original_ids,
                                         read_labels_file(args.predicted, opts));
  Partition predicted = Partition::from_labels(parsed.graph, compact_labels(predicted_raw));

  std::optional<Partition> truth;
  if (!args.labels.empty()) {
    const auto truth_raw = join_labels(parsed.original_ids, read_labels_file(args.labels, opts));
    truth = Partition::from_labels(parsed.graph, compact_labels(truth_raw));
  }

  MetricVector mv = evaluate_partition(parsed.graph, predicted, truth ? &*truth : nullptr);
  const std::string dataset = args.dataset.empty() ? args.input : args.dataset;
  const std::string method = args.method.empty() ? args.predicted : args.method;

  std::ostringstream csv;
  csv << "dataset,method,metric,value\n";
  for (const auto& [metric, value] : mv.rows())
    csv << dataset << ',' << method << ',' << metric << ',' << format_g12(value) << '\n';
  if (args.output.empty())
    std::cout << csv.str();
  else
    write_text_file(args.output, csv.str());
  return 0;
}

// ---------------------------------------------------------- phase-diagram

struct PhaseArgs {
  std::string grid_p1 = "0.02:0.20:0.02";
  std::string grid_q = "0.01:0.15:0.01";
  double p2 = 0.1;
  std::string sizes = "250,250";
  int seeds_per_cell = 10;
  std::uint64_t seed = 1;
  int workers = 0;
  std::string output;
};

int cmd_phase_diagram(const PhaseArgs& args) {
  PhaseDiagramConfig cfg;
  cfg.p1_values = parse_grid_spec(args.grid_p1);
  cfg.q_values = parse_grid_spec(args.grid_q);
  cfg.p2 = args.p2;
  const auto sizes = parse_sizes(args.sizes);
  if (sizes.size() != 2)
    throw Error(ErrorCode::validation, "--sizes must hold exactly n1,n2 for the phase diagram");
  cfg.n1 = sizes[0];
  cfg.n2 = sizes[1];
  cfg.seeds_per_cell = args.seeds_per_cell;
  cfg.seed = args.seed;
  cfg.workers = args.workers;
  for (double p1 : cfg.p1_values)
    if (p1 < 0.0 || p1 > 1.0) throw Error(ErrorCode::validation, "p1 values must lie in [0, 1]");
  for (double q : cfg.q_values)
    if (q < 0.0 || q > 1.0) throw Error(ErrorCode::validation, "q values must lie in [0, 1]");
  if (cfg.p2 < 0.0 || cfg.p2 > 1.0)
    throw Error(ErrorCode::validation, "--p2 must lie in [0, 1]");

  const std::vector<PhaseCell> cells = run_phase_diagram(cfg);
  std::ostringstream csv;
  write_phase_csv(csv, cells, cfg.seed);
  if (args.output.empty())
    std::cout << csv.str();
  else
    write_text_file(args.output, csv.str());
  return 0;
}

// -------------------------------------------------------------------- rank

struct RankArgs {
  std::string input, orientations, output;
};

int cmd_rank(const RankArgs& args) {
  const auto rows = read_metric_csv(args.input);
  const auto orientations = load_orientations(args.orientations);

  std::vector<std::string> methods;
  std::vector<std::pair<std::string, std::string>> columns;  // (dataset, metric)
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> cells;
  for (const MetricRow& row : rows) {
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
      methods.push_back(row.method);
    const auto key = std::make_pair(row.dataset, row.metric);
    if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
    if (!cells[key].emplace(row.method, row.value).second)
      throw Error(ErrorCode::validation, "duplicate entry for (" + row.dataset + ", " +
                                             row.method + ", " + row.metric + ")");
  }

  std::set<std::string> datasets;
  for (const MetricRow& row : rows) datasets.insert(row.dataset);

  std::vector<std::string> column_names;
  std::vector<bool> higher;
  for (const auto& [dataset, metric] : columns) {
    auto it = orientations.find(metric);
    if (it == orientations.end())
      throw Error(ErrorCode::validation,
                  "no orientation known for metric '" + metric + "'; use --orientations");
    column_names.push_back(datasets.size() == 1 ? metric : dataset + ":" + metric);
    higher.push_back(it->second);
  }

  std::vector<std::vector<std::optional<double>>> values(
      methods.size(), std::vector<std::optional<double>>(columns.size()));
  for (std::size_t i = 0; i < methods.size(); ++i)
    for (std::size_t jcol = 0; jcol < columns.size(); ++jcol) {
      const auto& cell = cells[columns[jcol]];
      auto it = cell.find(methods[i]);
      if (it != cell.end()) values[i][jcol] = it->second;
    }

  RankTable table = average_rank(methods, column_names, higher, values);

  std::ostringstream csv;
  csv << "method";
  for (const std::string& c : table.metrics) csv << ",rank_" << c;
  csv << ",avg_rank\n";
  for (std::size_t i = 0; i < table.methods.size(); ++i) {
    csv << table.methods[i];
    for (std::size_t jcol = 0; jcol < table.metrics.size(); ++jcol) {
      csv << ',';
      if (table.ranks[i][jcol]) csv << *table.ranks[i][jcol];
    }
    csv << ',' << format_g12(table.avg_rank[i]) << '\n';
  }
  if (args.output.empty())
    std::cout << csv.str();
  else
    write_text_file(args.output, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral graph clustering with generative-model-based model selection"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "sample an SBM graph with planted labels");
  generate->add_option("--params", gen.params_path, "SBM parameter JSON (K, sizes, P)");
  generate->add_option("--sizes", gen.sizes, "community sizes, e.g. 300,300,300");
  generate->add_option("--p", gen.p_spec, "row-major K*K probability list");
  generate->add_option("--p-in", gen.p_in, "within-community probability (with --sizes)");
  generate->add_option("--p-out", gen.p_out, "between-community probability (with --sizes)");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--output", gen.output, "edge list output path")->required();
  generate->add_option("--labels", gen.labels_out, "ground-truth label output path");

  DetectArgs det;
  CLI::App* detect = app.add_subcommand("detect", "community detection with model selection");
  detect->add_option("--input", det.input, "edge list path")->required();
  detect->add_option("--method", det.method, "sgc | regsgc");
  detect->add_option("--mismatch", det.mismatch, "eig | mod | aic | bic");
  detect->add_option("--alpha", det.alpha, "regularization weight (default depends on method)");
  detect->add_option("--kmax", det.kmax, "largest candidate community count");
  detect->add_option("--seed", det.seed, "RNG seed");
  detect->add_option("--output", det.output, "report JSON path (default: stdout)");
  detect->add_option("--labels-out", det.labels_out, "write chosen labels as a label file");
  detect->add_option("--comment-prefix", det.comment_prefix, "edge list comment prefix");
  detect->add_flag("--one-indexed", det.one_indexed, "node ids in the input start at 1");

  EvalArgs ev;
  CLI::App* eval = app.add_subcommand("eval", "score a predicted labeling");
  eval->add_option("--input", ev.input, "edge list path")->required();
  eval->add_option("--predicted", ev.predicted, "predicted label file")->required();
  eval->add_option("--labels", ev.labels, "ground-truth label file (enables external metrics)");
  eval->add_option("--output", ev.output, "metrics CSV path (default: stdout)");
  eval->add_option("--dataset", ev.dataset, "dataset name in the CSV (default: input path)");
  eval->add_option("--method", ev.method, "method name in the CSV (default: predicted path)");
  eval->add_option("--comment-prefix", ev.comment_prefix, "edge list comment prefix");
  eval->add_flag("--one-indexed", ev.one_indexed, "node ids in the input start at 1");

  PhaseArgs ph;
  CLI::App* phase = app.add_subcommand("phase-diagram", "detectability sweep over SBM(2, P)");
  phase->add_option("--grid-p1", ph.grid_p1, "p1 grid: lo:hi:step or value list");
  phase->add_option("--grid-q", ph.grid_q, "q grid: lo:hi:step or value list");
  phase->add_option("--p2", ph.p2, "fixed second within-community probability");
  phase->add_option("--sizes", ph.sizes, "community sizes n1,n2");
  phase->add_option("--seeds-per-cell", ph.seeds_per_cell, "samples per grid cell");
  phase->add_option("--seed", ph.seed, "base RNG seed");
  phase->add_option("--workers", ph.workers,
                    "worker threads (0: SGCGEN_WORKERS or hardware)");
  phase->add_option("--output", ph.output, "CSV path (default: stdout)");

  RankArgs rk;
  CLI::App* rank = app.add_subcommand("rank", "competition ranks from a metric CSV");
  rank->add_option("--input", rk.input, "CSV with dataset,method,metric,value rows")->required();
  rank->add_option("--orientations", rk.orientations,
                   "file of \"<metric> higher|lower\" lines (extends the builtins)");
  rank->add_option("--output", rk.output, "rank CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen);
    if (detect->parsed()) return cmd_detect(det);
    if (eval->parsed()) return cmd_eval(ev);
    if (phase->parsed()) return cmd_phase_diagram(ph);
    if (rank->parsed()) return cmd_rank(rk);
  } catch (const sgcgen::Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
