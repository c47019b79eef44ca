// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment harness for Markov chain monitoring: generate synthetic chains,
// run the selection algorithms and baselines, validate the closed forms
// against simulation oracles, and ingest external data.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcm/baselines.hpp"
#include "mcm/generators.hpp"
#include "mcm/graph.hpp"
#include "mcm/ingest.hpp"
#include "mcm/selection.hpp"
#include "mcm/simulate.hpp"
#include "mcm/uncertainty.hpp"

namespace {

int worker_count() {
  const char* env = std::getenv("MCM_WORKERS");
  if (!env) return 1;
  const int workers = std::atoi(env);
  return workers > 0 ? workers : 1;
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

mcm::GraphKind parse_kind(const std::string& kind) {
  if (kind == "grid") return mcm::GraphKind::kGrid;
  if (kind == "geo") return mcm::GraphKind::kGeo;
  if (kind == "ba") return mcm::GraphKind::kBa;
  throw CLI::ValidationError("--kind", "unknown graph kind: " + kind);
}

mcm::ItemScheme parse_scheme(const std::string& scheme) {
  if (scheme == "ego") return mcm::ItemScheme::kEgo;
  if (scheme == "uniform") return mcm::ItemScheme::kUniform;
  if (scheme == "direct") return mcm::ItemScheme::kDirect;
  if (scheme == "inverse") return mcm::ItemScheme::kInverse;
  throw CLI::ValidationError("--distribution",
                             "unknown distribution scheme: " + scheme);
}

std::vector<int> parse_node_list(const std::string& text) {
  std::vector<int> nodes;
  std::stringstream fields(text);
  std::string field;
  while (std::getline(fields, field, ','))
    if (!field.empty()) nodes.push_back(std::stoi(field));
  return nodes;
}

std::vector<mcm::Edge> parse_edge_list_arg(const std::string& text) {
  std::vector<mcm::Edge> edges;
  std::stringstream fields(text);
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto dash = field.find('-');
    if (dash == std::string::npos)
      throw mcm::DataError("edge must be written as u-v: " + field);
    edges.emplace_back(std::stoi(field.substr(0, dash)),
                       std::stoi(field.substr(dash + 1)));
  }
  return edges;
}

// Ordered candidate list plus its objective trace under the variant's
// functional. Greedy algorithms carry their own trace; rankers get their
// top-k prefix evaluated.
struct Run {
  std::vector<std::string> labels;  // one per selected element
  std::vector<double> trace;
};

Run trace_nodes(const mcm::TransitionMatrix& matrix,
                const mcm::ItemDistribution& items,
                const std::vector<int>& nodes, bool children) {
  Run run;
  for (std::size_t t = 1; t <= nodes.size(); ++t) {
    const std::span<const int> prefix(nodes.data(), t);
    run.labels.push_back(std::to_string(nodes[t - 1]));
    run.trace.push_back(children
                            ? mcm::uncertainty_children(matrix, items, prefix)
                            : mcm::uncertainty_node(matrix, items, prefix));
  }
  return run;
}

Run trace_edges(const mcm::TransitionMatrix& matrix,
                const mcm::ItemDistribution& items,
                const std::vector<mcm::Edge>& edges) {
  Run run;
  for (std::size_t t = 1; t <= edges.size(); ++t) {
    run.labels.push_back(std::to_string(edges[t - 1].first) + "->" +
                         std::to_string(edges[t - 1].second));
    run.trace.push_back(mcm::uncertainty_edge(
        matrix, items, std::span<const mcm::Edge>(edges.data(), t)));
  }
  return run;
}

Run from_node_selection(const mcm::NodeSelection& sel) {
  Run run;
  for (std::size_t i = 0; i < sel.nodes.size(); ++i)
    run.labels.push_back(std::to_string(sel.nodes[i]));
  run.trace = sel.objective_trace;
  return run;
}

Run from_edge_selection(const mcm::EdgeSelection& sel) {
  Run run;
  for (const mcm::Edge& e : sel.edges)
    run.labels.push_back(std::to_string(e.first) + "->" +
                         std::to_string(e.second));
  run.trace = sel.objective_trace;
  return run;
}

Run run_algorithm(const std::string& algorithm,
                  const mcm::TransitionMatrix& matrix,
                  const mcm::ItemDistribution& items, int k,
                  std::uint64_t seed) {
  if (algorithm == "node-greedy")
    return from_node_selection(mcm::node_greedy(matrix, items, k));
  if (algorithm == "node-naive")
    return from_node_selection(mcm::node_greedy_naive(matrix, items, k));
  if (algorithm == "node-in-degree")
    return trace_nodes(matrix, items, mcm::in_degree(matrix).top(k), false);
  if (algorithm == "node-in-probability")
    return trace_nodes(matrix, items, mcm::in_probability(matrix).top(k), false);
  if (algorithm == "node-betweenness")
    return trace_nodes(matrix, items, mcm::node_betweenness(matrix).top(k), false);
  if (algorithm == "node-closeness")
    return trace_nodes(matrix, items, mcm::closeness(matrix).top(k), false);
  if (algorithm == "node-num-items")
    return trace_nodes(matrix, items, mcm::node_num_items(matrix, items).top(k),
                       false);
  if (algorithm == "node-random")
    return trace_nodes(matrix, items, mcm::random_nodes(matrix, seed, k), false);
  if (algorithm == "children-topk")
    return from_node_selection(mcm::children_topk(matrix, items, k));
  if (algorithm == "edge-greedy")
    return from_edge_selection(mcm::edge_greedy(matrix, items, k));
  if (algorithm == "edge-dp")
    return from_edge_selection(mcm::edge_dp(matrix, items, k));
  if (algorithm == "edge-betweenness")
    return trace_edges(matrix, items, mcm::edge_betweenness(matrix).top(k));
  if (algorithm == "edge-num-items")
    return trace_edges(matrix, items, mcm::edge_num_items(matrix, items).top(k));
  if (algorithm == "edge-probability")
    return trace_edges(matrix, items, mcm::edge_probability(matrix).top(k));
  if (algorithm == "edge-random")
    return trace_edges(matrix, items, mcm::random_edges(matrix, seed, k));
  throw CLI::ValidationError("--algorithm", "unknown algorithm: " + algorithm);
}

struct GenerateOptions {
  std::string kind = "grid";
  int rows = 100, cols = 10;
  int nodes = 1000;
  double threshold = 0.01;
  int attach = 3;
  std::uint64_t seed = 0;
  double total_items = 0.0;
  std::string distribution = "uniform";
  double ego_fraction = 0.7;
  std::string graph_out, items_out;
};

mcm::GenConfig to_config(const GenerateOptions& opt) {
  mcm::GenConfig config;
  config.kind = parse_kind(opt.kind);
  config.rows = opt.rows;
  config.cols = opt.cols;
  config.nodes = opt.nodes;
  config.threshold = opt.threshold;
  config.attach = opt.attach;
  config.seed = opt.seed;
  config.total_items = opt.total_items;
  config.scheme = parse_scheme(opt.distribution);
  config.ego_fraction = opt.ego_fraction;
  return config;
}

void cmd_generate(const GenerateOptions& opt) {
  const mcm::GenConfig config = to_config(opt);
  const mcm::TransitionMatrix matrix = mcm::generate_graph(config);
  const mcm::ItemDistribution items = mcm::distribute(matrix, config);
  {
    std::ofstream out(opt.graph_out);
    if (!out) throw mcm::DataError("cannot write " + opt.graph_out);
    mcm::write_matrix(out, matrix);
  }
  {
    std::ofstream out(opt.items_out);
    if (!out) throw mcm::DataError("cannot write " + opt.items_out);
    mcm::write_distribution(out, items);
  }
  std::cout << "nodes=" << matrix.node_count()
            << " edges=" << matrix.edge_count() << " seed=" << config.seed
            << "\n";
}

struct SelectOptions {
  std::string graph, items, variant = "node", algorithm, output;
  int k = 0;
  std::uint64_t seed = 0;
};

void cmd_select(const SelectOptions& opt) {
  const mcm::TransitionMatrix matrix = mcm::read_matrix_file(opt.graph);
  const mcm::ItemDistribution items = mcm::read_distribution_file(opt.items);
  std::string algorithm = opt.algorithm;
  // Accept short names scoped by the variant.
  if (algorithm.find('-') == std::string::npos)
    algorithm = (opt.variant == "children" ? "children-" : opt.variant + "-") +
                algorithm;
  if (opt.variant != "node" && opt.variant != "edge" && opt.variant != "children")
    throw CLI::ValidationError("--variant", "unknown variant: " + opt.variant);

  const double f0 = mcm::baseline_uncertainty(matrix, items);
  const Run run = run_algorithm(algorithm, matrix, items, opt.k, opt.seed);

  std::ostringstream csv;
  csv << "step,selected,objective,ratio\n";
  csv << "0,," << format_double(f0) << ",1\n";
  for (std::size_t t = 0; t < run.labels.size(); ++t) {
    const double ratio = f0 > 0.0 ? run.trace[t] / f0 : 1.0;
    csv << (t + 1) << ',' << run.labels[t] << ','
        << format_double(run.trace[t]) << ',' << format_double(ratio) << "\n";
  }
  if (opt.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(opt.output);
    if (!out) throw mcm::DataError("cannot write " + opt.output);
    out << csv.str();
  }
}

struct ExperimentOptions {
  GenerateOptions gen;
  std::string graph, items;  // alternative to the generator
  std::string label;
  std::vector<std::string> distributions;
  std::vector<std::string> algorithms;
  std::vector<int> k_values;
  int k_max = 50, k_step = 5;
  std::string output;
};

void cmd_experiment(const ExperimentOptions& opt) {
  std::optional<mcm::TransitionMatrix> matrix;
  std::string label = opt.label;
  if (!opt.graph.empty()) {
    matrix.emplace(mcm::read_matrix_file(opt.graph));
    if (label.empty()) label = opt.graph;
  } else {
    matrix.emplace(mcm::generate_graph(to_config(opt.gen)));
    if (label.empty()) label = opt.gen.kind;
  }

  std::vector<int> ks = opt.k_values;
  if (ks.empty())
    for (int k = 0; k <= opt.k_max; k += opt.k_step) ks.push_back(k);
  int k_top = 0;
  for (int k : ks) {
    if (k < 0) throw CLI::ValidationError("--k-values", "negative budget");
    k_top = std::max(k_top, k);
  }

  std::vector<std::string> distributions = opt.distributions;
  if (distributions.empty()) distributions = {"uniform"};

  struct Cell {
    std::string distribution;
    std::string algorithm;
  };
  std::vector<Cell> cells;
  for (const std::string& dist : distributions)
    for (const std::string& algorithm : opt.algorithms)
      cells.push_back({dist, algorithm});
  if (cells.empty())
    throw CLI::ValidationError("--algorithms", "no algorithms requested");

  auto run_cell = [&](const Cell& cell) {
    mcm::ItemDistribution items =
        opt.items.empty()
            ? [&] {
                mcm::GenConfig config = to_config(opt.gen);
                config.scheme = parse_scheme(cell.distribution);
                return mcm::distribute(*matrix, config);
              }()
            : mcm::read_distribution_file(opt.items);
    const double f0 = mcm::baseline_uncertainty(*matrix, items);
    const int limit =
        cell.algorithm.rfind("edge", 0) == 0 ? matrix->edge_count()
                                             : matrix->node_count();
    std::vector<mcm::ReportRow> rows;
    if (cell.algorithm == "edge-dp") {
      // Not prefix-decomposable; solve each budget separately.
      for (int k : ks) {
        const Run run = run_algorithm(cell.algorithm, *matrix, items,
                                      std::min(k, limit), opt.gen.seed);
        const double objective = run.trace.empty() ? f0 : run.trace.back();
        rows.push_back({label, cell.distribution, cell.algorithm, k, objective,
                        f0 > 0.0 ? objective / f0 : 1.0});
      }
    } else {
      const Run run = run_algorithm(cell.algorithm, *matrix, items,
                                    std::min(k_top, limit), opt.gen.seed);
      for (int k : ks) {
        const double objective =
            (k == 0 || run.trace.empty())
                ? f0
                : run.trace[std::min<std::size_t>(k, run.trace.size()) - 1];
        rows.push_back({label, cell.distribution, cell.algorithm, k, objective,
                        f0 > 0.0 ? objective / f0 : 1.0});
      }
    }
    return rows;
  };

  std::vector<std::vector<mcm::ReportRow>> per_cell(cells.size());
  if (worker_count() > 1) {
    std::vector<std::future<std::vector<mcm::ReportRow>>> futures;
    for (const Cell& cell : cells)
      futures.push_back(std::async(std::launch::async, run_cell, cell));
    for (std::size_t i = 0; i < cells.size(); ++i) per_cell[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < cells.size(); ++i) per_cell[i] = run_cell(cells[i]);
  }

  std::vector<mcm::ReportRow> rows;
  for (const auto& cell_rows : per_cell)
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const mcm::ReportRow& a, const mcm::ReportRow& b) {
                     return std::tie(a.graph, a.distribution, a.algorithm, a.k) <
                            std::tie(b.graph, b.distribution, b.algorithm, b.k);
                   });
  if (opt.output.empty()) {
    mcm::write_report(std::cout, rows);
  } else {
    mcm::write_report_file(opt.output, rows);
  }
}

struct ValidateOptions {
  std::string graph, items, nodes, edges, op_type = "pt", mode = "exhaustive";
  long long trials = 100000;
  std::uint64_t seed = 0;
};

void cmd_validate(const ValidateOptions& opt) {
  const mcm::TransitionMatrix matrix = mcm::read_matrix_file(opt.graph);
  const mcm::ItemDistribution items = mcm::read_distribution_file(opt.items);
  const std::vector<int> nodes = parse_node_list(opt.nodes);
  const std::vector<mcm::Edge> edges = parse_edge_list_arg(opt.edges);

  mcm::QueryType type;
  double closed_form;
  if (opt.op_type == "pt" || opt.op_type == "ni") {
    type = opt.op_type == "pt" ? mcm::QueryType::kParentTransitions
                               : mcm::QueryType::kNodeItems;
    closed_form = mcm::uncertainty_node(matrix, items, nodes);
  } else if (opt.op_type == "et") {
    type = mcm::QueryType::kEdgeTransitions;
    closed_form = mcm::uncertainty_edge(matrix, items, edges);
  } else if (opt.op_type == "ct") {
    type = mcm::QueryType::kChildrenTransitions;
    closed_form = mcm::uncertainty_children(matrix, items, nodes);
  } else {
    throw CLI::ValidationError("--op-type", "unknown type: " + opt.op_type);
  }

  if (opt.mode == "exhaustive") {
    const mcm::ExhaustiveResult oracle = mcm::exhaustive_expected_uncertainty(
        matrix, items, nodes, edges, type);
    std::cout << "closed_form=" << format_double(closed_form)
              << " oracle=" << format_double(oracle.total)
              << " gap=" << format_double(std::abs(closed_form - oracle.total))
              << "\n";
  } else if (opt.mode == "mc") {
    const mcm::McEstimate estimate = mcm::mc_expected_uncertainty(
        matrix, items, nodes, edges, type, opt.trials, opt.seed, worker_count());
    std::cout << "closed_form=" << format_double(closed_form)
              << " mc_mean=" << format_double(estimate.mean)
              << " gap=" << format_double(std::abs(closed_form - estimate.mean))
              << " stderr=" << format_double(estimate.stderr_) << "\n";
  } else {
    throw CLI::ValidationError("--mode", "unknown mode: " + opt.mode);
  }
}

struct IngestOptions {
  std::string edge_list, trips, counts;
  long long t_start = 0, t_end = 0;
  std::string graph_out, items_out, stations_out;
};

void cmd_ingest(const IngestOptions& opt) {
  if (!opt.edge_list.empty()) {
    const mcm::TransitionMatrix matrix = mcm::load_edge_list_file(opt.edge_list);
    std::ofstream out(opt.graph_out);
    if (!out) throw mcm::DataError("cannot write " + opt.graph_out);
    mcm::write_matrix(out, matrix);
    std::cout << "nodes=" << matrix.node_count()
              << " edges=" << matrix.edge_count() << "\n";
    return;
  }
  std::ifstream trips_in(opt.trips);
  if (!trips_in) throw mcm::DataError("cannot open trips: " + opt.trips);
  const std::vector<mcm::TripRecord> trips = mcm::read_trips(trips_in);

  std::map<std::string, long long> station_counts;
  std::ifstream counts_in(opt.counts);
  if (!counts_in) throw mcm::DataError("cannot open counts: " + opt.counts);
  std::string line;
  while (std::getline(counts_in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw mcm::DataError("counts file rows must be station,count");
    station_counts[line.substr(0, comma)] = std::stoll(line.substr(comma + 1));
  }

  const mcm::TripChain chain =
      mcm::build_trip_chain(trips, station_counts, opt.t_start, opt.t_end);
  {
    std::ofstream out(opt.graph_out);
    if (!out) throw mcm::DataError("cannot write " + opt.graph_out);
    mcm::write_matrix(out, chain.matrix);
  }
  {
    std::ofstream out(opt.items_out);
    if (!out) throw mcm::DataError("cannot write " + opt.items_out);
    mcm::write_distribution(out, chain.items);
  }
  if (!opt.stations_out.empty()) {
    std::ofstream out(opt.stations_out);
    if (!out) throw mcm::DataError("cannot write " + opt.stations_out);
    for (std::size_t i = 0; i < chain.station_ids.size(); ++i)
      out << i << ',' << chain.station_ids[i] << "\n";
  }
  std::cout << "stations=" << chain.matrix.node_count()
            << " edges=" << chain.matrix.edge_count() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov chain monitoring toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  GenerateOptions gen_opt;
  CLI::App* generate = app.add_subcommand("generate", "write a synthetic chain");
  generate->add_option("--kind", gen_opt.kind, "grid|geo|ba");
  generate->add_option("--rows", gen_opt.rows);
  generate->add_option("--cols", gen_opt.cols);
  generate->add_option("--nodes", gen_opt.nodes);
  generate->add_option("--threshold", gen_opt.threshold);
  generate->add_option("--m", gen_opt.attach, "attachments per node (ba)");
  generate->add_option("--seed", gen_opt.seed);
  generate->add_option("--total-items", gen_opt.total_items,
                       "default 10 per node");
  generate->add_option("--distribution", gen_opt.distribution,
                       "ego|uniform|direct|inverse");
  generate->add_option("--ego-fraction", gen_opt.ego_fraction);
  generate->add_option("--graph-out", gen_opt.graph_out)->required();
  generate->add_option("--items-out", gen_opt.items_out)->required();

  SelectOptions sel_opt;
  CLI::App* select = app.add_subcommand("select", "run one selection algorithm");
  select->add_option("--graph", sel_opt.graph)->required();
  select->add_option("--items", sel_opt.items)->required();
  select->add_option("--variant", sel_opt.variant, "node|edge|children");
  select->add_option("--algorithm", sel_opt.algorithm)->required();
  select->add_option("--k", sel_opt.k)->required();
  select->add_option("--seed", sel_opt.seed);
  select->add_option("--output", sel_opt.output, "default stdout");

  ExperimentOptions exp_opt;
  CLI::App* experiment =
      app.add_subcommand("experiment", "run an (algorithm, k) sweep");
  experiment->add_option("--kind", exp_opt.gen.kind, "grid|geo|ba");
  experiment->add_option("--rows", exp_opt.gen.rows);
  experiment->add_option("--cols", exp_opt.gen.cols);
  experiment->add_option("--nodes", exp_opt.gen.nodes);
  experiment->add_option("--threshold", exp_opt.gen.threshold);
  experiment->add_option("--m", exp_opt.gen.attach);
  experiment->add_option("--seed", exp_opt.gen.seed);
  experiment->add_option("--total-items", exp_opt.gen.total_items);
  experiment->add_option("--ego-fraction", exp_opt.gen.ego_fraction);
  experiment->add_option("--graph", exp_opt.graph, "matrix file instead of a generator");
  experiment->add_option("--items", exp_opt.items, "distribution file");
  experiment->add_option("--label", exp_opt.label, "graph column value");
  experiment->add_option("--distributions", exp_opt.distributions)
      ->delimiter(',');
  experiment->add_option("--algorithms", exp_opt.algorithms)
      ->delimiter(',')
      ->required();
  experiment->add_option("--k-values", exp_opt.k_values)->delimiter(',');
  experiment->add_option("--k-max", exp_opt.k_max);
  experiment->add_option("--k-step", exp_opt.k_step);
  experiment->add_option("--output", exp_opt.output, "default stdout");

  ValidateOptions val_opt;
  CLI::App* validate =
      app.add_subcommand("validate", "compare closed forms against oracles");
  validate->add_option("--graph", val_opt.graph)->required();
  validate->add_option("--items", val_opt.items)->required();
  validate->add_option("--nodes", val_opt.nodes, "comma-separated node ids");
  validate->add_option("--edges", val_opt.edges, "comma-separated u-v pairs");
  validate->add_option("--op-type", val_opt.op_type, "pt|ni|et|ct");
  validate->add_option("--mode", val_opt.mode, "mc|exhaustive");
  validate->add_option("--trials", val_opt.trials);
  validate->add_option("--seed", val_opt.seed);

  IngestOptions ing_opt;
  CLI::App* ingest = app.add_subcommand("ingest", "build a chain from data files");
  ingest->add_option("--edge-list", ing_opt.edge_list);
  ingest->add_option("--trips", ing_opt.trips);
  ingest->add_option("--counts", ing_opt.counts);
  ingest->add_option("--t-start", ing_opt.t_start);
  ingest->add_option("--t-end", ing_opt.t_end);
  ingest->add_option("--graph-out", ing_opt.graph_out)->required();
  ingest->add_option("--items-out", ing_opt.items_out);
  ingest->add_option("--stations-out", ing_opt.stations_out);

  try {
    app.parse(argc, argv);
    if (*generate) cmd_generate(gen_opt);
    if (*select) cmd_select(sel_opt);
    if (*experiment) cmd_experiment(exp_opt);
    if (*validate) cmd_validate(val_opt);
    if (*ingest) cmd_ingest(ing_opt);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const mcm::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
