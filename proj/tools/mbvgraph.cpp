#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbv/errors.hpp"
#include "mbv/estimator.hpp"
#include "mbv/experiment.hpp"
#include "mbv/io.hpp"
#include "mbv/logistic.hpp"
#include "mbv/metrics.hpp"
#include "mbv/sampler.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw mbv::ValidationError("expected a comma-separated number list, got \"" + text + "\"");
    }
  }
  if (values.empty()) throw mbv::ValidationError("empty number list");
  return values;
}

std::vector<std::string> parse_label_list(const std::string& text) {
  std::vector<std::string> labels;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) labels.push_back(field);
  return labels;
}

mbv::ThetaVector load_theta(const std::string& file) {
  if (mbv::model_file_is_probability(file))
    return mbv::theta_from_probs(mbv::read_prob_model(file));
  return mbv::read_theta_model(file);
}

void cmd_sample(const std::string& model_file, int n, std::uint64_t seed,
                const std::string& out) {
  const mbv::SampleMatrix data = mbv::sample(load_theta(model_file), n, seed);
  mbv::write_sample_csv(data, out);
}

void cmd_gen_model(int p, int edges, double coupling, std::uint64_t seed,
                   bool random_singletons, const std::string& out) {
  mbv::ModelSpec spec;
  spec.p = p;
  spec.nonzero_pairs = edges;
  spec.coupling = coupling;
  spec.seed = seed;
  spec.random_singletons = random_singletons;
  mbv::write_theta_model(mbv::random_pairwise_model(spec), out);
}

void cmd_fit_mobius(const std::string& data_file, double quantile, bool have_quantile,
                    const std::string& scope, double alpha, const std::string& out_model,
                    const std::string& out_graph) {
  const mbv::SampleMatrix data = mbv::read_sample_csv(data_file);
  const mbv::ThresholdScope threshold_scope = scope == "all"
                                                  ? mbv::ThresholdScope::all_nonempty
                                                  : mbv::ThresholdScope::pairwise_only;
  const mbv::ThresholdRule rule =
      have_quantile ? mbv::ThresholdRule::quantile_rule(quantile, threshold_scope)
                    : mbv::ThresholdRule::none();
  const mbv::MobiusFit fit = mbv::fit_mobius(data, rule, alpha);
  if (!out_model.empty()) mbv::write_theta_model(fit.theta, out_model);
  if (!out_graph.empty())
    mbv::write_text_file(out_graph, mbv::export_graph(fit.graph, mbv::GraphFormat::dot));
}

void cmd_fit_lnm(const std::string& data_file, int folds, const std::string& grid_arg,
                 const std::string& rule_arg, std::uint64_t seed, const std::string& out_graph,
                 const std::string& out_raw, const std::string& out_model) {
  const mbv::SampleMatrix data = mbv::read_sample_csv(data_file);
  std::vector<double> grid;  // empty = auto per node
  if (grid_arg != "auto") grid = parse_double_list(grid_arg);
  const mbv::SymmetrizationRule rule = rule_arg == "max"
                                           ? mbv::SymmetrizationRule::max_magnitude
                                           : mbv::SymmetrizationRule::min_magnitude;
  const mbv::LnmFit fit = mbv::fit_lnm(data, grid, folds, rule, seed);
  if (!out_graph.empty())
    mbv::write_text_file(out_graph, mbv::export_graph(fit.graph, mbv::GraphFormat::dot));
  if (!out_raw.empty()) mbv::write_matrix_csv(fit.raw, out_raw);
  if (!out_model.empty()) mbv::write_theta_model(mbv::lnm_theta(fit), out_model);
}

void cmd_metrics(const std::string& true_file, const std::string& est_file,
                 const std::string& scope) {
  const mbv::ThetaVector truth = load_theta(true_file);
  const mbv::ThetaVector est = load_theta(est_file);
  const mbv::ConfusionCounts counts =
      mbv::confusion(mbv::pairwise_graph(truth, 0.0), mbv::pairwise_graph(est, 0.0));
  const mbv::ErrorScope err_scope =
      scope == "pairwise" ? mbv::ErrorScope::pairwise_only : mbv::ErrorScope::all_nonempty;
  std::printf("tp=%ld\ntn=%ld\nfp=%ld\nfn=%ld\n", counts.tp, counts.tn, counts.fp, counts.fn);
  std::printf("accuracy=%.6f\n", counts.accuracy());
  std::printf("err=%.6f\n", mbv::relative_error(truth, est, err_scope));
}

void cmd_bench(const std::string& config_file, const std::string& out,
               const std::string& raw_out) {
  const mbv::ExperimentConfig cfg = mbv::read_experiment_config(config_file);
  const mbv::ExperimentReport report = mbv::run_experiment(cfg);
  mbv::write_text_file(out, mbv::report_csv(report));
  if (!raw_out.empty()) mbv::write_text_file(raw_out, mbv::raw_csv(report));
  for (const mbv::ReplicateResult& r : report.raw)
    if (r.failed)
      std::fprintf(stderr, "warning: replicate %d %s n=%d failed: %s\n", r.replicate,
                   mbv::method_name(r.method).c_str(), r.n, r.failure.c_str());
}

void cmd_export(const std::string& graph_file, const std::string& format,
                const std::string& labels_arg, const std::string& out) {
  const mbv::ThetaVector th = load_theta(graph_file);
  const mbv::GraphEstimate g = mbv::pairwise_graph(th, 0.0);
  const mbv::GraphFormat fmt =
      format == "edge-csv" ? mbv::GraphFormat::edge_csv : mbv::GraphFormat::dot;
  std::vector<std::string> labels;
  if (!labels_arg.empty()) labels = parse_label_list(labels_arg);
  const std::string text = mbv::export_graph(g, fmt, labels);
  if (out.empty())
    std::fputs(text.c_str(), stdout);
  else
    mbv::write_text_file(out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate Bernoulli graph estimation: closed-form Mobius-inversion "
               "estimator, l1-logistic baseline, and a benchmark harness"};
  app.require_subcommand(1);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Draw i.i.d. rows from a model file");
  std::string sample_model, sample_out;
  int sample_n = 0;
  std::uint64_t sample_seed = 0;
  sample_cmd->add_option("--model", sample_model, "model JSON (theta or prob)")->required();
  sample_cmd->add_option("--n", sample_n, "number of rows")->required();
  sample_cmd->add_option("--seed", sample_seed, "RNG seed");
  sample_cmd->add_option("--out", sample_out, "output CSV")->required();

  // gen-model
  auto* gen_cmd = app.add_subcommand("gen-model", "Generate a random sparse pairwise model");
  int gen_p = 0, gen_edges = 0;
  double gen_coupling = 0.5;
  std::uint64_t gen_seed = 0;
  bool gen_singletons = false;
  std::string gen_out;
  gen_cmd->add_option("--p", gen_p, "node count")->required();
  gen_cmd->add_option("--edges", gen_edges, "number of nonzero pairs")->required();
  gen_cmd->add_option("--coupling", gen_coupling, "magnitude of the pairwise terms");
  gen_cmd->add_option("--seed", gen_seed, "RNG seed");
  gen_cmd->add_flag("--random-singletons", gen_singletons,
                    "draw +-coupling first-order terms instead of zeros");
  gen_cmd->add_option("--out", gen_out, "output model JSON")->required();

  // fit-mobius
  auto* mob_cmd = app.add_subcommand("fit-mobius", "Closed-form estimate with thresholding");
  std::string mob_data, mob_out_model, mob_out_graph, mob_scope = "pairwise";
  double mob_quantile = 0.0, mob_alpha = 0.5;
  mob_cmd->add_option("--data", mob_data, "sample CSV")->required();
  auto* mob_q_opt = mob_cmd->add_option("--quantile", mob_quantile,
                                        "threshold quantile in [0,1); omit for no threshold");
  mob_cmd->add_option("--alpha", mob_alpha, "additive smoothing per cell");
  mob_cmd->add_option("--scope", mob_scope, "threshold scope: pairwise or all")
      ->check(CLI::IsMember({"pairwise", "all"}));
  mob_cmd->add_option("--out-model", mob_out_model, "estimated model JSON");
  mob_cmd->add_option("--out-graph", mob_out_graph, "estimated graph DOT");

  // fit-lnm
  auto* lnm_cmd = app.add_subcommand("fit-lnm", "Per-node l1 logistic fit with CV");
  std::string lnm_data, lnm_grid = "auto", lnm_rule = "min", lnm_graph, lnm_raw, lnm_model;
  int lnm_folds = 10;
  std::uint64_t lnm_seed = 0;
  lnm_cmd->add_option("--data", lnm_data, "sample CSV")->required();
  lnm_cmd->add_option("--folds", lnm_folds, "cross-validation folds");
  lnm_cmd->add_option("--grid", lnm_grid, "auto or comma-separated lambda values");
  lnm_cmd->add_option("--rule", lnm_rule, "symmetrization: min or max")
      ->check(CLI::IsMember({"min", "max"}));
  lnm_cmd->add_option("--seed", lnm_seed, "fold-assignment seed");
  lnm_cmd->add_option("--out-graph", lnm_graph, "estimated graph DOT");
  lnm_cmd->add_option("--out-raw", lnm_raw, "asymmetric coefficient matrix CSV");
  lnm_cmd->add_option("--out-model", lnm_model, "estimated model JSON");

  // metrics
  auto* met_cmd = app.add_subcommand("metrics", "Compare an estimate against a true model");
  std::string met_true, met_est, met_scope = "all";
  met_cmd->add_option("--true", met_true, "true model JSON")->required();
  met_cmd->add_option("--est", met_est, "estimated model JSON")->required();
  met_cmd->add_option("--scope", met_scope, "error scope: all or pairwise")
      ->check(CLI::IsMember({"all", "pairwise"}));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a replicated benchmark sweep");
  std::string bench_config, bench_out, bench_raw;
  bench_cmd->add_option("--config", bench_config, "experiment config JSON")->required();
  bench_cmd->add_option("--out", bench_out, "aggregated report CSV")->required();
  bench_cmd->add_option("--raw", bench_raw, "per-replicate CSV");

  // export
  auto* exp_cmd = app.add_subcommand("export", "Export a model's graph as DOT or edge CSV");
  std::string exp_graph, exp_format = "dot", exp_labels, exp_out;
  exp_cmd->add_option("--graph", exp_graph, "model JSON")->required();
  exp_cmd->add_option("--format", exp_format, "dot or edge-csv")
      ->check(CLI::IsMember({"dot", "edge-csv"}));
  exp_cmd->add_option("--labels", exp_labels, "comma-separated node labels");
  exp_cmd->add_option("--out", exp_out, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample_cmd) cmd_sample(sample_model, sample_n, sample_seed, sample_out);
    if (*gen_cmd)
      cmd_gen_model(gen_p, gen_edges, gen_coupling, gen_seed, gen_singletons, gen_out);
    if (*mob_cmd)
      cmd_fit_mobius(mob_data, mob_quantile, mob_q_opt->count() > 0, mob_scope, mob_alpha,
                     mob_out_model, mob_out_graph);
    if (*lnm_cmd)
      cmd_fit_lnm(lnm_data, lnm_folds, lnm_grid, lnm_rule, lnm_seed, lnm_graph, lnm_raw,
                  lnm_model);
    if (*met_cmd) cmd_metrics(met_true, met_est, met_scope);
    if (*bench_cmd) cmd_bench(bench_config, bench_out, bench_raw);
    if (*exp_cmd) cmd_export(exp_graph, exp_format, exp_labels, exp_out);
  } catch (const mbv::NumericError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const mbv::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
