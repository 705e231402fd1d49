#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mbv/estimator.hpp"
#include "mbv/logistic.hpp"
#include "mbv/metrics.hpp"

namespace mbv {

enum class Method { mobius_inversion, logistic_neighborhood };

std::string method_name(Method m);  // "M-I" / "L-N-M"
Method method_from_name(const std::string& name);

// One benchmark sweep: random pairwise models, every configured sample size,
// every configured method on identical per-replicate data.
struct ExperimentConfig {
  int p = 5;
  int nonzero_pairs = 6;
  double coupling = 0.5;
  std::vector<int> sample_sizes;
  int replicates = 10;
  std::vector<Method> methods{Method::mobius_inversion, Method::logistic_neighborhood};
  std::vector<double> quantiles{0.2, 0.4, 0.5, 0.6, 0.7};  // M-I threshold candidates
  std::vector<double> lambda_grid;                         // empty = auto per node
  int folds = 10;
  double alpha = 0.5;
  bool random_singletons = false;
  std::uint64_t master_seed = 0;

  void validate() const;
};

struct ReplicateResult {
  int replicate = 0;
  Method method = Method::mobius_inversion;
  int n = 0;
  bool failed = false;
  std::string failure;
  ConfusionCounts counts;
  double accuracy = 0.0;
  double err_all = 0.0;       // relative l2 error over all non-empty sets
  double err_pairwise = 0.0;  // relative l2 error over pairwise entries
  double runtime_s = 0.0;     // wall clock of the fit call only
  std::string detail;         // chosen quantile + path, or per-node lambdas
};

struct AggregateRow {
  Method method = Method::mobius_inversion;
  int n = 0;
  int ok = 0;
  int failed = 0;
  double accuracy_mean = 0, accuracy_std = 0;
  double err_all_mean = 0, err_all_std = 0;
  double err_pairwise_mean = 0, err_pairwise_std = 0;
  double runtime_mean_s = 0, runtime_std_s = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReplicateResult> raw;
  std::vector<AggregateRow> rows;
};

// Deterministic given the master seed (runtimes excepted). A failing method
// is recorded per replicate without aborting the sweep.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

std::string report_csv(const ExperimentReport& report);
std::string raw_csv(const ExperimentReport& report);

std::string experiment_config_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig read_experiment_config(const std::filesystem::path& file);

}  // namespace mbv
