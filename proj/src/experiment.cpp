#include "mbv/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include <json.hpp>

#include "mbv/errors.hpp"
#include "mbv/io.hpp"

namespace mbv {

namespace {

using nlohmann::json;

std::string format_metric(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

std::string format_short(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

// Seed streams per replicate: 0 draws the model, 1 + size_index draws the
// sample, 1000 + size_index feeds the L-N-M fold assignment.
struct ReplicateSeeds {
  std::uint64_t model;
  std::uint64_t data(std::size_t size_index) const {
    return child_seed(base, 1 + size_index);
  }
  std::uint64_t lnm(std::size_t size_index) const {
    return child_seed(base, 1000 + size_index);
  }
  std::uint64_t base;
};

ReplicateSeeds replicate_seeds(std::uint64_t master, int replicate) {
  const std::uint64_t base = child_seed(master, static_cast<std::uint64_t>(replicate));
  return ReplicateSeeds{child_seed(base, 0), base};
}

std::string sanitize(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return text;
}

}  // namespace

std::string method_name(Method m) {
  return m == Method::mobius_inversion ? "M-I" : "L-N-M";
}

Method method_from_name(const std::string& name) {
  if (name == "M-I") return Method::mobius_inversion;
  if (name == "L-N-M") return Method::logistic_neighborhood;
  throw ValidationError("unknown method \"" + name + "\"; expected M-I or L-N-M");
}

void ExperimentConfig::validate() const {
  (void)subset_count(p);
  if (p < 2) throw ValidationError("benchmarks need at least 2 nodes");
  if (nonzero_pairs < 0 || nonzero_pairs > p * (p - 1) / 2)
    throw ValidationError("nonzero_pairs out of range");
  if (!std::isfinite(coupling)) throw ValidationError("coupling must be finite");
  if (sample_sizes.empty()) throw ValidationError("need at least one sample size");
  for (int n : sample_sizes)
    if (n <= p)
      throw ValidationError("sample sizes must exceed p, got n=" + std::to_string(n));
  if (replicates < 1) throw ValidationError("need at least one replicate");
  if (methods.empty()) throw ValidationError("need at least one method");
  for (double q : quantiles)
    if (!(q >= 0.0 && q < 1.0)) throw ValidationError("quantiles must lie in [0,1)");
  for (double l : lambda_grid)
    if (!(l >= 0.0)) throw ValidationError("lambda grid values must be non-negative");
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (alpha < 0.0) throw ValidationError("smoothing constant must be non-negative");
}

namespace {

struct FitOutcome {
  ThetaVector theta;
  GraphEstimate graph;
  double runtime_s = 0.0;
  std::string detail;
};

FitOutcome fit_one(Method method, const ExperimentConfig& cfg, const SampleMatrix& data,
                   std::uint64_t lnm_seed) {
  using clock = std::chrono::steady_clock;
  FitOutcome out;
  if (method == Method::mobius_inversion) {
    const auto t0 = clock::now();
    const FrequencyVector freq = empirical_frequencies(data, cfg.alpha);
    const ThetaVector raw = estimate_theta(freq);
    if (cfg.quantiles.empty()) {
      out.theta = raw;
      out.detail = "rule=none";
    } else {
      const QuantileChoice choice =
          choose_quantile(raw, cfg.quantiles, cfg.nonzero_pairs, ThresholdScope::pairwise_only);
      out.theta = apply_threshold(
          raw, ThresholdRule::quantile_rule(choice.quantile, ThresholdScope::pairwise_only));
      out.detail = "q=" + format_short(choice.quantile) + " path=";
      for (std::size_t i = 0; i < choice.path.size(); ++i) {
        if (i > 0) out.detail += '|';
        out.detail +=
            format_short(choice.path[i].first) + ":" + std::to_string(choice.path[i].second);
      }
    }
    out.graph = pairwise_graph(out.theta, 0.0);
    out.runtime_s = std::chrono::duration<double>(clock::now() - t0).count();
  } else {
    const auto t0 = clock::now();
    const LnmFit fit = fit_lnm(data, cfg.lambda_grid, cfg.folds,
                               SymmetrizationRule::min_magnitude, lnm_seed);
    out.runtime_s = std::chrono::duration<double>(clock::now() - t0).count();
    out.theta = lnm_theta(fit);
    out.graph = fit.graph;
    out.detail = "lambda=";
    for (std::size_t i = 0; i < fit.lambdas.size(); ++i) {
      if (i > 0) out.detail += '|';
      out.detail += format_short(fit.lambdas[i]);
    }
  }
  return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;

  for (int rep = 0; rep < cfg.replicates; ++rep) {
    const ReplicateSeeds seeds = replicate_seeds(cfg.master_seed, rep);
    ModelSpec spec;
    spec.p = cfg.p;
    spec.nonzero_pairs = cfg.nonzero_pairs;
    spec.coupling = cfg.coupling;
    spec.seed = seeds.model;
    spec.random_singletons = cfg.random_singletons;
    const ThetaVector truth = random_pairwise_model(spec);
    const GraphEstimate true_graph = pairwise_graph(truth, 0.0);
    const ProbabilityVector pi = probs_from_theta(truth);

    for (std::size_t ni = 0; ni < cfg.sample_sizes.size(); ++ni) {
      const int n = cfg.sample_sizes[ni];
      const SampleMatrix data = sample(pi, n, seeds.data(ni));
      for (Method method : cfg.methods) {
        ReplicateResult r;
        r.replicate = rep;
        r.method = method;
        r.n = n;
        try {
          const FitOutcome fit = fit_one(method, cfg, data, seeds.lnm(ni));
          r.counts = confusion(true_graph, fit.graph);
          r.accuracy = r.counts.accuracy();
          if (cfg.nonzero_pairs > 0) {
            r.err_all = relative_error(truth, fit.theta, ErrorScope::all_nonempty);
            r.err_pairwise = relative_error(truth, fit.theta, ErrorScope::pairwise_only);
          } else {
            r.err_all = r.err_pairwise = std::nan("");
          }
          r.runtime_s = fit.runtime_s;
          r.detail = fit.detail;
        } catch (const std::exception& e) {
          r.failed = true;
          r.failure = e.what();
        }
        report.raw.push_back(std::move(r));
      }
    }
  }

  for (Method method : cfg.methods) {
    for (int n : cfg.sample_sizes) {
      AggregateRow row;
      row.method = method;
      row.n = n;
      std::vector<double> acc, err_all, err_pw, runtime;
      for (const ReplicateResult& r : report.raw) {
        if (r.method != method || r.n != n) continue;
        if (r.failed) {
          ++row.failed;
          continue;
        }
        ++row.ok;
        acc.push_back(r.accuracy);
        err_all.push_back(r.err_all);
        err_pw.push_back(r.err_pairwise);
        runtime.push_back(r.runtime_s);
      }
      row.accuracy_mean = mean_of(acc);
      row.accuracy_std = sample_std(acc, row.accuracy_mean);
      row.err_all_mean = mean_of(err_all);
      row.err_all_std = sample_std(err_all, row.err_all_mean);
      row.err_pairwise_mean = mean_of(err_pw);
      row.err_pairwise_std = sample_std(err_pw, row.err_pairwise_mean);
      row.runtime_mean_s = mean_of(runtime);
      row.runtime_std_s = sample_std(runtime, row.runtime_mean_s);
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string report_csv(const ExperimentReport& report) {
  std::string out =
      "method,n,replicates_ok,replicates_failed,accuracy_mean,accuracy_std,"
      "err_all_mean,err_all_std,err_pairwise_mean,err_pairwise_std,"
      "runtime_mean_s,runtime_std_s\n";
  for (const AggregateRow& row : report.rows) {
    out += method_name(row.method) + "," + std::to_string(row.n) + "," +
           std::to_string(row.ok) + "," + std::to_string(row.failed) + "," +
           format_metric(row.accuracy_mean) + "," + format_metric(row.accuracy_std) + "," +
           format_metric(row.err_all_mean) + "," + format_metric(row.err_all_std) + "," +
           format_metric(row.err_pairwise_mean) + "," + format_metric(row.err_pairwise_std) +
           "," + format_metric(row.runtime_mean_s) + "," + format_metric(row.runtime_std_s) +
           "\n";
  }
  return out;
}

std::string raw_csv(const ExperimentReport& report) {
  std::string out =
      "replicate,method,n,failed,tp,tn,fp,fn,accuracy,err_all,err_pairwise,"
      "runtime_s,detail\n";
  for (const ReplicateResult& r : report.raw) {
    out += std::to_string(r.replicate) + "," + method_name(r.method) + "," +
           std::to_string(r.n) + "," + (r.failed ? "1" : "0") + ",";
    if (r.failed) {
      out += "0,0,0,0,nan,nan,nan,nan," + sanitize(r.failure) + "\n";
      continue;
    }
    out += std::to_string(r.counts.tp) + "," + std::to_string(r.counts.tn) + "," +
           std::to_string(r.counts.fp) + "," + std::to_string(r.counts.fn) + "," +
           format_metric(r.accuracy) + "," + format_metric(r.err_all) + "," +
           format_metric(r.err_pairwise) + "," + format_metric(r.runtime_s) + "," +
           sanitize(r.detail) + "\n";
  }
  return out;
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  json doc;
  doc["p"] = cfg.p;
  doc["nonzero_pairs"] = cfg.nonzero_pairs;
  doc["coupling"] = cfg.coupling;
  doc["sample_sizes"] = cfg.sample_sizes;
  doc["replicates"] = cfg.replicates;
  json methods = json::array();
  for (Method m : cfg.methods) methods.push_back(method_name(m));
  doc["methods"] = std::move(methods);
  doc["quantiles"] = cfg.quantiles;
  if (cfg.lambda_grid.empty())
    doc["lambda_grid"] = "auto";
  else
    doc["lambda_grid"] = cfg.lambda_grid;
  doc["folds"] = cfg.folds;
  doc["alpha"] = cfg.alpha;
  doc["random_singletons"] = cfg.random_singletons;
  doc["seed"] = cfg.master_seed;
  return doc.dump(2) + "\n";
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed experiment config: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("experiment config must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (doc.contains("p")) cfg.p = doc["p"].get<int>();
    if (doc.contains("nonzero_pairs")) cfg.nonzero_pairs = doc["nonzero_pairs"].get<int>();
    if (doc.contains("edges")) cfg.nonzero_pairs = doc["edges"].get<int>();
    if (doc.contains("coupling")) cfg.coupling = doc["coupling"].get<double>();
    if (doc.contains("sample_sizes"))
      cfg.sample_sizes = doc["sample_sizes"].get<std::vector<int>>();
    if (doc.contains("replicates")) cfg.replicates = doc["replicates"].get<int>();
    if (doc.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : doc["methods"])
        cfg.methods.push_back(method_from_name(m.get<std::string>()));
    }
    if (doc.contains("quantiles")) cfg.quantiles = doc["quantiles"].get<std::vector<double>>();
    if (doc.contains("lambda_grid")) {
      if (doc["lambda_grid"].is_string()) {
        if (doc["lambda_grid"].get<std::string>() != "auto")
          throw ValidationError("lambda_grid must be \"auto\" or an array");
        cfg.lambda_grid.clear();
      } else {
        cfg.lambda_grid = doc["lambda_grid"].get<std::vector<double>>();
      }
    }
    if (doc.contains("folds")) cfg.folds = doc["folds"].get<int>();
    if (doc.contains("alpha")) cfg.alpha = doc["alpha"].get<double>();
    if (doc.contains("random_singletons"))
      cfg.random_singletons = doc["random_singletons"].get<bool>();
    if (doc.contains("seed")) cfg.master_seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("experiment config field has the wrong type: ") +
                          e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig read_experiment_config(const std::filesystem::path& file) {
  return experiment_config_from_json(read_text_file(file));
}

}  // namespace mbv
