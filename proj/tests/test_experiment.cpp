#include <algorithm>
#include <string>
#include <vector>

#include <doctest.h>

#include "mbv/errors.hpp"
#include "mbv/experiment.hpp"

using namespace mbv;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.p = 4;
  cfg.nonzero_pairs = 3;
  cfg.sample_sizes = {150, 300};
  cfg.replicates = 2;
  cfg.methods = {Method::mobius_inversion, Method::logistic_neighborhood};
  cfg.quantiles = {0.4, 0.5};
  cfg.lambda_grid = {0.01, 0.05, 0.2};
  cfg.folds = 5;
  cfg.master_seed = 91;
  return cfg;
}

bool same_metrics(const ReplicateResult& a, const ReplicateResult& b) {
  return a.replicate == b.replicate && a.method == b.method && a.n == b.n &&
         a.failed == b.failed && a.accuracy == b.accuracy && a.err_all == b.err_all &&
         a.err_pairwise == b.err_pairwise && a.detail == b.detail;
}

}  // namespace

TEST_CASE("method names round-trip") {
  CHECK(method_name(Method::mobius_inversion) == "M-I");
  CHECK(method_name(Method::logistic_neighborhood) == "L-N-M");
  CHECK(method_from_name("M-I") == Method::mobius_inversion);
  CHECK(method_from_name("L-N-M") == Method::logistic_neighborhood);
  CHECK_THROWS_AS(method_from_name("glasso"), ValidationError);
}

TEST_CASE("config validation rejects bad sweeps") {
  ExperimentConfig cfg = small_config();
  cfg.sample_sizes = {3};  // not above p
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = small_config();
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("a small sweep fills every cell") {
  const ExperimentConfig cfg = small_config();
  const ExperimentReport report = run_experiment(cfg);
  CHECK(report.raw.size() == 2 * 2 * 2);  // replicates x sizes x methods
  CHECK(report.rows.size() == 2 * 2);     // methods x sizes
  for (const ReplicateResult& r : report.raw) {
    REQUIRE_FALSE(r.failed);
    CHECK(r.accuracy >= 0.0);
    CHECK(r.accuracy <= 1.0);
    CHECK(r.err_all >= 0.0);
    CHECK(r.counts.total() == 6);
    CHECK(r.runtime_s >= 0.0);
    CHECK_FALSE(r.detail.empty());
  }
  for (const AggregateRow& row : report.rows) {
    CHECK(row.ok == 2);
    CHECK(row.failed == 0);
    CHECK(row.accuracy_mean >= 0.0);
    CHECK(row.accuracy_mean <= 1.0);
  }
}

TEST_CASE("identical configs reproduce identical metrics") {
  const ExperimentConfig cfg = small_config();
  const ExperimentReport a = run_experiment(cfg);
  const ExperimentReport b = run_experiment(cfg);
  REQUIRE(a.raw.size() == b.raw.size());
  for (std::size_t i = 0; i < a.raw.size(); ++i) CHECK(same_metrics(a.raw[i], b.raw[i]));
}

TEST_CASE("methods see the same model and sample within a replicate") {
  ExperimentConfig both = small_config();
  ExperimentConfig solo = small_config();
  solo.methods = {Method::mobius_inversion};
  const ExperimentReport with_both = run_experiment(both);
  const ExperimentReport alone = run_experiment(solo);
  std::vector<ReplicateResult> mi_rows;
  for (const ReplicateResult& r : with_both.raw)
    if (r.method == Method::mobius_inversion) mi_rows.push_back(r);
  REQUIRE(mi_rows.size() == alone.raw.size());
  for (std::size_t i = 0; i < mi_rows.size(); ++i)
    CHECK(same_metrics(mi_rows[i], alone.raw[i]));
}

TEST_CASE("report CSVs carry one line per row plus a header") {
  const ExperimentReport report = run_experiment(small_config());
  const std::string agg = report_csv(report);
  const std::string raw = raw_csv(report);
  CHECK(std::count(agg.begin(), agg.end(), '\n') == 1 + 4);
  CHECK(std::count(raw.begin(), raw.end(), '\n') == 1 + 8);
  CHECK(agg.rfind("method,n,replicates_ok", 0) == 0);
  CHECK(raw.rfind("replicate,method,n,failed", 0) == 0);
}

TEST_CASE("experiment configs round-trip through JSON") {
  const ExperimentConfig cfg = small_config();
  const ExperimentConfig back = experiment_config_from_json(experiment_config_json(cfg));
  CHECK(back.p == cfg.p);
  CHECK(back.nonzero_pairs == cfg.nonzero_pairs);
  CHECK(back.sample_sizes == cfg.sample_sizes);
  CHECK(back.replicates == cfg.replicates);
  CHECK(back.methods == cfg.methods);
  CHECK(back.quantiles == cfg.quantiles);
  CHECK(back.lambda_grid == cfg.lambda_grid);
  CHECK(back.folds == cfg.folds);
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.master_seed == cfg.master_seed);

  CHECK_THROWS_AS(experiment_config_from_json(R"({"p": "five"})"), ValidationError);
  const ExperimentConfig aliased = experiment_config_from_json(
      R"({"p": 5, "edges": 4, "sample_sizes": [100], "replicates": 1})");
  CHECK(aliased.nonzero_pairs == 4);
}
