#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "mbv/errors.hpp"
#include "mbv/estimator.hpp"
#include "mbv/metrics.hpp"

using namespace mbv;

namespace {

FrequencyVector random_frequencies(int p, std::mt19937_64& rng, double alpha = 0.0) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  LatticeVector v(p);
  for (double& x : v.values) x = u(rng);
  const double total = stable_sum(v.values);
  for (double& x : v.values) x /= total;
  return FrequencyVector::from_probabilities(ProbabilityVector{std::move(v)}, alpha);
}

// Brute-force cutoff: sort the scoped magnitudes and take the ceil(q*m)-th
// smallest; entries at or below it must be zeroed, the rest untouched.
double oracle_cutoff(std::vector<double> magnitudes, double q) {
  std::sort(magnitudes.begin(), magnitudes.end());
  const auto m = static_cast<double>(magnitudes.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * m - 1e-9));
  rank = std::max<std::size_t>(rank, 1);
  rank = std::min(rank, magnitudes.size());
  return magnitudes[rank - 1];
}

ThetaVector pairwise_theta(int p, const std::vector<double>& pair_values) {
  ThetaVector th{LatticeVector(p)};
  std::size_t idx = 0;
  for (int i = 1; i <= p; ++i)
    for (int j = i + 1; j <= p; ++j) th[make_subset({i, j})] = pair_values.at(idx++);
  normalize(th);
  return th;
}

}  // namespace

TEST_CASE("empirical frequencies count exact outcomes") {
  SampleMatrix data;
  data.p = 2;
  data.rows = {0b00, 0b01, 0b01, 0b11};  // (0,0), (1,0), (1,0), (1,1)
  const FrequencyVector freq = empirical_frequencies(data, 0.0);
  CHECK(freq.frequency(0) == doctest::Approx(0.25));
  CHECK(freq.frequency(1) == doctest::Approx(0.5));
  CHECK(freq.frequency(2) == doctest::Approx(0.0));
  CHECK(freq.frequency(3) == doctest::Approx(0.25));
}

TEST_CASE("a single all-ones row concentrates on the full set") {
  SampleMatrix data;
  data.p = 4;
  data.rows = {full_set(4)};
  const FrequencyVector freq = empirical_frequencies(data, 0.0);
  CHECK(freq.frequency(full_set(4)) == doctest::Approx(1.0));
  CHECK(freq.n == 1.0);
}

TEST_CASE("sampled frequencies approach the law") {
  ModelSpec spec;
  spec.p = 5;
  spec.nonzero_pairs = 6;
  spec.seed = 2;
  const ThetaVector th = random_pairwise_model(spec);
  const ProbabilityVector pi = probs_from_theta(th);
  const FrequencyVector freq = empirical_frequencies(sample(pi, 100000, 12), 0.0);
  double max_err = 0.0;
  for (SubsetIndex d = 0; d < pi.probs.size(); ++d)
    max_err = std::max(max_err, std::abs(freq.frequency(d) - pi[d]));
  CHECK(max_err < 0.01);
}

TEST_CASE("the estimate is exact at population frequencies") {
  ModelSpec spec;
  spec.p = 5;
  spec.nonzero_pairs = 6;
  spec.seed = 4;
  const ThetaVector truth = random_pairwise_model(spec);
  const FrequencyVector freq =
      FrequencyVector::from_probabilities(probs_from_theta(truth), 0.0);
  const ThetaVector est = estimate_theta(freq);
  double max_err = 0.0;
  for (SubsetIndex d = 0; d < truth.theta.size(); ++d)
    max_err = std::max(max_err, std::abs(est[d] - truth[d]));
  CHECK(max_err < 1e-12);
}

TEST_CASE("the pairwise entry is the four-cell log ratio") {
  std::mt19937_64 rng(41);
  const FrequencyVector freq = random_frequencies(3, rng);
  const ThetaVector est = estimate_theta(freq);
  const double expected = std::log(freq.smoothed(0b011) * freq.smoothed(0b000) /
                                   (freq.smoothed(0b001) * freq.smoothed(0b010)));
  CHECK(est[make_subset({1, 2})] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("zero cells without smoothing raise a descriptive error") {
  SampleMatrix data;
  data.p = 3;
  data.rows = {0, 1, 2};
  const FrequencyVector freq = empirical_frequencies(data, 0.0);
  CHECK_THROWS_WITH_AS(estimate_theta(freq), doctest::Contains("too small"), NumericError);
  const FrequencyVector smoothed = empirical_frequencies(data, 0.5);
  CHECK_NOTHROW(estimate_theta(smoothed));
}

TEST_CASE("transform and parity routes agree") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 7);  // p in 2..8
    const FrequencyVector freq = random_frequencies(p, rng);
    const ThetaVector a = estimate_theta(freq);
    const ThetaVector b = estimate_theta_parity(freq);
    double max_err = 0.0;
    for (SubsetIndex d = 0; d < a.theta.size(); ++d)
      max_err = std::max(max_err, std::abs(a[d] - b[d]));
    CHECK(max_err < 1e-12);
  }
}

TEST_CASE("the none rule is the identity") {
  std::mt19937_64 rng(43);
  const FrequencyVector freq = random_frequencies(4, rng);
  const ThetaVector est = estimate_theta(freq);
  const ThetaVector out = apply_threshold(est, ThresholdRule::none());
  CHECK(out.theta.values == est.theta.values);
}

TEST_CASE("median quantile keeps the three largest of six pairs") {
  const ThetaVector th = pairwise_theta(4, {0.5, 0.1, 0.05, 0.4, 0.02, 0.3});
  const ThetaVector out =
      apply_threshold(th, ThresholdRule::quantile_rule(0.5, ThresholdScope::pairwise_only));
  std::vector<double> survivors;
  for (SubsetIndex d = 1; d < out.theta.size(); ++d)
    if (cardinality(d) == 2 && out[d] != 0.0) survivors.push_back(out[d]);
  std::sort(survivors.begin(), survivors.end());
  CHECK(survivors == std::vector<double>{0.3, 0.4, 0.5});
}

TEST_CASE("quantile thresholding matches the brute-force cutoff oracle") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double q : {0.0, 0.2, 0.4, 0.5, 0.6, 0.7, 0.99}) {
    for (ThresholdScope scope : {ThresholdScope::pairwise_only, ThresholdScope::all_nonempty}) {
      ThetaVector th{LatticeVector(5)};
      for (SubsetIndex d = 1; d < th.theta.size(); ++d) th[d] = u(rng);
      normalize(th);
      const ThetaVector out = apply_threshold(th, ThresholdRule::quantile_rule(q, scope));
      std::vector<double> scoped;
      for (SubsetIndex d = 1; d < th.theta.size(); ++d) {
        const bool in = scope == ThresholdScope::all_nonempty || cardinality(d) == 2;
        if (in) scoped.push_back(std::abs(th[d]));
      }
      const double cutoff = q == 0.0 ? -1.0 : oracle_cutoff(scoped, q);
      for (SubsetIndex d = 1; d < th.theta.size(); ++d) {
        const bool in = scope == ThresholdScope::all_nonempty || cardinality(d) == 2;
        if (in && std::abs(th[d]) <= cutoff)
          CHECK(out[d] == 0.0);
        else
          CHECK(out[d] == th[d]);
      }
    }
  }
}

TEST_CASE("pairwise scope leaves higher-order entries alone") {
  ThetaVector th{LatticeVector(3)};
  th[make_subset({1, 2})] = 0.01;
  th[make_subset({1, 2, 3})] = 0.001;  // smaller than every pair, out of scope
  th[make_subset({1, 3})] = 0.6;
  th[make_subset({2, 3})] = 0.7;
  normalize(th);
  const ThetaVector out =
      apply_threshold(th, ThresholdRule::quantile_rule(0.4, ThresholdScope::pairwise_only));
  CHECK(out[make_subset({1, 2})] == 0.0);
  CHECK(out[make_subset({1, 2, 3})] == 0.001);
}

TEST_CASE("absolute thresholding is idempotent and monotone") {
  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ThetaVector th{LatticeVector(5)};
  for (SubsetIndex d = 1; d < th.theta.size(); ++d) th[d] = u(rng);
  normalize(th);
  std::size_t prev_edges = 11;  // above the 10 possible pairs
  for (double t : {0.0, 0.2, 0.5, 0.9}) {
    const ThresholdRule rule = ThresholdRule::absolute_rule(t, ThresholdScope::pairwise_only);
    const ThetaVector once = apply_threshold(th, rule);
    const ThetaVector twice = apply_threshold(once, rule);
    CHECK(once.theta.values == twice.theta.values);
    const std::size_t edges = pairwise_graph(once, 0.0).edge_count();
    CHECK(edges <= prev_edges);
    prev_edges = edges;
  }
}

TEST_CASE("degree rule keeps the union of per-node top entries") {
  const ThetaVector th = pairwise_theta(4, {0.9, 0.8, 0.1, 0.2, 0.05, 0.3});
  // Pairs in order: (1,2)=0.9 (1,3)=0.8 (1,4)=0.1 (2,3)=0.2 (2,4)=0.05 (3,4)=0.3
  const ThetaVector out = apply_threshold(th, ThresholdRule::degree_rule(1));
  // Top partner per node: 1->2, 2->1, 3->1, 4->3; union keeps (1,2), (1,3), (3,4).
  CHECK(out[make_subset({1, 2})] == 0.9);
  CHECK(out[make_subset({1, 3})] == 0.8);
  CHECK(out[make_subset({3, 4})] == 0.3);
  CHECK(out[make_subset({1, 4})] == 0.0);
  CHECK(out[make_subset({2, 3})] == 0.0);
  CHECK(out[make_subset({2, 4})] == 0.0);
}

TEST_CASE("thresholded estimates stay normalized") {
  std::mt19937_64 rng(46);
  const FrequencyVector freq = random_frequencies(4, rng);
  const ThetaVector est = estimate_theta(freq);
  const ThetaVector out =
      apply_threshold(est, ThresholdRule::quantile_rule(0.5, ThresholdScope::all_nonempty));
  CHECK(out.is_normalized(1e-10));
}

TEST_CASE("magnitude bound on hand cases") {
  LatticeVector v(3, 1.0 / 8.0);
  const FrequencyVector uniform =
      FrequencyVector::from_probabilities(ProbabilityVector{std::move(v)}, 0.0);
  const ThetaVector est = estimate_theta(uniform);
  for (SubsetIndex d = 1; d < 8; ++d) {
    CHECK(theta_bound(uniform, d) == doctest::Approx(0.0));
    CHECK(std::abs(est[d]) < 1e-14);
  }

  std::mt19937_64 rng(47);
  const FrequencyVector freq = random_frequencies(3, rng);
  const SubsetIndex d = make_subset({1, 2});
  double lo = freq.smoothed(0), hi = freq.smoothed(0);
  for (SubsetIndex sub : {SubsetIndex{1}, SubsetIndex{2}, SubsetIndex{3}}) {
    lo = std::min(lo, freq.smoothed(sub));
    hi = std::max(hi, freq.smoothed(sub));
  }
  CHECK(theta_bound(freq, d) == doctest::Approx(2.0 * std::log(hi / lo)).epsilon(1e-12));
}

TEST_CASE("the bound dominates the estimate everywhere") {
  std::mt19937_64 rng(48);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 2 + static_cast<int>(rng() % 7);
    const FrequencyVector freq = random_frequencies(p, rng);
    const ThetaVector est = estimate_theta(freq);
    for (SubsetIndex d = 1; d < freq.counts.size(); ++d)
      CHECK(std::abs(est[d]) <= theta_bound(freq, d) + 1e-12);
  }
  CHECK_THROWS_AS(theta_bound(random_frequencies(3, rng), 0), ValidationError);
}

TEST_CASE("population-exact fit recovers the support exactly") {
  ModelSpec spec;
  spec.p = 5;
  spec.nonzero_pairs = 6;
  spec.seed = 5;
  const ThetaVector truth = random_pairwise_model(spec);
  const GraphEstimate true_graph = pairwise_graph(truth, 0.0);
  const FrequencyVector freq =
      FrequencyVector::from_probabilities(probs_from_theta(truth), 0.0);
  const ThetaVector est = estimate_theta(freq);
  const ThetaVector pruned =
      apply_threshold(est, ThresholdRule::quantile_rule(0.4, ThresholdScope::pairwise_only));
  CHECK(pairwise_graph(pruned, 0.0).edges == true_graph.edges);

  // Without a threshold the recovery is exact in value as well.
  const ThetaVector raw = apply_threshold(est, ThresholdRule::none());
  double max_err = 0.0;
  for (SubsetIndex d = 0; d < truth.theta.size(); ++d)
    max_err = std::max(max_err, std::abs(raw[d] - truth[d]));
  CHECK(max_err < 1e-12);
}

TEST_CASE("sampled fit lands near the truth") {
  ModelSpec spec;
  spec.p = 5;
  spec.nonzero_pairs = 6;
  spec.seed = 6;
  const ThetaVector truth = random_pairwise_model(spec);
  const SampleMatrix data = sample(truth, 5000, 61);
  const MobiusFit fit =
      fit_mobius(data, ThresholdRule::quantile_rule(0.4, ThresholdScope::pairwise_only), 0.5);
  const double err = relative_error(truth, fit.theta, ErrorScope::pairwise_only);
  CHECK(err < 0.25);
  CHECK(fit.graph.edge_count() >= 4);
}

TEST_CASE("the closed form needs more data than nodes") {
  SampleMatrix data;
  data.p = 5;
  data.rows = {1, 2, 3, 4};
  CHECK_THROWS_AS(fit_mobius(data, ThresholdRule::none(), 0.5), ValidationError);
}

TEST_CASE("quantile selection tracks the sparsity prior") {
  ModelSpec spec;
  spec.p = 5;
  spec.nonzero_pairs = 6;
  spec.seed = 8;
  const ThetaVector truth = random_pairwise_model(spec);
  const FrequencyVector freq =
      FrequencyVector::from_probabilities(probs_from_theta(truth), 0.0);
  const ThetaVector est = estimate_theta(freq);
  const QuantileChoice choice =
      choose_quantile(est, {0.2, 0.4, 0.5, 0.6, 0.7}, 6, ThresholdScope::pairwise_only);
  CHECK(choice.path.size() == 5);
  int best_gap = 100;
  for (const auto& [q, edges] : choice.path) best_gap = std::min(best_gap, std::abs(edges - 6));
  bool found = false;
  for (const auto& [q, edges] : choice.path)
    if (q == choice.quantile) {
      CHECK(std::abs(edges - 6) == best_gap);
      found = true;
    }
  CHECK(found);
}
