#pragma once

#include <utility>
#include <vector>

#include "mbv/model.hpp"
#include "mbv/sampler.hpp"

namespace mbv {

// Per-subset outcome counts with optional additive smoothing. Counts are
// doubles so that population-exact vectors (counts = probabilities, n = 1)
// flow through the same estimator path as integer counts.
struct FrequencyVector {
  int p = 0;
  std::vector<double> counts;  // 2^p entries summing to n
  double n = 0.0;
  double alpha = 0.5;  // additive smoothing per cell

  double frequency(SubsetIndex d) const { return counts[d] / n; }
  double smoothed(SubsetIndex d) const {
    return (counts[d] + alpha) / (n + alpha * static_cast<double>(counts.size()));
  }

  static FrequencyVector from_probabilities(const ProbabilityVector& pi, double alpha = 0.0);
};

enum class ThresholdKind { none, quantile, absolute, degree };
enum class ThresholdScope { pairwise_only, all_nonempty };

// Which estimated entries to zero after estimation. The empty-set entry is
// never touched. The degree rule always acts on pairwise entries, where a
// per-node degree is defined.
struct ThresholdRule {
  ThresholdKind kind = ThresholdKind::none;
  ThresholdScope scope = ThresholdScope::pairwise_only;
  double quantile = 0.0;  // kind == quantile, in [0,1)
  double cutoff = 0.0;    // kind == absolute, >= 0
  int degree = 0;         // kind == degree, in [0, p-1]

  static ThresholdRule none();
  static ThresholdRule quantile_rule(double q, ThresholdScope scope = ThresholdScope::pairwise_only);
  static ThresholdRule absolute_rule(double t, ThresholdScope scope = ThresholdScope::pairwise_only);
  static ThresholdRule degree_rule(int d);

  void validate(int p) const;
};

// Exact outcome counts of the sample, O(n) time, O(2^p) storage.
FrequencyVector empirical_frequencies(const SampleMatrix& data, double alpha = 0.5);

// thetahat = Mobius transform of the log smoothed frequencies. With
// alpha = 0 a zero count raises NumericError naming the offending subsets.
ThetaVector estimate_theta(const FrequencyVector& freq);

// The same estimator through the parity-ratio identity (sum of log ratios of
// even- against odd-parity subset frequencies); kept as an independent
// second route for verification.
ThetaVector estimate_theta_parity(const FrequencyVector& freq);

// Applies the rule and renormalizes through the empty-set entry (the none
// rule returns the input untouched).
ThetaVector apply_threshold(const ThetaVector& th, const ThresholdRule& rule);

// 2^(|d|-1) log(max/min smoothed frequency over subsets of d); d non-empty.
// Dominates |estimate_theta(freq)[d]| for every input.
double theta_bound(const FrequencyVector& freq, SubsetIndex d);

struct MobiusFit {
  ThetaVector theta;
  GraphEstimate graph;
};

// Frequencies, closed-form estimate, threshold; the graph is the pairwise
// support of the thresholded estimate. Requires n > p.
MobiusFit fit_mobius(const SampleMatrix& data, const ThresholdRule& rule, double alpha = 0.5);

// Picks from the candidate quantiles the one whose surviving pairwise-edge
// count is closest to target_edges; ties go to the smaller quantile. The
// path records (quantile, surviving edges) for every candidate.
struct QuantileChoice {
  double quantile = 0.0;
  std::vector<std::pair<double, int>> path;
};
QuantileChoice choose_quantile(const ThetaVector& th, const std::vector<double>& quantiles,
                               int target_edges,
                               ThresholdScope scope = ThresholdScope::pairwise_only);

}  // namespace mbv
