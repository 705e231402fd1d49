#include "mbv/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "mbv/errors.hpp"

namespace mbv {

namespace {

void check_frequencies(const FrequencyVector& freq) {
  (void)subset_count(freq.p);
  if (freq.counts.size() != subset_count(freq.p))
    throw ValidationError("frequency vector for p=" + std::to_string(freq.p) + " must have " +
                          std::to_string(subset_count(freq.p)) + " entries");
  if (!(freq.n > 0.0)) throw ValidationError("frequency vector needs a positive total");
  if (freq.alpha < 0.0) throw ValidationError("smoothing constant must be non-negative");
  for (double c : freq.counts)
    if (!std::isfinite(c) || c < 0.0)
      throw ValidationError("frequency counts must be finite and non-negative");
  const double total = stable_sum(freq.counts);
  if (std::abs(total - freq.n) > 1e-9 * std::max(1.0, freq.n))
    throw ValidationError("frequency counts sum to " + std::to_string(total) +
                          ", expected " + std::to_string(freq.n));
}

// With alpha = 0 the estimator is undefined on empty cells; report which.
void check_positive_cells(const FrequencyVector& freq) {
  if (freq.alpha > 0.0) return;
  std::vector<SubsetIndex> zeros;
  for (SubsetIndex d = 0; d < freq.counts.size(); ++d)
    if (freq.counts[d] == 0.0) zeros.push_back(d);
  if (zeros.empty()) return;
  std::string msg = "empirical frequency is zero for " + std::to_string(zeros.size()) +
                    " subsets (masks";
  for (std::size_t i = 0; i < zeros.size() && i < 8; ++i)
    msg += " " + std::to_string(zeros[i]);
  if (zeros.size() > 8) msg += " ...";
  msg += ") and no smoothing is active; the sample is too small for this p";
  throw NumericError(msg);
}

}  // namespace

FrequencyVector FrequencyVector::from_probabilities(const ProbabilityVector& pi, double alpha) {
  pi.validate();
  FrequencyVector freq;
  freq.p = pi.node_count();
  freq.counts = pi.probs.values;
  freq.n = 1.0;
  freq.alpha = alpha;
  return freq;
}

ThresholdRule ThresholdRule::none() { return ThresholdRule{}; }

ThresholdRule ThresholdRule::quantile_rule(double q, ThresholdScope scope) {
  ThresholdRule rule;
  rule.kind = ThresholdKind::quantile;
  rule.scope = scope;
  rule.quantile = q;
  return rule;
}

ThresholdRule ThresholdRule::absolute_rule(double t, ThresholdScope scope) {
  ThresholdRule rule;
  rule.kind = ThresholdKind::absolute;
  rule.scope = scope;
  rule.cutoff = t;
  return rule;
}

ThresholdRule ThresholdRule::degree_rule(int d) {
  ThresholdRule rule;
  rule.kind = ThresholdKind::degree;
  rule.degree = d;
  return rule;
}

void ThresholdRule::validate(int p) const {
  switch (kind) {
    case ThresholdKind::none:
      break;
    case ThresholdKind::quantile:
      if (!(quantile >= 0.0 && quantile < 1.0))
        throw ValidationError("threshold quantile must lie in [0,1)");
      break;
    case ThresholdKind::absolute:
      if (!(cutoff >= 0.0)) throw ValidationError("absolute threshold must be non-negative");
      break;
    case ThresholdKind::degree:
      if (degree < 0 || degree > p - 1)
        throw ValidationError("degree threshold must lie in [0, p-1]");
      break;
  }
}

FrequencyVector empirical_frequencies(const SampleMatrix& data, double alpha) {
  const std::size_t size = subset_count(data.p);
  if (data.n() < 1) throw ValidationError("need at least one observation");
  if (alpha < 0.0) throw ValidationError("smoothing constant must be non-negative");
  FrequencyVector freq;
  freq.p = data.p;
  freq.counts.assign(size, 0.0);
  freq.n = static_cast<double>(data.n());
  freq.alpha = alpha;
  for (std::uint32_t row : data.rows) {
    if (row >= size) throw ValidationError("observation row is out of range for p");
    freq.counts[row] += 1.0;
  }
  return freq;
}

ThetaVector estimate_theta(const FrequencyVector& freq) {
  check_frequencies(freq);
  check_positive_cells(freq);
  LatticeVector logs(freq.p);
  for (SubsetIndex d = 0; d < logs.size(); ++d) logs[d] = std::log(freq.smoothed(d));
  mobius_transform_in_place(logs.values);
  return ThetaVector{std::move(logs)};
}

ThetaVector estimate_theta_parity(const FrequencyVector& freq) {
  check_frequencies(freq);
  check_positive_cells(freq);
  ThetaVector th{LatticeVector(freq.p)};
  th[0] = std::log(freq.smoothed(0));
  for (SubsetIndex d = 1; d < freq.counts.size(); ++d) {
    const auto [even, odd] = subset_parity_split(d);
    double acc = 0.0;
    for (std::size_t i = 0; i < even.size(); ++i)
      acc += std::log(freq.smoothed(even[i]) / freq.smoothed(odd[i]));
    th[d] = acc;
  }
  return th;
}

namespace {

bool in_scope(SubsetIndex d, ThresholdScope scope) {
  if (d == 0) return false;
  return scope == ThresholdScope::all_nonempty || cardinality(d) == 2;
}

// Right-continuous inverse-CDF cutoff of the scoped magnitudes; entries at
// or below the cutoff get zeroed, so ties all die together. The small guard
// keeps ceil() from tipping over when q*m sits on an integer that the
// binary representation of q pushes slightly upward.
void apply_quantile(ThetaVector& th, double q, ThresholdScope scope) {
  std::vector<double> magnitudes;
  for (SubsetIndex d = 1; d < th.theta.size(); ++d)
    if (in_scope(d, scope)) magnitudes.push_back(std::abs(th[d]));
  if (magnitudes.empty() || q <= 0.0) return;
  std::sort(magnitudes.begin(), magnitudes.end());
  const double m = static_cast<double>(magnitudes.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q * m - 1e-9)));
  const std::size_t index = std::min(rank, magnitudes.size()) - 1;
  const double cutoff = magnitudes[index];
  for (SubsetIndex d = 1; d < th.theta.size(); ++d)
    if (in_scope(d, scope) && std::abs(th[d]) <= cutoff) th[d] = 0.0;
}

void apply_absolute(ThetaVector& th, double t, ThresholdScope scope) {
  for (SubsetIndex d = 1; d < th.theta.size(); ++d)
    if (in_scope(d, scope) && std::abs(th[d]) <= t) th[d] = 0.0;
}

// Keep, per node, the d largest pairwise magnitudes; a pair survives when
// either endpoint keeps it.
void apply_degree(ThetaVector& th, int degree) {
  const int p = th.theta.p;
  std::vector<std::vector<bool>> kept(static_cast<std::size_t>(p) + 1,
                                      std::vector<bool>(static_cast<std::size_t>(p) + 1, false));
  for (int j = 1; j <= p; ++j) {
    std::vector<std::pair<double, int>> partners;  // (-|theta|, partner)
    for (int i = 1; i <= p; ++i) {
      if (i == j) continue;
      partners.emplace_back(-std::abs(th[make_subset({i, j})]), i);
    }
    std::sort(partners.begin(), partners.end());
    for (int k = 0; k < degree && k < static_cast<int>(partners.size()); ++k)
      kept[static_cast<std::size_t>(j)][static_cast<std::size_t>(partners[k].second)] = true;
  }
  for (int i = 1; i <= p; ++i) {
    for (int j = i + 1; j <= p; ++j) {
      const bool survives = kept[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ||
                            kept[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      if (!survives) th[make_subset({i, j})] = 0.0;
    }
  }
}

}  // namespace

ThetaVector apply_threshold(const ThetaVector& th, const ThresholdRule& rule) {
  check_lattice(th.theta);
  rule.validate(th.theta.p);
  if (rule.kind == ThresholdKind::none) return th;
  ThetaVector out = th;
  switch (rule.kind) {
    case ThresholdKind::quantile:
      apply_quantile(out, rule.quantile, rule.scope);
      break;
    case ThresholdKind::absolute:
      apply_absolute(out, rule.cutoff, rule.scope);
      break;
    case ThresholdKind::degree:
      apply_degree(out, rule.degree);
      break;
    case ThresholdKind::none:
      break;
  }
  normalize(out);
  return out;
}

double theta_bound(const FrequencyVector& freq, SubsetIndex d) {
  check_frequencies(freq);
  if (d == 0) throw ValidationError("the magnitude bound is defined for non-empty sets");
  if (d >= freq.counts.size()) throw ValidationError("subset mask out of range");
  check_positive_cells(freq);
  double lo = freq.smoothed(0);
  double hi = lo;
  SubsetIndex sub = 0;
  while (true) {
    const double f = freq.smoothed(sub);
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    if (sub == d) break;
    sub = (sub - d) & d;
  }
  const double half_subsets = std::ldexp(1.0, cardinality(d) - 1);  // 2^(|d|-1)
  return half_subsets * std::log(hi / lo);
}

MobiusFit fit_mobius(const SampleMatrix& data, const ThresholdRule& rule, double alpha) {
  if (data.n() <= data.p)
    throw ValidationError("the closed-form estimator needs n > p, got n=" +
                          std::to_string(data.n()) + ", p=" + std::to_string(data.p));
  const FrequencyVector freq = empirical_frequencies(data, alpha);
  const ThetaVector raw = estimate_theta(freq);
  ThetaVector theta = apply_threshold(raw, rule);
  GraphEstimate graph = pairwise_graph(theta, 0.0);
  return MobiusFit{std::move(theta), std::move(graph)};
}

QuantileChoice choose_quantile(const ThetaVector& th, const std::vector<double>& quantiles,
                               int target_edges, ThresholdScope scope) {
  if (quantiles.empty()) throw ValidationError("need at least one candidate quantile");
  std::vector<double> sorted = quantiles;
  std::sort(sorted.begin(), sorted.end());
  QuantileChoice choice;
  int best_gap = -1;
  for (double q : sorted) {
    const ThetaVector pruned = apply_threshold(th, ThresholdRule::quantile_rule(q, scope));
    const int edges = static_cast<int>(pairwise_graph(pruned, 0.0).edge_count());
    choice.path.emplace_back(q, edges);
    const int gap = std::abs(edges - target_edges);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      choice.quantile = q;
    }
  }
  return choice;
}

}  // namespace mbv
