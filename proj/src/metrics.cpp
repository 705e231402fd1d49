#include "mbv/metrics.hpp"

#include <cmath>
#include <string>

#include "mbv/errors.hpp"

namespace mbv {

double ConfusionCounts::accuracy() const {
  const long t = total();
  if (t == 0) throw ValidationError("no node pairs to classify");
  return static_cast<double>(tp + tn) / static_cast<double>(t);
}

ConfusionCounts confusion(const GraphEstimate& truth, const GraphEstimate& estimate) {
  if (truth.p != estimate.p)
    throw ValidationError("graphs disagree on the node count: " + std::to_string(truth.p) +
                          " vs " + std::to_string(estimate.p));
  ConfusionCounts counts;
  for (int i = 1; i <= truth.p; ++i) {
    for (int j = i + 1; j <= truth.p; ++j) {
      const bool t = truth.has_edge(i, j);
      const bool e = estimate.has_edge(i, j);
      if (t && e)
        ++counts.tp;
      else if (!t && !e)
        ++counts.tn;
      else if (t && !e)
        ++counts.fn;
      else
        ++counts.fp;
    }
  }
  return counts;
}

namespace {

bool in_scope(SubsetIndex d, ErrorScope scope) {
  const int k = cardinality(d);
  switch (scope) {
    case ErrorScope::all_nonempty:
      return k >= 1;
    case ErrorScope::pairwise_only:
      return k == 2;
    case ErrorScope::pairwise_and_singletons:
      return k == 1 || k == 2;
  }
  return false;
}

}  // namespace

double relative_error(const ThetaVector& truth, const ThetaVector& estimate, ErrorScope scope) {
  check_lattice(truth.theta);
  check_lattice(estimate.theta);
  if (truth.theta.p != estimate.theta.p)
    throw ValidationError("parameter vectors disagree on the node count");
  double num = 0.0;
  double den = 0.0;
  for (SubsetIndex d = 1; d < truth.theta.size(); ++d) {
    if (!in_scope(d, scope)) continue;
    const double diff = truth[d] - estimate[d];
    num += diff * diff;
    den += truth[d] * truth[d];
  }
  if (den == 0.0)
    throw ValidationError("relative error is undefined: the truth has zero norm on this scope");
  return std::sqrt(num / den);
}

}  // namespace mbv
