#pragma once

#include "mbv/model.hpp"

namespace mbv {

// Edge-classification counts over the p(p-1)/2 unordered node pairs.
struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fn = 0;
  long fp = 0;

  long total() const { return tp + tn + fn + fp; }
  double accuracy() const;
};

ConfusionCounts confusion(const GraphEstimate& truth, const GraphEstimate& estimate);

enum class ErrorScope { all_nonempty, pairwise_only, pairwise_and_singletons };

// ||theta - thetahat||_2 / ||theta||_2 over the scoped entries. Throws
// ValidationError when the truth has zero norm on the scope.
double relative_error(const ThetaVector& truth, const ThetaVector& estimate,
                      ErrorScope scope = ErrorScope::all_nonempty);

}  // namespace mbv
