#pragma once

#include <map>
#include <set>
#include <utility>

#include "mbv/subset_lattice.hpp"

namespace mbv {

// Outcome probabilities p_D, one per subset D of V. Valid vectors are
// strictly inside (0,1) entrywise and sum to one.
struct ProbabilityVector {
  LatticeVector probs;

  int node_count() const { return probs.p; }
  double operator[](SubsetIndex d) const { return probs[d]; }

  // Throws ValidationError on a non-positive entry, an entry >= 1, or a sum
  // farther than 1e-12 from one.
  void validate() const;
};

// Exponential-family parameters theta_D. The empty-set entry is the
// normalizing constant: exp(zeta(theta)) sums to one when normalized.
struct ThetaVector {
  LatticeVector theta;

  int node_count() const { return theta.p; }
  double& operator[](SubsetIndex d) { return theta[d]; }
  double operator[](SubsetIndex d) const { return theta[d]; }

  bool is_normalized(double tol = 1e-10) const;
};

// Undirected graph over nodes 1..p. An edge is present iff its weight is
// nonzero; weights carry the pairwise theta values.
struct GraphEstimate {
  int p = 0;
  std::map<std::pair<int, int>, double> edges;  // keyed (i,j) with i < j

  GraphEstimate() = default;
  explicit GraphEstimate(int p_) : p(p_) {}

  void set_edge(int i, int j, double weight);  // weight 0 removes the edge
  bool has_edge(int i, int j) const;
  double weight(int i, int j) const;  // 0 when absent
  std::size_t edge_count() const { return edges.size(); }

  bool operator==(const GraphEstimate&) const = default;
};

// Shifts the empty-set entry so that probabilities sum to one. Returns the
// shift that was applied.
double normalize(ThetaVector& th);

// theta = Mobius transform of log(pi), entrywise log.
ThetaVector theta_from_probs(const ProbabilityVector& pi);

// pi = exp(zeta(theta)). A non-normalized input is renormalized through the
// empty-set entry (use normalize() first to observe the shift).
ProbabilityVector probs_from_theta(const ThetaVector& th);

// P(X_j = 1 | rest) where rest is a mask over V \ {j}; bit j-1 must be clear.
// Numerically stable for large linear predictors.
double conditional_success(const ThetaVector& th, int j, SubsetIndex rest);

// [P(1,1|rest) P(0,0|rest)] / [P(1,0|rest) P(0,1|rest)] for nodes i and j,
// conditioning on the assignment encoded by rest (bits i-1 and j-1 clear).
double conditional_odds_ratio(const ProbabilityVector& pi, int i, int j, SubsetIndex rest);

// True iff |theta_D| <= tol for every D meeting both a and b. The masks must
// be non-empty and disjoint.
bool independence_query(const ThetaVector& th, SubsetIndex a, SubsetIndex b, double tol = 1e-10);

// Hierarchy: a zeroed non-empty term forces every superset term to zero.
bool is_hierarchical(const ThetaVector& th, double tol = 1e-10);

// Keeps only the candidate sets whose non-empty subsets all belong to the
// input support.
std::set<SubsetIndex> hierarchical_closure(const std::set<SubsetIndex>& support);

// Edges are the pairs with |theta_ij| > tol.
GraphEstimate pairwise_graph(const ThetaVector& th, double tol = 1e-10);

}  // namespace mbv
