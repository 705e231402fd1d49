#include "mbv/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mbv/errors.hpp"

namespace mbv {

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  std::vector<double> e(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) e[i] = std::exp(xs[i] - m);
  return m + std::log(stable_sum(e));
}

double stable_sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

void check_node(int node, int p, const char* what) {
  if (node < 1 || node > p)
    throw ValidationError(std::string(what) + " " + std::to_string(node) +
                          " out of range for p=" + std::to_string(p));
}

void check_mask(SubsetIndex d, int p, const char* what) {
  if (d >= subset_count(p))
    throw ValidationError(std::string(what) + " mask " + std::to_string(d) +
                          " out of range for p=" + std::to_string(p));
}

}  // namespace

void ProbabilityVector::validate() const {
  check_lattice(probs);
  for (SubsetIndex d = 0; d < probs.size(); ++d) {
    if (probs[d] <= 0.0)
      throw ValidationError("probability vector violates positivity at subset mask " +
                            std::to_string(d));
    if (probs[d] >= 1.0)
      throw ValidationError("probability vector has an entry >= 1 at subset mask " +
                            std::to_string(d));
  }
  const double total = stable_sum(probs.values);
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("probability vector sums to " + std::to_string(total) +
                          ", expected 1");
}

bool ThetaVector::is_normalized(double tol) const {
  LatticeVector s = theta;
  zeta_transform_in_place(s.values);
  for (double& x : s.values) x = std::exp(x);
  return std::abs(stable_sum(s.values) - 1.0) <= tol;
}

void GraphEstimate::set_edge(int i, int j, double weight) {
  check_node(i, p, "node");
  check_node(j, p, "node");
  if (i == j) throw ValidationError("self loops are not representable");
  if (i > j) std::swap(i, j);
  if (weight == 0.0)
    edges.erase({i, j});
  else
    edges[{i, j}] = weight;
}

bool GraphEstimate::has_edge(int i, int j) const { return weight(i, j) != 0.0; }

double GraphEstimate::weight(int i, int j) const {
  if (i > j) std::swap(i, j);
  const auto it = edges.find({i, j});
  return it == edges.end() ? 0.0 : it->second;
}

double normalize(ThetaVector& th) {
  check_lattice(th.theta);
  LatticeVector s = th.theta;
  zeta_transform_in_place(s.values);
  const double log_z = log_sum_exp(s.values);
  th.theta[0] -= log_z;
  return -log_z;
}

ThetaVector theta_from_probs(const ProbabilityVector& pi) {
  pi.validate();
  LatticeVector logs = pi.probs;
  for (double& x : logs.values) x = std::log(x);
  mobius_transform_in_place(logs.values);
  return ThetaVector{std::move(logs)};
}

ProbabilityVector probs_from_theta(const ThetaVector& th) {
  check_lattice(th.theta);
  LatticeVector s = th.theta;
  zeta_transform_in_place(s.values);
  for (double x : s.values)
    if (x > 700.0)
      throw NumericError("cumulative theta exceeds 700 before normalization; "
                         "parameters are ill-scaled");
  const double log_z = log_sum_exp(s.values);
  LatticeVector probs(th.theta.p);
  for (SubsetIndex d = 0; d < s.size(); ++d) {
    probs[d] = std::exp(s[d] - log_z);
    if (probs[d] <= 0.0)
      throw NumericError("outcome probability underflowed to zero at subset mask " +
                         std::to_string(d) + "; parameters are ill-scaled");
  }
  ProbabilityVector pi{std::move(probs)};
  pi.validate();
  return pi;
}

double conditional_success(const ThetaVector& th, int j, SubsetIndex rest) {
  check_lattice(th.theta);
  const int p = th.theta.p;
  check_node(j, p, "response node");
  check_mask(rest, p, "assignment");
  const SubsetIndex j_bit = SubsetIndex{1} << (j - 1);
  if (rest & j_bit)
    throw ValidationError("assignment mask must not include the response node");
  double s = 0.0;
  SubsetIndex sub = 0;
  while (true) {  // all D containing j with D \ {j} inside the assignment's ones
    s += th[sub | j_bit];
    if (sub == rest) break;
    sub = (sub - rest) & rest;
  }
  return stable_sigmoid(s);
}

double conditional_odds_ratio(const ProbabilityVector& pi, int i, int j, SubsetIndex rest) {
  pi.validate();
  const int p = pi.node_count();
  check_node(i, p, "node");
  check_node(j, p, "node");
  if (i == j) throw ValidationError("odds ratio needs two distinct nodes");
  check_mask(rest, p, "assignment");
  const SubsetIndex bi = SubsetIndex{1} << (i - 1);
  const SubsetIndex bj = SubsetIndex{1} << (j - 1);
  if (rest & (bi | bj))
    throw ValidationError("assignment mask must not include the queried nodes");
  // Conditioning factors cancel in the ratio, so the joint entries suffice.
  return (pi[rest | bi | bj] * pi[rest]) / (pi[rest | bi] * pi[rest | bj]);
}

bool independence_query(const ThetaVector& th, SubsetIndex a, SubsetIndex b, double tol) {
  check_lattice(th.theta);
  const int p = th.theta.p;
  check_mask(a, p, "set A");
  check_mask(b, p, "set B");
  if (a == 0 || b == 0) throw ValidationError("independence query needs non-empty sets");
  if (a & b) throw ValidationError("independence query needs disjoint sets");
  const std::size_t size = th.theta.size();
  for (SubsetIndex d = 1; d < size; ++d)
    if ((d & a) && (d & b) && std::abs(th[d]) > tol) return false;
  return true;
}

bool is_hierarchical(const ThetaVector& th, double tol) {
  check_lattice(th.theta);
  const std::size_t size = th.theta.size();
  std::vector<bool> support(size, false);
  for (SubsetIndex d = 1; d < size; ++d) support[d] = std::abs(th[d]) > tol;
  // Checking the one-smaller subsets of every supported set is enough: the
  // full downward closure follows by induction.
  for (SubsetIndex d = 1; d < size; ++d) {
    if (!support[d] || cardinality(d) < 2) continue;
    for (SubsetIndex bits = d; bits != 0; bits &= bits - 1) {
      const SubsetIndex low = bits & (~bits + 1);
      if (!support[d ^ low]) return false;
    }
  }
  return true;
}

std::set<SubsetIndex> hierarchical_closure(const std::set<SubsetIndex>& support) {
  std::set<SubsetIndex> closed;
  for (SubsetIndex d : support) {
    bool keep = true;
    SubsetIndex sub = 0;
    while (true) {
      if (sub != 0 && sub != d && !support.count(sub)) {
        keep = false;
        break;
      }
      if (sub == d) break;
      sub = (sub - d) & d;
    }
    if (keep) closed.insert(d);
  }
  return closed;
}

GraphEstimate pairwise_graph(const ThetaVector& th, double tol) {
  check_lattice(th.theta);
  const int p = th.theta.p;
  GraphEstimate g(p);
  for (int i = 1; i <= p; ++i) {
    for (int j = i + 1; j <= p; ++j) {
      const double w = th[make_subset({i, j})];
      if (std::abs(w) > tol) g.set_edge(i, j, w);
    }
  }
  return g;
}

}  // namespace mbv
