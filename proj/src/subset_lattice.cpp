#include "mbv/subset_lattice.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "mbv/errors.hpp"

namespace mbv {

std::size_t subset_count(int p) {
  if (p < 1) throw ValidationError("node count must be at least 1, got " + std::to_string(p));
  if (p > kMaxNodes)
    throw ValidationError("node count " + std::to_string(p) + " exceeds the lattice cap of " +
                          std::to_string(kMaxNodes) + " (2^p entries would not fit in memory)");
  return std::size_t{1} << p;
}

SubsetIndex full_set(int p) { return static_cast<SubsetIndex>(subset_count(p) - 1); }

int cardinality(SubsetIndex d) { return std::popcount(d); }

bool contains_node(SubsetIndex d, int node) { return (d >> (node - 1)) & 1U; }

SubsetIndex make_subset(std::initializer_list<int> nodes) {
  SubsetIndex d = 0;
  for (int node : nodes) {
    if (node < 1 || node > kMaxNodes)
      throw ValidationError("node " + std::to_string(node) + " out of range");
    d |= SubsetIndex{1} << (node - 1);
  }
  return d;
}

SubsetIndex make_subset(const std::vector<int>& nodes) {
  SubsetIndex d = 0;
  for (int node : nodes) {
    if (node < 1 || node > kMaxNodes)
      throw ValidationError("node " + std::to_string(node) + " out of range");
    d |= SubsetIndex{1} << (node - 1);
  }
  return d;
}

std::vector<int> subset_nodes(SubsetIndex d) {
  std::vector<int> nodes;
  for (int i = 1; d != 0; ++i, d >>= 1)
    if (d & 1U) nodes.push_back(i);
  return nodes;
}

LatticeVector::LatticeVector(int p_, double fill) : p(p_), values(subset_count(p_), fill) {}

void check_lattice(const LatticeVector& v) {
  if (v.values.size() != subset_count(v.p))
    throw ValidationError("lattice vector for p=" + std::to_string(v.p) + " must have " +
                          std::to_string(subset_count(v.p)) + " entries, has " +
                          std::to_string(v.values.size()));
  for (double x : v.values)
    if (!std::isfinite(x)) throw ValidationError("lattice vector has a non-finite entry");
}

double stable_sum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

void zeta_transform_in_place(std::span<double> values) {
  const std::size_t n = values.size();
  for (std::size_t bit = 1; bit < n; bit <<= 1)
    for (std::size_t mask = 0; mask < n; ++mask)
      if (mask & bit) values[mask] += values[mask ^ bit];
}

void mobius_transform_in_place(std::span<double> values) {
  const std::size_t n = values.size();
  for (std::size_t bit = 1; bit < n; bit <<= 1)
    for (std::size_t mask = 0; mask < n; ++mask)
      if (mask & bit) values[mask] -= values[mask ^ bit];
}

LatticeVector zeta_transform(const LatticeVector& f) {
  check_lattice(f);
  LatticeVector g = f;
  zeta_transform_in_place(g.values);
  return g;
}

LatticeVector mobius_transform(const LatticeVector& g) {
  check_lattice(g);
  LatticeVector f = g;
  mobius_transform_in_place(f.values);
  return f;
}

namespace {

// Kronecker doubling: node i becomes bit (i-1), so each new factor lands on
// the high bit of the grown matrix.
std::vector<double> kronecker_power(int p, double upper_right) {
  if (p > kMaxDenseNodes)
    throw ValidationError("dense transform matrices are capped at p=" +
                          std::to_string(kMaxDenseNodes) + ", got " + std::to_string(p));
  (void)subset_count(p);
  std::vector<double> m{1.0};
  std::size_t dim = 1;
  for (int node = 0; node < p; ++node) {
    std::vector<double> next(4 * dim * dim, 0.0);
    const std::size_t dim2 = 2 * dim;
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        const double v = m[r * dim + c];
        next[r * dim2 + c] = v;
        next[r * dim2 + (c + dim)] = upper_right * v;
        next[(r + dim) * dim2 + (c + dim)] = v;
      }
    }
    dim = dim2;
    m = std::move(next);
  }
  return m;
}

}  // namespace

std::vector<double> dense_zeta_matrix(int p) { return kronecker_power(p, 1.0); }

std::vector<double> dense_mobius_matrix(int p) { return kronecker_power(p, -1.0); }

std::pair<std::vector<SubsetIndex>, std::vector<SubsetIndex>> subset_parity_split(SubsetIndex d) {
  std::vector<SubsetIndex> even;
  std::vector<SubsetIndex> odd;
  const int k = cardinality(d);
  SubsetIndex sub = 0;
  while (true) {  // submasks of d in ascending order
    if ((k - cardinality(sub)) % 2 == 0)
      even.push_back(sub);
    else
      odd.push_back(sub);
    if (sub == d) break;
    sub = (sub - d) & d;
  }
  return {std::move(even), std::move(odd)};
}

}  // namespace mbv
