#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace mbv {

// Subsets D of V = {1,...,p} are encoded as bit masks: node i <-> bit (i-1).
// Mask 0 is the empty set, mask 2^p - 1 is V itself. All modules share this
// one convention.
using SubsetIndex = std::uint32_t;

inline constexpr int kMaxNodes = 25;       // 2^25 doubles ~ 268 MB
inline constexpr int kMaxDenseNodes = 12;  // dense 2^p x 2^p matrices are oracle-scale only

// 2^p. Throws ValidationError unless 1 <= p <= kMaxNodes.
std::size_t subset_count(int p);

SubsetIndex full_set(int p);
int cardinality(SubsetIndex d);
bool contains_node(SubsetIndex d, int node);  // node is 1-based

SubsetIndex make_subset(std::initializer_list<int> nodes);
SubsetIndex make_subset(const std::vector<int>& nodes);
std::vector<int> subset_nodes(SubsetIndex d);  // sorted, 1-based

// A real-valued function on the subset lattice of V = {1,...,p}.
struct LatticeVector {
  int p = 0;
  std::vector<double> values;  // 2^p entries indexed by SubsetIndex

  LatticeVector() = default;
  explicit LatticeVector(int p_, double fill = 0.0);

  double& operator[](SubsetIndex d) { return values[d]; }
  double operator[](SubsetIndex d) const { return values[d]; }
  std::size_t size() const { return values.size(); }
};

// Throws ValidationError unless v has exactly 2^p finite entries.
void check_lattice(const LatticeVector& v);

// Compensated (Neumaier) summation; error stays O(eps) regardless of length.
double stable_sum(std::span<const double> xs);

// g_C = sum_{R subset of C} f_R, i.e. multiplication by the transposed zeta
// matrix. O(p 2^p) via the in-place subset-sum recurrence.
LatticeVector zeta_transform(const LatticeVector& f);

// f_D = sum_{D' subset of D} (-1)^{|D \ D'|} g_{D'}; exact inverse of
// zeta_transform.
LatticeVector mobius_transform(const LatticeVector& g);

// In-place variants for hot paths. The span length must be a power of two;
// no finiteness checks are performed.
void zeta_transform_in_place(std::span<double> values);
void mobius_transform_in_place(std::span<double> values);

// Dense 2^p x 2^p transform matrices in mask order, built as Kronecker
// powers of the single-node 2x2 factors. Row r, column c lives at
// m[r * 2^p + c]. Oracle scale only: rejects p > kMaxDenseNodes.
std::vector<double> dense_zeta_matrix(int p);
std::vector<double> dense_mobius_matrix(int p);

// Partitions the subsets D' of d by the parity of |d \ D'|: first the even
// list, then the odd one. Both are sorted ascending and have 2^(|d|-1)
// entries when d is non-empty.
std::pair<std::vector<SubsetIndex>, std::vector<SubsetIndex>> subset_parity_split(SubsetIndex d);

}  // namespace mbv
