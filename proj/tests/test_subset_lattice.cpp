#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <doctest.h>

#include "mbv/errors.hpp"
#include "mbv/subset_lattice.hpp"

using namespace mbv;

namespace {

// Dense matrix-vector oracle: out_c = sum_r m[r][c] * v_r (transposed apply,
// matching the transforms' definition).
std::vector<double> apply_transposed(const std::vector<double>& m, const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[c] += m[r * n + c] * v[r];
  return out;
}

// Mask order of the subsets as printed in cardinality-grouped order for p=3.
constexpr SubsetIndex kPrintedOrder[8] = {0, 1, 2, 4, 3, 5, 6, 7};

// 8x8 reference matrices in cardinality-grouped order
// (empty, {1}, {2}, {3}, {12}, {13}, {23}, {123}).
constexpr double kZeta3[8][8] = {
    {1, 1, 1, 1, 1, 1, 1, 1},
    {0, 1, 0, 0, 1, 1, 0, 1},
    {0, 0, 1, 0, 1, 0, 1, 1},
    {0, 0, 0, 1, 0, 1, 1, 1},
    {0, 0, 0, 0, 1, 0, 0, 1},
    {0, 0, 0, 0, 0, 1, 0, 1},
    {0, 0, 0, 0, 0, 0, 1, 1},
    {0, 0, 0, 0, 0, 0, 0, 1},
};
constexpr double kMobius3[8][8] = {
    {1, -1, -1, -1, 1, 1, 1, -1},
    {0, 1, 0, 0, -1, -1, 0, 1},
    {0, 0, 1, 0, -1, 0, -1, 1},
    {0, 0, 0, 1, 0, -1, -1, 1},
    {0, 0, 0, 0, 1, 0, 0, -1},
    {0, 0, 0, 0, 0, 1, 0, -1},
    {0, 0, 0, 0, 0, 0, 1, -1},
    {0, 0, 0, 0, 0, 0, 0, 1},
};

}  // namespace

TEST_CASE("subset helpers") {
  CHECK(subset_count(3) == 8);
  CHECK(full_set(3) == 7);
  CHECK(cardinality(0b1011) == 3);
  CHECK(make_subset({1, 3}) == 0b101);
  CHECK(contains_node(0b101, 3));
  CHECK_FALSE(contains_node(0b101, 2));
  CHECK(subset_nodes(0b110) == std::vector<int>{2, 3});
  CHECK_THROWS_AS(subset_count(0), ValidationError);
  CHECK_THROWS_AS(subset_count(kMaxNodes + 1), ValidationError);
}

TEST_CASE("zeta transform on indicator vectors") {
  LatticeVector empty_ind(2);
  empty_ind[0] = 1.0;
  const LatticeVector zi = zeta_transform(empty_ind);
  CHECK(zi.values == std::vector<double>{1, 1, 1, 1});

  LatticeVector one_ind(2);
  one_ind[1] = 1.0;  // indicator of {1}
  const LatticeVector zo = zeta_transform(one_ind);
  CHECK(zo.values == std::vector<double>{0, 1, 0, 1});
}

TEST_CASE("mobius transform inverts the all-ones vector") {
  LatticeVector g(2, 1.0);
  const LatticeVector f = mobius_transform(g);
  CHECK(f.values == std::vector<double>{1, 0, 0, 0});
}

TEST_CASE("round trip is the identity") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p = 1; p <= 10; ++p) {
    for (int trial = 0; trial < 100; ++trial) {
      LatticeVector f(p);
      for (double& x : f.values) x = u(rng);
      const LatticeVector back = mobius_transform(zeta_transform(f));
      double max_err = 0.0;
      for (SubsetIndex d = 0; d < f.size(); ++d)
        max_err = std::max(max_err, std::abs(back[d] - f[d]));
      CHECK(max_err < 1e-12);
    }
  }
}

TEST_CASE("fast transforms equal the dense oracle exactly on integer inputs") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> ints(-8, 8);
  for (int p = 1; p <= 8; ++p) {
    const std::vector<double> z = dense_zeta_matrix(p);
    const std::vector<double> m = dense_mobius_matrix(p);
    for (int trial = 0; trial < 5; ++trial) {
      LatticeVector f(p);
      for (double& x : f.values) x = static_cast<double>(ints(rng));
      CHECK(zeta_transform(f).values == apply_transposed(z, f.values));
      CHECK(mobius_transform(f).values == apply_transposed(m, f.values));
    }
  }
}

TEST_CASE("dense matrices match the single-node factors at p=1") {
  CHECK(dense_zeta_matrix(1) == std::vector<double>{1, 1, 0, 1});
  CHECK(dense_mobius_matrix(1) == std::vector<double>{1, -1, 0, 1});
}

TEST_CASE("dense matrices match the cardinality-ordered p=3 references") {
  const std::vector<double> z = dense_zeta_matrix(3);
  const std::vector<double> m = dense_mobius_matrix(3);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      const SubsetIndex r = kPrintedOrder[a];
      const SubsetIndex c = kPrintedOrder[b];
      CHECK(z[r * 8 + c] == kZeta3[a][b]);
      CHECK(m[r * 8 + c] == kMobius3[a][b]);
    }
  }
}

TEST_CASE("dense mobius times dense zeta is the identity") {
  for (int p = 1; p <= 8; ++p) {
    const std::vector<double> z = dense_zeta_matrix(p);
    const std::vector<double> m = dense_mobius_matrix(p);
    const std::size_t n = subset_count(p);
    bool ok = true;
    for (std::size_t r = 0; r < n && ok; ++r) {
      for (std::size_t c = 0; c < n && ok; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += m[r * n + k] * z[k * n + c];
        ok = acc == (r == c ? 1.0 : 0.0);
      }
    }
    CHECK(ok);
  }
}

TEST_CASE("dense matrices reject oracle-scale overflow") {
  CHECK_THROWS_AS(dense_zeta_matrix(kMaxDenseNodes + 1), ValidationError);
  CHECK_THROWS_AS(dense_mobius_matrix(kMaxDenseNodes + 1), ValidationError);
}

TEST_CASE("zeta output at the full set is the total sum") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int p : {2, 5, 9}) {
    LatticeVector f(p);
    for (double& x : f.values) x = u(rng);
    const LatticeVector g = zeta_transform(f);
    const double total = stable_sum(f.values);
    CHECK(g[full_set(p)] == doctest::Approx(total).epsilon(1e-12));
  }
}

TEST_CASE("in-place transforms match the allocating ones") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LatticeVector f(6);
  for (double& x : f.values) x = u(rng);
  std::vector<double> v = f.values;
  zeta_transform_in_place(v);
  CHECK(v == zeta_transform(f).values);
  std::vector<double> w = f.values;
  mobius_transform_in_place(w);
  CHECK(w == mobius_transform(f).values);
}

TEST_CASE("parity split on hand cases") {
  {
    const auto [even, odd] = subset_parity_split(make_subset({1, 2}));
    CHECK(even == std::vector<SubsetIndex>{0, 3});
    CHECK(odd == std::vector<SubsetIndex>{1, 2});
  }
  {
    const auto [even, odd] = subset_parity_split(make_subset({3}));
    CHECK(even == std::vector<SubsetIndex>{4});
    CHECK(odd == std::vector<SubsetIndex>{0});
  }
  {
    const auto [even, odd] = subset_parity_split(make_subset({1, 2, 3}));
    CHECK(even == std::vector<SubsetIndex>{1, 2, 4, 7});
    CHECK(odd == std::vector<SubsetIndex>{0, 3, 5, 6});
  }
}

TEST_CASE("parity split sizes and union") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 10;
    const auto d = static_cast<SubsetIndex>(rng() & full_set(p));
    const auto [even, odd] = subset_parity_split(d);
    const int k = cardinality(d);
    if (k >= 1) {
      CHECK(even.size() == (std::size_t{1} << (k - 1)));
      CHECK(odd.size() == (std::size_t{1} << (k - 1)));
    }
    std::set<SubsetIndex> all(even.begin(), even.end());
    all.insert(odd.begin(), odd.end());
    CHECK(all.size() == (std::size_t{1} << k));
    for (SubsetIndex s : all) CHECK((s & ~d) == 0);
  }
}
