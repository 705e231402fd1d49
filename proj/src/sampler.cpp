#include "mbv/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mbv/errors.hpp"

namespace mbv {

std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double next_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw ValidationError("bound must be positive");
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

SampleMatrix sample(const ProbabilityVector& model, int n, std::uint64_t seed) {
  model.validate();
  if (n < 1) throw ValidationError("sample size must be at least 1, got " + std::to_string(n));
  const std::size_t size = model.probs.size();
  std::vector<double> cum(size);
  double running = 0.0;
  for (SubsetIndex d = 0; d < size; ++d) {
    running += model[d];
    cum[d] = running;
  }
  cum.back() = 1.0;
  std::mt19937_64 rng(seed);
  SampleMatrix data;
  data.p = model.node_count();
  data.rows.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = next_uniform(rng);
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    data.rows[static_cast<std::size_t>(k)] =
        static_cast<std::uint32_t>(std::distance(cum.begin(), it));
  }
  return data;
}

SampleMatrix sample(const ThetaVector& model, int n, std::uint64_t seed) {
  return sample(probs_from_theta(model), n, seed);
}

ThetaVector random_pairwise_model(const ModelSpec& spec) {
  if (spec.pattern != ModelPattern::pairwise_only)
    throw ValidationError("random model generation supports the pairwise pattern only");
  (void)subset_count(spec.p);
  if (spec.p < 2) throw ValidationError("pairwise models need at least 2 nodes");
  const int pair_total = spec.p * (spec.p - 1) / 2;
  if (spec.nonzero_pairs < 0 || spec.nonzero_pairs > pair_total)
    throw ValidationError("nonzero_pairs " + std::to_string(spec.nonzero_pairs) +
                          " exceeds the " + std::to_string(pair_total) + " available pairs");
  if (!std::isfinite(spec.coupling)) throw ValidationError("coupling must be finite");

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(pair_total));
  for (int i = 1; i <= spec.p; ++i)
    for (int j = i + 1; j <= spec.p; ++j) pairs.emplace_back(i, j);

  std::mt19937_64 rng(spec.seed);
  // Partial Fisher-Yates: the first nonzero_pairs entries are a uniform draw
  // without replacement.
  for (int k = 0; k < spec.nonzero_pairs; ++k) {
    const auto pick = static_cast<std::size_t>(k) +
                      next_below(rng, static_cast<std::uint64_t>(pair_total - k));
    std::swap(pairs[static_cast<std::size_t>(k)], pairs[pick]);
  }
  std::vector<std::pair<int, int>> chosen(pairs.begin(),
                                          pairs.begin() + spec.nonzero_pairs);
  std::sort(chosen.begin(), chosen.end());

  ThetaVector th{LatticeVector(spec.p)};
  for (const auto& [i, j] : chosen) {
    const double sign = next_below(rng, 2) == 0 ? 1.0 : -1.0;
    th[make_subset({i, j})] = sign * spec.coupling;
  }
  if (spec.random_singletons) {
    for (int i = 1; i <= spec.p; ++i) {
      const double sign = next_below(rng, 2) == 0 ? 1.0 : -1.0;
      th[make_subset({i})] = sign * spec.coupling;
    }
  }
  normalize(th);
  return th;
}

}  // namespace mbv
