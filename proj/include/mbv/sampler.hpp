#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mbv/model.hpp"

namespace mbv {

// n binary observations of p nodes. Each row is stored as a subset mask:
// outcome D corresponds to the row with ones exactly on D.
struct SampleMatrix {
  int p = 0;
  std::vector<std::uint32_t> rows;

  int n() const { return static_cast<int>(rows.size()); }
  bool value(int row, int node) const {  // node is 1-based
    return (rows[static_cast<std::size_t>(row)] >> (node - 1)) & 1U;
  }
};

enum class ModelPattern { pairwise_only, general };

// Recipe for a random sparse model: nonzero_pairs pairwise terms drawn
// uniformly among the p(p-1)/2 pairs, each set to +-coupling with equal
// probability.
struct ModelSpec {
  int p = 0;
  ModelPattern pattern = ModelPattern::pairwise_only;
  int nonzero_pairs = 0;
  double coupling = 0.5;
  std::uint64_t seed = 0;
  bool random_singletons = false;  // default: first-order terms stay zero
};

// Deterministic child stream for one replicate (or any substream) of a
// master seed; splitmix-style mixing so nearby streams are uncorrelated.
std::uint64_t child_seed(std::uint64_t master, std::uint64_t stream);

// Uniform double in [0,1) from the top 53 bits of the generator; identical
// across platforms for a given seed.
double next_uniform(std::mt19937_64& rng);

// Draw in [0, bound) without modulo bias.
std::uint64_t next_below(std::mt19937_64& rng, std::uint64_t bound);

// Exact inverse-CDF sampling over the 2^p outcome probabilities.
SampleMatrix sample(const ProbabilityVector& model, int n, std::uint64_t seed);
SampleMatrix sample(const ThetaVector& model, int n, std::uint64_t seed);

// Random pairwise model per spec, normalized through the empty-set entry.
ThetaVector random_pairwise_model(const ModelSpec& spec);

}  // namespace mbv
