#pragma once

#include <cstdint>
#include <vector>

#include "mbv/model.hpp"
#include "mbv/sampler.hpp"

namespace mbv {

// One node's regression: the node's column is the response, the other p-1
// columns are the covariates. Covariate k corresponds to covariate_nodes()[k]
// and is bit k of each design mask.
struct NodeRegressionProblem {
  int response_node = 1;  // 1-based node j
  int p = 0;
  std::vector<std::uint32_t> design;   // n masks over the p-1 covariates
  std::vector<std::uint8_t> response;  // n values in {0,1}
  double lambda = 0.0;

  static NodeRegressionProblem from_sample(const SampleMatrix& data, int j, double lambda);
  std::vector<int> covariate_nodes() const;
  int n() const { return static_cast<int>(response.size()); }
};

struct SolverConfig {
  int max_iterations = 20000;
  double tolerance = 1e-10;  // stop when the objective decrease falls below this
  double initial_step = 1.0;
  double backtrack = 0.5;    // step shrink factor in the line search
  double step_growth = 1.1;  // step growth after an accepted iterate
  bool record_trace = false;
};

struct NodeSolution {
  double intercept = 0.0;
  std::vector<double> coefficients;  // p-1 entries in covariate order
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> trace;  // objective per iteration when recorded
};

// Proximal gradient with backtracking on the mean negative conditional
// log-likelihood plus lambda * l1 of the coefficients; the intercept is
// never penalized. Throws ConvergenceError when max_iterations is exhausted.
NodeSolution solve_node(const NodeRegressionProblem& problem, const SolverConfig& cfg = {},
                        const NodeSolution* warm_start = nullptr);

// Mean negative conditional log-likelihood of a solution on (design,
// response) pairs; used for held-out scoring.
double mean_nll(const NodeRegressionProblem& problem, const NodeSolution& sol);

enum class SymmetrizationRule { min_magnitude, max_magnitude };

// Collapses the two directional estimates of every pair into one shared
// value: min_magnitude keeps the smaller-|.| entry (a zero on either side
// kills the edge), max_magnitude keeps the larger one.
GraphEstimate symmetrize(const std::vector<std::vector<double>>& raw, SymmetrizationRule rule);

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> mean_nll;  // one entry per grid value, grid order
  bool degenerate_response = false;
};

// Seeded, response-stratified k-fold selection of the grid value minimizing
// mean held-out negative log-likelihood; ties go to the larger lambda. A
// degenerate response (all 0 or all 1) returns the largest grid value.
LambdaSelection cross_validate_lambda(const SampleMatrix& data, int j,
                                      const std::vector<double>& grid, int folds,
                                      std::uint64_t seed, const SolverConfig& cfg = {});

// size log-spaced values from lambda_min up to the smallest lambda that
// zeroes every coefficient at the intercept-only fit.
std::vector<double> auto_lambda_grid(const SampleMatrix& data, int j, int size = 20,
                                     double lambda_min = 0.001);

struct LnmFit {
  GraphEstimate graph;
  std::vector<std::vector<double>> raw;  // p x p, zero diagonal; row = response node
  std::vector<double> intercepts;        // one per node
  std::vector<double> lambdas;           // selected per node
};

// Cross-validated per-node l1 logistic fits followed by symmetrization.
// Node j uses child stream j of the seed for its fold assignment.
LnmFit fit_lnm(const SampleMatrix& data, const std::vector<double>& grid, int folds,
               SymmetrizationRule rule, std::uint64_t seed, const SolverConfig& cfg = {});

// Pairwise ThetaVector assembled from a fit: intercepts as first-order
// terms, symmetrized weights as pairwise terms, normalized through the
// empty-set entry.
ThetaVector lnm_theta(const LnmFit& fit);

}  // namespace mbv
