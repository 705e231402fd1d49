#include "mbv/logistic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mbv/errors.hpp"

namespace mbv {

namespace {

double log1pexp(double s) {
  if (s > 0.0) return s + std::log1p(std::exp(-s));
  return std::log1p(std::exp(s));
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void check_problem(const NodeRegressionProblem& problem) {
  if (problem.p < 2) throw ValidationError("node regression needs at least 2 nodes");
  if (problem.response_node < 1 || problem.response_node > problem.p)
    throw ValidationError("response node out of range");
  if (problem.design.size() != problem.response.size() || problem.response.empty())
    throw ValidationError("design and response must be non-empty and equally long");
  if (problem.lambda < 0.0) throw ValidationError("penalty weight must be non-negative");
  const std::uint32_t limit = std::uint32_t{1} << (problem.p - 1);
  for (std::uint32_t mask : problem.design)
    if (mask >= limit) throw ValidationError("design mask out of range");
  for (std::uint8_t y : problem.response)
    if (y > 1) throw ValidationError("response values must be 0 or 1");
}

struct SmoothEval {
  double value = 0.0;            // mean negative conditional log-likelihood
  double grad_intercept = 0.0;
  std::vector<double> grad;      // per covariate
};

double smooth_value(const NodeRegressionProblem& pr, double intercept,
                    const std::vector<double>& coef) {
  double acc = 0.0;
  for (std::size_t k = 0; k < pr.design.size(); ++k) {
    double s = intercept;
    std::uint32_t mask = pr.design[k];
    while (mask != 0) {
      const int bit = std::countr_zero(mask);
      s += coef[static_cast<std::size_t>(bit)];
      mask &= mask - 1;
    }
    acc += log1pexp(s) - (pr.response[k] ? s : 0.0);
  }
  return acc / static_cast<double>(pr.design.size());
}

SmoothEval smooth_eval(const NodeRegressionProblem& pr, double intercept,
                       const std::vector<double>& coef) {
  const int q = pr.p - 1;
  SmoothEval out;
  out.grad.assign(static_cast<std::size_t>(q), 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < pr.design.size(); ++k) {
    double s = intercept;
    std::uint32_t mask = pr.design[k];
    while (mask != 0) {
      const int bit = std::countr_zero(mask);
      s += coef[static_cast<std::size_t>(bit)];
      mask &= mask - 1;
    }
    acc += log1pexp(s) - (pr.response[k] ? s : 0.0);
    const double residual = sigmoid(s) - static_cast<double>(pr.response[k]);
    out.grad_intercept += residual;
    mask = pr.design[k];
    while (mask != 0) {
      const int bit = std::countr_zero(mask);
      out.grad[static_cast<std::size_t>(bit)] += residual;
      mask &= mask - 1;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(pr.design.size());
  out.value = acc * inv_n;
  out.grad_intercept *= inv_n;
  for (double& g : out.grad) g *= inv_n;
  return out;
}

double l1_norm(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += std::abs(x);
  return acc;
}

}  // namespace

NodeRegressionProblem NodeRegressionProblem::from_sample(const SampleMatrix& data, int j,
                                                         double lambda) {
  if (j < 1 || j > data.p) throw ValidationError("response node out of range");
  NodeRegressionProblem pr;
  pr.response_node = j;
  pr.p = data.p;
  pr.lambda = lambda;
  pr.design.reserve(data.rows.size());
  pr.response.reserve(data.rows.size());
  const std::uint32_t j_bit = std::uint32_t{1} << (j - 1);
  const std::uint32_t low = j_bit - 1;
  for (std::uint32_t row : data.rows) {
    // Drop bit j-1 and close the gap so covariate k is bit k.
    const std::uint32_t packed = (row & low) | ((row >> 1) & ~low);
    pr.design.push_back(packed);
    pr.response.push_back((row & j_bit) ? 1 : 0);
  }
  return pr;
}

std::vector<int> NodeRegressionProblem::covariate_nodes() const {
  std::vector<int> nodes;
  nodes.reserve(static_cast<std::size_t>(p - 1));
  for (int i = 1; i <= p; ++i)
    if (i != response_node) nodes.push_back(i);
  return nodes;
}

NodeSolution solve_node(const NodeRegressionProblem& problem, const SolverConfig& cfg,
                        const NodeSolution* warm_start) {
  check_problem(problem);
  if (cfg.max_iterations < 1 || cfg.tolerance <= 0.0 || cfg.initial_step <= 0.0 ||
      cfg.backtrack <= 0.0 || cfg.backtrack >= 1.0)
    throw ValidationError("invalid solver configuration");

  const int q = problem.p - 1;
  NodeSolution sol;
  sol.coefficients.assign(static_cast<std::size_t>(q), 0.0);
  if (warm_start != nullptr) {
    if (warm_start->coefficients.size() != static_cast<std::size_t>(q))
      throw ValidationError("warm start has the wrong coefficient count");
    sol = *warm_start;
    sol.trace.clear();
  }

  double step = cfg.initial_step;
  SmoothEval eval = smooth_eval(problem, sol.intercept, sol.coefficients);
  double objective = eval.value + problem.lambda * l1_norm(sol.coefficients);
  if (cfg.record_trace) sol.trace.push_back(objective);

  std::vector<double> cand(static_cast<std::size_t>(q), 0.0);
  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    double cand_intercept = 0.0;
    double cand_smooth = 0.0;
    // Backtrack until the quadratic upper bound at this step size holds.
    while (true) {
      cand_intercept = sol.intercept - step * eval.grad_intercept;
      for (int i = 0; i < q; ++i)
        cand[static_cast<std::size_t>(i)] =
            soft_threshold(sol.coefficients[static_cast<std::size_t>(i)] -
                               step * eval.grad[static_cast<std::size_t>(i)],
                           step * problem.lambda);
      cand_smooth = smooth_value(problem, cand_intercept, cand);
      double linear = eval.grad_intercept * (cand_intercept - sol.intercept);
      double sq = (cand_intercept - sol.intercept) * (cand_intercept - sol.intercept);
      for (int i = 0; i < q; ++i) {
        const double d = cand[static_cast<std::size_t>(i)] -
                         sol.coefficients[static_cast<std::size_t>(i)];
        linear += eval.grad[static_cast<std::size_t>(i)] * d;
        sq += d * d;
      }
      if (cand_smooth <= eval.value + linear + sq / (2.0 * step) + 1e-12) break;
      step *= cfg.backtrack;
      if (step < 1e-16)
        throw NumericError("line search failed: step size underflowed");
    }
    const double cand_objective = cand_smooth + problem.lambda * l1_norm(cand);
    const double decrease = objective - cand_objective;
    sol.intercept = cand_intercept;
    sol.coefficients = cand;
    objective = cand_objective;
    sol.iterations = iter;
    if (cfg.record_trace) sol.trace.push_back(objective);
    if (decrease < cfg.tolerance) {
      sol.objective = objective;
      return sol;
    }
    eval = smooth_eval(problem, sol.intercept, sol.coefficients);
    step *= cfg.step_growth;
  }

  std::vector<double> last;
  last.reserve(sol.coefficients.size() + 1);
  last.push_back(sol.intercept);
  last.insert(last.end(), sol.coefficients.begin(), sol.coefficients.end());
  throw ConvergenceError("node " + std::to_string(problem.response_node) +
                             " did not converge in " + std::to_string(cfg.max_iterations) +
                             " iterations",
                         std::move(last), objective);
}

double mean_nll(const NodeRegressionProblem& problem, const NodeSolution& sol) {
  check_problem(problem);
  if (sol.coefficients.size() != static_cast<std::size_t>(problem.p - 1))
    throw ValidationError("solution has the wrong coefficient count");
  return smooth_value(problem, sol.intercept, sol.coefficients);
}

GraphEstimate symmetrize(const std::vector<std::vector<double>>& raw, SymmetrizationRule rule) {
  const int p = static_cast<int>(raw.size());
  if (p < 2) throw ValidationError("coefficient matrix must be at least 2x2");
  for (const auto& row : raw)
    if (static_cast<int>(row.size()) != p)
      throw ValidationError("coefficient matrix must be square");
  GraphEstimate g(p);
  for (int i = 1; i <= p; ++i) {
    for (int j = i + 1; j <= p; ++j) {
      const double from_i = raw[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
      const double from_j = raw[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)];
      double shared;
      if (rule == SymmetrizationRule::min_magnitude)
        shared = std::abs(from_i) < std::abs(from_j) ? from_i : from_j;
      else
        shared = std::abs(from_i) > std::abs(from_j) ? from_i : from_j;
      if (shared != 0.0) g.set_edge(i, j, shared);
    }
  }
  return g;
}

LambdaSelection cross_validate_lambda(const SampleMatrix& data, int j,
                                      const std::vector<double>& grid, int folds,
                                      std::uint64_t seed, const SolverConfig& cfg) {
  if (grid.empty()) throw ValidationError("lambda grid must be non-empty");
  for (double l : grid)
    if (!(l >= 0.0)) throw ValidationError("lambda grid values must be non-negative");
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (data.n() < folds)
    throw ValidationError("cross-validation needs n >= folds, got n=" +
                          std::to_string(data.n()));
  if (j < 1 || j > data.p) throw ValidationError("response node out of range");

  LambdaSelection sel;
  sel.mean_nll.assign(grid.size(), 0.0);

  const std::uint32_t j_bit = std::uint32_t{1} << (j - 1);
  std::vector<std::size_t> ones;
  std::vector<std::size_t> zeros;
  for (std::size_t k = 0; k < data.rows.size(); ++k)
    ((data.rows[k] & j_bit) ? ones : zeros).push_back(k);
  if (ones.empty() || zeros.empty()) {
    sel.degenerate_response = true;
    sel.lambda = *std::max_element(grid.begin(), grid.end());
    return sel;
  }

  // Stratified fold assignment: shuffle each class, deal round-robin.
  std::mt19937_64 rng(seed);
  std::vector<int> fold_of(data.rows.size(), 0);
  for (auto* cls : {&zeros, &ones}) {
    auto& idx = *cls;
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      const std::size_t pick = k + next_below(rng, idx.size() - k);
      std::swap(idx[k], idx[pick]);
    }
    for (std::size_t k = 0; k < idx.size(); ++k)
      fold_of[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }

  // Descending path with warm starts; indices map back to the given grid.
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&grid](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

  for (int f = 0; f < folds; ++f) {
    SampleMatrix train;
    SampleMatrix held;
    train.p = held.p = data.p;
    for (std::size_t k = 0; k < data.rows.size(); ++k)
      (fold_of[k] == f ? held : train).rows.push_back(data.rows[k]);
    if (train.rows.empty() || held.rows.empty()) continue;
    const NodeRegressionProblem held_problem = NodeRegressionProblem::from_sample(held, j, 0.0);
    NodeSolution warm;
    warm.coefficients.assign(static_cast<std::size_t>(data.p - 1), 0.0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      NodeRegressionProblem pr =
          NodeRegressionProblem::from_sample(train, j, grid[order[pos]]);
      warm = solve_node(pr, cfg, pos == 0 ? nullptr : &warm);
      sel.mean_nll[order[pos]] += mean_nll(held_problem, warm);
    }
  }
  for (double& v : sel.mean_nll) v /= static_cast<double>(folds);

  // Minimum held-out loss; ties go to the larger (sparser) lambda.
  std::size_t best = order[0];
  for (std::size_t pos = 1; pos < order.size(); ++pos) {
    const std::size_t cand = order[pos];
    if (sel.mean_nll[cand] < sel.mean_nll[best]) best = cand;
  }
  sel.lambda = grid[best];
  return sel;
}

std::vector<double> auto_lambda_grid(const SampleMatrix& data, int j, int size,
                                     double lambda_min) {
  if (size < 1) throw ValidationError("grid size must be positive");
  if (lambda_min <= 0.0) throw ValidationError("grid lower endpoint must be positive");
  const NodeRegressionProblem pr = NodeRegressionProblem::from_sample(data, j, 0.0);
  const double n = static_cast<double>(pr.n());
  double ybar = 0.0;
  for (std::uint8_t y : pr.response) ybar += y;
  ybar /= n;
  // Gradient magnitude at the intercept-only fit; the largest entry is the
  // smallest lambda with an all-zero solution.
  std::vector<double> grad(static_cast<std::size_t>(pr.p - 1), 0.0);
  for (std::size_t k = 0; k < pr.design.size(); ++k) {
    const double residual = ybar - static_cast<double>(pr.response[k]);
    std::uint32_t mask = pr.design[k];
    while (mask != 0) {
      const int bit = std::countr_zero(mask);
      grad[static_cast<std::size_t>(bit)] += residual;
      mask &= mask - 1;
    }
  }
  double lambda_max = 0.0;
  for (double g : grad) lambda_max = std::max(lambda_max, std::abs(g) / n);
  if (lambda_max <= lambda_min || size == 1) return {std::max(lambda_min, lambda_max)};
  std::vector<double> grid(static_cast<std::size_t>(size));
  const double lo = std::log(lambda_min);
  const double hi = std::log(lambda_max);
  for (int t = 0; t < size; ++t)
    grid[static_cast<std::size_t>(t)] =
        std::exp(lo + (hi - lo) * static_cast<double>(t) / static_cast<double>(size - 1));
  return grid;
}

LnmFit fit_lnm(const SampleMatrix& data, const std::vector<double>& grid, int folds,
               SymmetrizationRule rule, std::uint64_t seed, const SolverConfig& cfg) {
  if (data.p < 2) throw ValidationError("graph estimation needs at least 2 nodes");
  LnmFit fit;
  fit.raw.assign(static_cast<std::size_t>(data.p),
                 std::vector<double>(static_cast<std::size_t>(data.p), 0.0));
  fit.intercepts.assign(static_cast<std::size_t>(data.p), 0.0);
  fit.lambdas.assign(static_cast<std::size_t>(data.p), 0.0);
  for (int j = 1; j <= data.p; ++j) {
    const std::vector<double> node_grid =
        grid.empty() ? auto_lambda_grid(data, j) : grid;
    const LambdaSelection sel = cross_validate_lambda(
        data, j, node_grid, folds, child_seed(seed, static_cast<std::uint64_t>(j)), cfg);
    const NodeRegressionProblem pr = NodeRegressionProblem::from_sample(data, j, sel.lambda);
    const NodeSolution sol = solve_node(pr, cfg);
    fit.lambdas[static_cast<std::size_t>(j - 1)] = sel.lambda;
    fit.intercepts[static_cast<std::size_t>(j - 1)] = sol.intercept;
    const std::vector<int> nodes = pr.covariate_nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k)
      fit.raw[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(nodes[k] - 1)] =
          sol.coefficients[k];
  }
  fit.graph = symmetrize(fit.raw, rule);
  return fit;
}

ThetaVector lnm_theta(const LnmFit& fit) {
  const int p = static_cast<int>(fit.intercepts.size());
  ThetaVector th{LatticeVector(p)};
  for (int i = 1; i <= p; ++i) th[make_subset({i})] = fit.intercepts[static_cast<std::size_t>(i - 1)];
  for (const auto& [pair, w] : fit.graph.edges) th[make_subset({pair.first, pair.second})] = w;
  normalize(th);
  return th;
}

}  // namespace mbv
