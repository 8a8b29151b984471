#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "aftnet/network.hpp"
#include "aftnet/types.hpp"

// Proximal gradient solver for
//   argmin_beta  nll(beta; sigma_hat) + lambda*alpha*||beta||_1
//                + lambda*(1-alpha)*beta^T L beta
// with Beck-style backtracking on the step parameter M: the smooth part is
// f = nll + quadratic penalty, the l1 part is handled by soft thresholding,
// and M only ever grows (within a fit and along a warm-started path).
namespace aftnet {

class step_collapse : public error {
 public:
  using error::error;
};

class non_finite_objective : public error {
 public:
  using error::error;
};

struct SolverOptions {
  int max_iter = 2000;
  double tol = 1e-6;                 // relative-change stop
  std::optional<double> m_init;      // default: spectral bound at (0, sigma_hat)
  double backtrack_factor = 2.0;     // > 1
  bool intercept = false;            // column 0 is an unpenalized constant
  bool penalize_intercept = false;   // only meaningful with intercept = true
  bool standardize = false;          // column mean 0 / sd 1 before fitting
  EvalBackend backend = EvalBackend::parallel;

  void validate() const;
};

struct FitResult {
  Eigen::VectorXd beta_hat;            // original scale
  double lambda = 0.0;
  double alpha = 0.5;
  double sigma_hat = 1.0;
  std::vector<double> objective_trace;  // full objective, non-increasing
  int iterations = 0;
  bool converged = false;
  double final_M = 0.0;
};

struct LambdaGrid;  // model_selection.hpp

struct SolutionPath {
  std::vector<FitResult> fits;  // one per lambda, decreasing lambda order
  std::vector<double> lambdas;
  double alpha = 0.5;
  double sigma_hat = 1.0;
};

// Componentwise soft threshold with parameter t >= 0.
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& u, double t);

// One penalized fit at fixed (lambda, alpha). The prior's dimension must
// equal the number of penalized columns (p, or p-1 with an intercept).
FitResult prox_grad_fit(const SurvivalDataset& data, const NetworkPrior& prior,
                        const PenaltyConfig& cfg, double sigma_hat,
                        const Eigen::VectorXd& beta_init,
                        const SolverOptions& opts);

// Warm-started path over a strictly decreasing lambda grid. M is carried
// from one lambda to the next.
SolutionPath fit_path(const SurvivalDataset& data, const NetworkPrior& prior,
                      double alpha, const std::vector<double>& lambda_grid,
                      double sigma_hat, const SolverOptions& opts);

}  // namespace aftnet
