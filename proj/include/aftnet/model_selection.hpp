#pragma once

#include <cstdint>
#include <vector>

#include "aftnet/solver.hpp"
#include "aftnet/types.hpp"

// Lambda grid construction and K-fold cross-validated linear predictors
// (CV-PL): held-out standardized residuals are pooled across folds and
// plugged into the Weibull log-likelihood to score each lambda.
namespace aftnet {

class infeasible_fold : public error {
 public:
  using error::error;
};

struct LambdaGrid {
  std::vector<double> values;  // strictly decreasing, values[0] = lambda_max
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int n_lambda = 0;
  double min_ratio = 0.0;

  // Wraps an explicit strictly-decreasing list.
  static LambdaGrid from_values(std::vector<double> vals);
};

// lambda_max = ||beta part of grad nll(0, sigma_hat)||_inf / alpha, then
// n_lambda log10-equispaced points down to min_ratio * lambda_max.
// alpha = 0 has no finite lambda_max and is rejected; a zero gradient at
// the origin is rejected as a null problem.
LambdaGrid make_lambda_grid(const SurvivalDataset& data, double alpha,
                            double sigma_hat, int n_lambda = 50,
                            double min_ratio = 0.01,
                            EvalBackend backend = EvalBackend::parallel);

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  bool stratify_events = true;  // proportional events per fold; plain shuffle if false
  SolverOptions solver;
};

struct CvReport {
  double lambda_opt = 0.0;
  int lambda_opt_index = -1;
  std::vector<double> cv_curve;      // CV(lambda), aligned with the grid
  std::vector<int> fold_assignment;  // length n, values in [0, K)
  std::uint64_t seed = 0;
};

// Seeded fold assignment; every index lands in exactly one fold and fold
// sizes differ by at most one. With stratification, events and censored
// subjects are dealt separately so each fold gets a proportional share.
std::vector<int> assign_folds(const Eigen::VectorXd& events, int folds,
                              std::uint64_t seed, bool stratify_events);

// K-fold CV over the grid; sigma_hat is used unchanged in every fold.
// Ties in the curve break toward the larger lambda.
CvReport cv_pl(const SurvivalDataset& data, const NetworkPrior& prior,
               double alpha, const LambdaGrid& grid, double sigma_hat,
               const CvOptions& opts);

}  // namespace aftnet
