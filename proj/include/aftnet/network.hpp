#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>
#include <vector>

#include "aftnet/types.hpp"

// Graph prior and the double penalty  P(beta) = lambda * [ alpha*||beta||_1
// + (1-alpha) * beta^T L beta ]  with L = D - A the unnormalized Laplacian.
namespace aftnet {

using SpMat = Eigen::SparseMatrix<double>;

struct NetworkPrior {
  SpMat adjacency;   // p x p, symmetric, zero diagonal, nonnegative
  SpMat laplacian;   // D - A
  std::vector<std::string> node_names;  // empty or size p

  Eigen::Index dim() const { return adjacency.rows(); }
};

struct PenaltyConfig {
  double lambda = 0.0;
  double alpha = 0.5;

  void validate() const {
    if (!(lambda >= 0.0)) throw invalid_argument("penalty: lambda must be >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw invalid_argument("penalty: alpha must be in [0, 1]");
  }
};

// Validates symmetry / zero diagonal / nonnegativity and builds L = D - A.
// Degrees are accumulated in storage order so row sums of L cancel exactly.
NetworkPrior build_laplacian(const SpMat& adjacency);

// An all-zero prior of dimension p (empty graph), for penalty-free use.
NetworkPrior empty_prior(Eigen::Index p);

// lambda*alpha*||beta||_1 + lambda*(1-alpha)*beta^T L beta
double penalty_value(const Eigen::VectorXd& beta, const PenaltyConfig& cfg,
                     const NetworkPrior& prior);

// Gradient of the smooth (quadratic) part only: 2*lambda*(1-alpha)*L*beta.
Eigen::VectorXd smooth_penalty_gradient(const Eigen::VectorXd& beta,
                                        const PenaltyConfig& cfg,
                                        const NetworkPrior& prior);

// Largest eigenvalue of L via power iteration; falls back to the Gershgorin
// bound max_i(L_ii + sum_{j != i} |L_ij|) if the iteration does not settle.
double laplacian_max_eigenvalue(const NetworkPrior& prior);

}  // namespace aftnet
