#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "aftnet/rng.hpp"
#include "aftnet/types.hpp"

// Weibull AFT log-likelihood for censored data, exposed in the normalized
// convention nll(theta) = -(1/n) * loglik(theta). The observed information
// matrix keeps the raw-loglik convention I = -hessian(loglik); the two are
// related by hessian(nll) = I / n.
namespace aftnet {

// e_i = (y_i - x_i^T beta) / sigma
Eigen::VectorXd standardized_residuals(const ModelParams& params,
                                       const SurvivalDataset& data,
                                       EvalBackend backend = EvalBackend::parallel);

// -(1/n) sum_i [ delta_i(-log sigma + e_i) - exp(e_i) ].
// Returns +infinity (a "diverged evaluation" sentinel, never a throw) when
// some e_i overflows exp; solvers treat that as a line-search rejection.
double neg_log_likelihood(const ModelParams& params, const SurvivalDataset& data,
                          EvalBackend backend = EvalBackend::parallel);

// Gradient of neg_log_likelihood, length p+1. Components 0..p-1 are the
// beta partials, component p is the sigma partial. On a diverged evaluation
// every component is +infinity.
Eigen::VectorXd gradient(const ModelParams& params, const SurvivalDataset& data,
                         EvalBackend backend = EvalBackend::parallel);

// Observed information matrix of the raw log-likelihood, (p+1) x (p+1),
// symmetric by construction. On a diverged evaluation all entries are
// +infinity.
Eigen::MatrixXd observed_information(const ModelParams& params,
                                     const SurvivalDataset& data,
                                     EvalBackend backend = EvalBackend::parallel);

struct LipschitzBound {
  double value = 0.0;
  bool via_fallback = false;  // power iteration hit its cap; Frobenius bound
  int iterations = 0;
};

// Largest eigenvalue of the beta block of observed_information scaled by
// 1/n, i.e. of the beta-Hessian of neg_log_likelihood. Computed by power
// iteration on the implicit operator v -> X^T (w .* (X v)) / (n sigma^2);
// falls back to the Frobenius-norm upper bound when the iteration does not
// settle.
LipschitzBound lipschitz_bound(const ModelParams& params,
                               const SurvivalDataset& data,
                               EvalBackend backend = EvalBackend::parallel);

namespace detail {

// Workspace so the solver's hot loop does not reallocate.
struct NllWorkspace {
  Eigen::VectorXd eta, e, w, coef;
};

// Value of nll at (beta, sigma); when grad != nullptr also fills the
// beta-gradient (length p). Returns +infinity on overflow (grad untouched).
double nll_value_and_beta_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& delta,
                               const Eigen::VectorXd& beta, double sigma,
                               Eigen::VectorXd* grad, NllWorkspace& ws,
                               EvalBackend backend);

// Symmetric power iteration helper (shared with the network module's
// Laplacian bound). Returns the dominant eigenvalue of the operator
// v -> apply(v) on R^dim; apply must be symmetric PSD. The start vector is
// a fixed pseudo-random direction (a constant vector would sit exactly in a
// Laplacian's null space).
template <typename Apply>
LipschitzBound power_iteration(Eigen::Index dim, Apply&& apply, int max_iter,
                               double tol) {
  Eigen::VectorXd v(dim);
  {
    SplitRng start_rng(0x9d2c5680u);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = start_rng.normal();
    const double nrm = v.norm();
    if (nrm > 0) v /= nrm;
  }
  Eigen::VectorXd Av(dim);
  double lambda = 0.0;
  LipschitzBound out;
  for (int it = 0; it < max_iter; ++it) {
    apply(v, Av);
    const double norm = Av.norm();
    if (norm == 0.0) {  // operator annihilates v; eigenvalue 0
      out.value = 0.0;
      out.iterations = it + 1;
      return out;
    }
    const double next = v.dot(Av);
    v = Av / norm;
    out.iterations = it + 1;
    if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
      out.value = next;
      return out;
    }
    lambda = next;
  }
  out.value = lambda;
  out.via_fallback = true;
  return out;
}

}  // namespace detail

}  // namespace aftnet
