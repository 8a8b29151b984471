#pragma once

#include <Eigen/Dense>

#include "aftnet/types.hpp"

// Low-level numeric kernels behind the likelihood module. Each kernel exists
// twice: a plain-loop serial reference (namespace serial) and an OpenMP
// version (namespace parallel). The parallel versions use fixed block
// decompositions so their results are bitwise identical for any thread
// count, which keeps every downstream result reproducible under
// AFTNET_THREADS. Production code calls the parallel versions; the serial
// ones are kept as the reference for tests and the kernel benchmark.
namespace aftnet::kernels {

// Block length for deterministic reductions and row blocking.
inline constexpr Eigen::Index kBlock = 1024;

// Any standardized residual above this makes exp(e) overflow-prone; the
// evaluation is then flagged as diverged and reported as +infinity upstream.
inline constexpr double kExpOverflow = 700.0;

namespace serial {

// eta = X * beta
void linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      Eigen::VectorXd& eta);

// e_i = (y_i - eta_i)/sigma, w_i = exp(e_i). Returns false when some
// e_i > kExpOverflow (w is then unusable).
bool gumbel_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                    double sigma, Eigen::VectorXd& e, Eigen::VectorXd& w);

// g_j = sum_i c_i X_ij
void design_transpose_dot(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                          Eigen::VectorXd& g);

// sum_i [ delta_i * (-log(sigma) + e_i) - w_i ]
double loglik_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                  const Eigen::VectorXd& w, double sigma);

// sum_i [ delta_i * (-1 - e_i) + w_i * e_i ]
double sigma_score_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                       const Eigen::VectorXd& w);

// sum_i [ e_i^2 * w_i + delta_i ]
double sigma_curvature_sum(const Eigen::VectorXd& delta,
                           const Eigen::VectorXd& e, const Eigen::VectorXd& w);

// B = X^T diag(w) X (symmetric p x p)
void weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                   Eigen::MatrixXd& B);

}  // namespace serial

namespace parallel {

void linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      Eigen::VectorXd& eta);
bool gumbel_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                    double sigma, Eigen::VectorXd& e, Eigen::VectorXd& w);
void design_transpose_dot(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                          Eigen::VectorXd& g);
double loglik_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                  const Eigen::VectorXd& w, double sigma);
double sigma_score_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                       const Eigen::VectorXd& w);
double sigma_curvature_sum(const Eigen::VectorXd& delta,
                           const Eigen::VectorXd& e, const Eigen::VectorXd& w);
void weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                   Eigen::MatrixXd& B);

}  // namespace parallel

}  // namespace aftnet::kernels
