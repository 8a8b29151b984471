#include "aftnet/kernels.hpp"

#include <cmath>

// Plain-loop reference kernels. Accumulation is the naive per-subject order;
// tests compare these against the blocked parallel versions.
namespace aftnet::kernels::serial {

void linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      Eigen::VectorXd& eta) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  eta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) acc += X(i, j) * beta[j];
    eta[i] = acc;
  }
}

bool gumbel_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                    double sigma, Eigen::VectorXd& e, Eigen::VectorXd& w) {
  const Eigen::Index n = y.size();
  e.resize(n);
  w.resize(n);
  bool ok = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    e[i] = (y[i] - eta[i]) / sigma;
    if (e[i] > kExpOverflow || std::isnan(e[i])) ok = false;
    w[i] = std::exp(e[i]);
  }
  return ok;
}

void design_transpose_dot(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                          Eigen::VectorXd& g) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  g.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += c[i] * X(i, j);
    g[j] = acc;
  }
}

double loglik_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                  const Eigen::VectorXd& w, double sigma) {
  const double log_sigma = std::log(sigma);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    acc += delta[i] * (-log_sigma + e[i]) - w[i];
  return acc;
}

double sigma_score_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                       const Eigen::VectorXd& w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    acc += delta[i] * (-1.0 - e[i]) + w[i] * e[i];
  return acc;
}

double sigma_curvature_sum(const Eigen::VectorXd& delta,
                           const Eigen::VectorXd& e, const Eigen::VectorXd& w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    acc += e[i] * e[i] * w[i] + delta[i];
  return acc;
}

void weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                   Eigen::MatrixXd& B) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  B.resize(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = j; k < p; ++k) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) acc += X(i, j) * X(i, k) * w[i];
      B(j, k) = acc;
      B(k, j) = acc;
    }
  }
}

}  // namespace aftnet::kernels::serial
