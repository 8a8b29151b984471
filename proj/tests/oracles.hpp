#pragma once

// Independent oracles used by the unit and acceptance suites. These stay
// deliberately naive (scalar loops, dense algebra, brute-force enumeration)
// and never call the implementation paths they are used to check.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "aftnet/rng.hpp"
#include "aftnet/types.hpp"

namespace oracle {

// nll by a plain per-subject scalar loop.
inline double nll_scalar(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& delta, const Eigen::VectorXd& beta,
                         double sigma) {
  const Eigen::Index n = X.rows();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) eta += X(i, j) * beta[j];
    const double e = (y[i] - eta) / sigma;
    ll += delta[i] * (-std::log(sigma) + e) - std::exp(e);
  }
  return -ll / double(n);
}

// central finite differences of a scalar function
template <typename F>
Eigen::VectorXd central_diff(const F& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd hi = x, lo = x;
    hi[k] += h;
    lo[k] -= h;
    g[k] = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

// damped Newton for the unpenalized beta-MLE at fixed sigma
inline Eigen::VectorXd newton_beta_mle(const Eigen::MatrixXd& X,
                                       const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& delta, double sigma,
                                       double tol = 1e-12, int max_iter = 200) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);

  auto value = [&](const Eigen::VectorXd& b) { return nll_scalar(X, y, delta, b, sigma); };
  auto grad_hess = [&](const Eigen::VectorXd& b, Eigen::VectorXd& g,
                       Eigen::MatrixXd& H) {
    g.setZero(p);
    H.setZero(p, p);
    for (Eigen::Index i = 0; i < n; ++i) {
      double eta = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) eta += X(i, j) * b[j];
      const double e = (y[i] - eta) / sigma;
      const double w = std::exp(e);
      for (Eigen::Index j = 0; j < p; ++j) {
        g[j] += -(w - delta[i]) * X(i, j) / (sigma * double(n));
        for (Eigen::Index k = 0; k < p; ++k)
          H(j, k) += X(i, j) * X(i, k) * w / (sigma * sigma * double(n));
      }
    }
  };

  Eigen::VectorXd g(p);
  Eigen::MatrixXd H(p, p);
  double f = value(beta);
  for (int it = 0; it < max_iter; ++it) {
    grad_hess(beta, g, H);
    if (g.cwiseAbs().maxCoeff() <= tol) break;
    const Eigen::VectorXd step = -H.ldlt().solve(g);
    double t = 1.0;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd trial = beta + t * step;
      const double ft = value(trial);
      if (std::isfinite(ft) && ft <= f) {
        beta = trial;
        f = ft;
        break;
      }
      t *= 0.5;
    }
  }
  return beta;
}

// brute-force Harrell C over all ordered pairs
inline double c_index_brute(const Eigen::VectorXd& risk, const Eigen::VectorXd& t,
                            const Eigen::VectorXd& d, bool* has_pairs = nullptr) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      if (i == j) continue;
      if (d[i] == 1.0 && t[i] < t[j]) {
        den += 1.0;
        if (risk[i] > risk[j]) num += 1.0;
        if (risk[i] == risk[j]) num += 0.5;
      }
    }
  }
  if (has_pairs != nullptr) *has_pairs = den > 0.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

// beta^T L beta recomputed as the sum of squared differences over edges of a
// binary adjacency
inline double edge_loop_quadratic(const std::vector<std::pair<int, int>>& edges,
                                  const Eigen::VectorXd& beta) {
  double q = 0.0;
  for (const auto& [a, b] : edges) {
    const double d = beta[a] - beta[b];
    q += d * d;
  }
  return q;
}

// random censored dataset with bounded residuals
inline void random_instance(aftnet::SplitRng& rng, Eigen::Index n, Eigen::Index p,
                            Eigen::MatrixXd& X, Eigen::VectorXd& y,
                            Eigen::VectorXd& delta, Eigen::VectorXd& beta,
                            double& sigma) {
  X.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.normal();
  beta.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) beta[j] = rng.uniform(-0.6, 0.6);
  sigma = rng.uniform(0.6, 1.8);
  y.resize(n);
  delta.resize(n);
  bool any_event = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    double eta = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) eta += X(i, j) * beta[j];
    // keep |e_i| <= 3 so finite differences stay well conditioned
    y[i] = eta + sigma * rng.uniform(-3.0, 3.0);
    delta[i] = rng.uniform01() < 0.7 ? 1.0 : 0.0;
    any_event = any_event || delta[i] == 1.0;
  }
  if (!any_event) delta[0] = 1.0;
}

}  // namespace oracle
