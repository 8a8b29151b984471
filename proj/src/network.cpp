#include "aftnet/network.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "aftnet/likelihood.hpp"

namespace aftnet {

namespace {

void check_dim(const Eigen::VectorXd& beta, const NetworkPrior& prior) {
  if (beta.size() != prior.dim()) {
    throw dimension_error("beta has " + std::to_string(beta.size()) +
                          " entries but the network prior has dimension " +
                          std::to_string(prior.dim()));
  }
}

}  // namespace

NetworkPrior build_laplacian(const SpMat& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw invalid_argument("adjacency must be square, got " +
                           std::to_string(adjacency.rows()) + "x" +
                           std::to_string(adjacency.cols()));
  }
  const Eigen::Index p = adjacency.rows();

  SpMat A = adjacency;
  A.makeCompressed();
  A.prune(0.0);  // drop explicit zeros so symmetry checks see structure only

  // symmetry, zero diagonal, nonnegativity
  SpMat At = SpMat(A.transpose());
  At.makeCompressed();
  for (Eigen::Index j = 0; j < p; ++j) {
    SpMat::InnerIterator a(A, j), b(At, j);
    while (a && b) {
      if (a.row() != b.row() || a.value() != b.value()) {
        const Eigen::Index i = std::min(a.row(), b.row());
        throw invalid_argument("adjacency is not symmetric at (" +
                               std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      ++a;
      ++b;
    }
    if (a || b) {
      const Eigen::Index i = a ? a.row() : b.row();
      throw invalid_argument("adjacency is not symmetric at (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
    }
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    for (SpMat::InnerIterator it(A, j); it; ++it) {
      if (it.row() == j) {
        throw invalid_argument("adjacency has a nonzero diagonal entry at " +
                               std::to_string(j));
      }
      if (it.value() < 0.0) {
        throw invalid_argument("adjacency has a negative weight at (" +
                               std::to_string(it.row()) + ", " +
                               std::to_string(j) + ")");
      }
    }
  }

  // degrees in storage order, so L's row sums cancel exactly
  Eigen::VectorXd degree = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) degree[j] += it.value();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(A.nonZeros()) + static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    trip.emplace_back(j, j, degree[j]);
    for (SpMat::InnerIterator it(A, j); it; ++it)
      trip.emplace_back(it.row(), j, -it.value());
  }
  SpMat L(p, p);
  L.setFromTriplets(trip.begin(), trip.end());
  L.makeCompressed();

  NetworkPrior prior;
  prior.adjacency = std::move(A);
  prior.laplacian = std::move(L);
  return prior;
}

NetworkPrior empty_prior(Eigen::Index p) {
  NetworkPrior prior;
  prior.adjacency = SpMat(p, p);
  prior.laplacian = SpMat(p, p);
  prior.adjacency.makeCompressed();
  prior.laplacian.makeCompressed();
  return prior;
}

double penalty_value(const Eigen::VectorXd& beta, const PenaltyConfig& cfg,
                     const NetworkPrior& prior) {
  cfg.validate();
  check_dim(beta, prior);
  double l1 = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) l1 += std::abs(beta[j]);
  double quad = 0.0;
  if (cfg.alpha < 1.0) {
    // beta^T L beta in storage order, deterministic
    const SpMat& L = prior.laplacian;
    for (Eigen::Index j = 0; j < L.outerSize(); ++j)
      for (SpMat::InnerIterator it(L, j); it; ++it)
        quad += beta[it.row()] * it.value() * beta[j];
  }
  return cfg.lambda * cfg.alpha * l1 + cfg.lambda * (1.0 - cfg.alpha) * quad;
}

Eigen::VectorXd smooth_penalty_gradient(const Eigen::VectorXd& beta,
                                        const PenaltyConfig& cfg,
                                        const NetworkPrior& prior) {
  cfg.validate();
  check_dim(beta, prior);
  const double c = 2.0 * cfg.lambda * (1.0 - cfg.alpha);
  if (c == 0.0) return Eigen::VectorXd::Zero(beta.size());
  Eigen::VectorXd g = Eigen::VectorXd::Zero(beta.size());
  const SpMat& L = prior.laplacian;
  for (Eigen::Index j = 0; j < L.outerSize(); ++j)
    for (SpMat::InnerIterator it(L, j); it; ++it)
      g[it.row()] += it.value() * beta[j];
  g *= c;
  return g;
}

double laplacian_max_eigenvalue(const NetworkPrior& prior) {
  const Eigen::Index p = prior.dim();
  if (p == 0 || prior.laplacian.nonZeros() == 0) return 0.0;
  const SpMat& L = prior.laplacian;
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out = L * v;
  };
  LipschitzBound b = detail::power_iteration(p, apply, 5000, 1e-12);
  if (b.via_fallback) {
    double gersh = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      double row = 0.0;
      for (SpMat::InnerIterator it(L, j); it; ++it) row += std::abs(it.value());
      gersh = std::max(gersh, row);
    }
    return gersh;
  }
  return b.value;
}

}  // namespace aftnet
