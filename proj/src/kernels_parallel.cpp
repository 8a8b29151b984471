#include "aftnet/kernels.hpp"

#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// OpenMP kernels. Work is split into fixed blocks of kBlock subjects and
// block partials are combined in block order, so every result is bitwise
// independent of the thread count and schedule. Small inputs run the same
// blocked loops inline on the calling thread (identical arithmetic, no
// OpenMP dispatch), which matters in the solver's hot loop.
namespace aftnet::kernels::parallel {

namespace {

constexpr Eigen::Index kMinRows = 8192;
constexpr Eigen::Index kMinCells = 262144;

inline Eigen::Index block_count(Eigen::Index n) {
  return (n + kBlock - 1) / kBlock;
}

// sum_i term(i) with a fixed block decomposition.
template <typename Term>
double blocked_reduce(Eigen::Index n, const Term& term) {
  const Eigen::Index nb = block_count(n);
  auto block_sum = [&](Eigen::Index b) {
    const Eigen::Index lo = b * kBlock;
    const Eigen::Index hi = std::min(lo + kBlock, n);
    double acc = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) acc += term(i);
    return acc;
  };
  if (nb == 1) return block_sum(0);
  std::vector<double> partial(static_cast<std::size_t>(nb), 0.0);
  if (n >= kMinRows) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b)
      partial[static_cast<std::size_t>(b)] = block_sum(b);
  } else {
    for (Eigen::Index b = 0; b < nb; ++b)
      partial[static_cast<std::size_t>(b)] = block_sum(b);
  }
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace

void linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta,
                      Eigen::VectorXd& eta) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  eta.resize(n);
  const Eigen::Index nb = block_count(n);
  // Row blocks; inside each block, columns in ascending order (axpy over
  // active columns, contiguous in the column-major layout).
  auto block_body = [&](Eigen::Index b) {
    const Eigen::Index lo = b * kBlock;
    const Eigen::Index len = std::min(lo + kBlock, n) - lo;
    double* out = eta.data() + lo;
    for (Eigen::Index i = 0; i < len; ++i) out[i] = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double bj = beta[j];
      if (bj == 0.0) continue;
      const double* col = X.col(j).data() + lo;
      for (Eigen::Index i = 0; i < len; ++i) out[i] += bj * col[i];
    }
  };
  if (nb > 1 && n * p >= kMinCells) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b) block_body(b);
  } else {
    for (Eigen::Index b = 0; b < nb; ++b) block_body(b);
  }
}

bool gumbel_weights(const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                    double sigma, Eigen::VectorXd& e, Eigen::VectorXd& w) {
  const Eigen::Index n = y.size();
  e.resize(n);
  w.resize(n);
  int bad = 0;
  if (n >= kMinRows) {
#pragma omp parallel for schedule(static) reduction(| : bad)
    for (Eigen::Index i = 0; i < n; ++i) {
      e[i] = (y[i] - eta[i]) / sigma;
      if (e[i] > kExpOverflow || std::isnan(e[i])) bad |= 1;
      w[i] = std::exp(e[i]);
    }
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      e[i] = (y[i] - eta[i]) / sigma;
      if (e[i] > kExpOverflow || std::isnan(e[i])) bad |= 1;
      w[i] = std::exp(e[i]);
    }
  }
  return bad == 0;
}

void design_transpose_dot(const Eigen::MatrixXd& X, const Eigen::VectorXd& c,
                          Eigen::VectorXd& g) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  g.resize(p);
  // Each column dot is computed serially in ascending row order.
  auto col_dot = [&](Eigen::Index j) {
    double acc = 0.0;
    const double* col = X.col(j).data();
    for (Eigen::Index i = 0; i < n; ++i) acc += c[i] * col[i];
    g[j] = acc;
  };
  if (n * p >= kMinCells) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index j = 0; j < p; ++j) col_dot(j);
  } else {
    for (Eigen::Index j = 0; j < p; ++j) col_dot(j);
  }
}

double loglik_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                  const Eigen::VectorXd& w, double sigma) {
  const double log_sigma = std::log(sigma);
  return blocked_reduce(e.size(), [&](Eigen::Index i) {
    return delta[i] * (-log_sigma + e[i]) - w[i];
  });
}

double sigma_score_sum(const Eigen::VectorXd& delta, const Eigen::VectorXd& e,
                       const Eigen::VectorXd& w) {
  return blocked_reduce(e.size(), [&](Eigen::Index i) {
    return delta[i] * (-1.0 - e[i]) + w[i] * e[i];
  });
}

double sigma_curvature_sum(const Eigen::VectorXd& delta,
                           const Eigen::VectorXd& e, const Eigen::VectorXd& w) {
  return blocked_reduce(e.size(), [&](Eigen::Index i) {
    return e[i] * e[i] * w[i] + delta[i];
  });
}

void weighted_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& w,
                   Eigen::MatrixXd& B) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  B.resize(p, p);
  // Upper triangle, one (j, .) stripe per task; each entry is a serial dot.
  auto stripe = [&](Eigen::Index j) {
    const double* cj = X.col(j).data();
    for (Eigen::Index k = j; k < p; ++k) {
      const double* ck = X.col(k).data();
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) acc += cj[i] * ck[i] * w[i];
      B(j, k) = acc;
    }
  };
  if (n * p * p >= 4 * kMinCells) {
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index j = 0; j < p; ++j) stripe(j);
  } else {
    for (Eigen::Index j = 0; j < p; ++j) stripe(j);
  }
}

}  // namespace aftnet::kernels::parallel
