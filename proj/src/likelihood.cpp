#include "aftnet/likelihood.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aftnet/kernels.hpp"

namespace aftnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const ModelParams& params, const SurvivalDataset& data) {
  params.validate();
  if (params.beta.size() != data.p()) {
    throw dimension_error("beta has " + std::to_string(params.beta.size()) +
                          " coefficients but the dataset has " +
                          std::to_string(data.p()) + " features");
  }
}

}  // namespace

void SurvivalDataset::validate() const {
  const Eigen::Index n_rows = features.rows();
  if (log_times.size() != n_rows || events.size() != n_rows) {
    throw invalid_dataset("dataset sizes disagree: features " +
                          std::to_string(n_rows) + " rows, log_times " +
                          std::to_string(log_times.size()) + ", events " +
                          std::to_string(events.size()));
  }
  if (!feature_names.empty() &&
      static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw invalid_dataset("feature_names has " +
                          std::to_string(feature_names.size()) +
                          " entries for " + std::to_string(features.cols()) +
                          " columns");
  }
  bool any_event = false;
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const double d = events[i];
    if (d != 0.0 && d != 1.0) {
      throw invalid_dataset("events[" + std::to_string(i) +
                            "] = " + std::to_string(d) + " is not 0 or 1");
    }
    if (!std::isfinite(log_times[i])) {
      throw invalid_dataset("log_times[" + std::to_string(i) + "] is not finite");
    }
    any_event = any_event || d == 1.0;
  }
  if (n_rows > 0 && !any_event) {
    throw invalid_dataset("all observations are censored");
  }
}

void ModelParams::validate() const {
  if (!(sigma > 0.0)) {
    throw invalid_argument("sigma must be positive, got " + std::to_string(sigma));
  }
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (!std::isfinite(beta[j])) {
      throw invalid_argument("beta[" + std::to_string(j) + "] is not finite");
    }
  }
}

Eigen::VectorXd standardized_residuals(const ModelParams& params,
                                       const SurvivalDataset& data,
                                       EvalBackend backend) {
  check_params(params, data);
  Eigen::VectorXd eta, e(data.n());
  if (backend == EvalBackend::parallel) {
    kernels::parallel::linear_predictor(data.features, params.beta, eta);
  } else {
    kernels::serial::linear_predictor(data.features, params.beta, eta);
  }
  for (Eigen::Index i = 0; i < data.n(); ++i)
    e[i] = (data.log_times[i] - eta[i]) / params.sigma;
  return e;
}

double neg_log_likelihood(const ModelParams& params, const SurvivalDataset& data,
                          EvalBackend backend) {
  check_params(params, data);
  detail::NllWorkspace ws;
  return detail::nll_value_and_beta_grad(data.features, data.log_times,
                                         data.events, params.beta, params.sigma,
                                         nullptr, ws, backend);
}

Eigen::VectorXd gradient(const ModelParams& params, const SurvivalDataset& data,
                         EvalBackend backend) {
  check_params(params, data);
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const double sigma = params.sigma;
  const bool par = backend == EvalBackend::parallel;

  Eigen::VectorXd eta, e, w;
  if (par) {
    kernels::parallel::linear_predictor(data.features, params.beta, eta);
  } else {
    kernels::serial::linear_predictor(data.features, params.beta, eta);
  }
  const bool ok = par ? kernels::parallel::gumbel_weights(data.log_times, eta,
                                                          sigma, e, w)
                      : kernels::serial::gumbel_weights(data.log_times, eta,
                                                        sigma, e, w);
  if (!ok) return Eigen::VectorXd::Constant(p + 1, kInf);

  // beta part: -(1/(n*sigma)) * X^T (w - delta)
  Eigen::VectorXd c(n);
  const double scale = -1.0 / (double(n) * sigma);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = scale * (w[i] - data.events[i]);
  Eigen::VectorXd grad(p + 1);
  Eigen::VectorXd gbeta;
  if (par) {
    kernels::parallel::design_transpose_dot(data.features, c, gbeta);
  } else {
    kernels::serial::design_transpose_dot(data.features, c, gbeta);
  }
  grad.head(p) = gbeta;

  const double score = par ? kernels::parallel::sigma_score_sum(data.events, e, w)
                           : kernels::serial::sigma_score_sum(data.events, e, w);
  grad[p] = scale * score;
  return grad;
}

Eigen::MatrixXd observed_information(const ModelParams& params,
                                     const SurvivalDataset& data,
                                     EvalBackend backend) {
  check_params(params, data);
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const double sigma = params.sigma;
  const double inv_s2 = 1.0 / (sigma * sigma);
  const bool par = backend == EvalBackend::parallel;

  Eigen::VectorXd eta, e, w;
  if (par) {
    kernels::parallel::linear_predictor(data.features, params.beta, eta);
  } else {
    kernels::serial::linear_predictor(data.features, params.beta, eta);
  }
  const bool ok = par ? kernels::parallel::gumbel_weights(data.log_times, eta,
                                                          sigma, e, w)
                      : kernels::serial::gumbel_weights(data.log_times, eta,
                                                        sigma, e, w);
  if (!ok) return Eigen::MatrixXd::Constant(p + 1, p + 1, kInf);

  Eigen::MatrixXd info(p + 1, p + 1);

  // beta block: (1/sigma^2) X^T diag(w) X
  Eigen::MatrixXd gram;
  if (par) {
    kernels::parallel::weighted_gram(data.features, w, gram);
  } else {
    kernels::serial::weighted_gram(data.features, w, gram);
  }
  info.topLeftCorner(p, p) = inv_s2 * gram;

  // raw-loglik scores, for the paper's cross and sigma entries
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = (w[i] - data.events[i]) / sigma;
  Eigen::VectorXd score_beta;  // d loglik / d beta_j = (1/sigma) sum (w-delta) x_ij
  if (par) {
    kernels::parallel::design_transpose_dot(data.features, c, score_beta);
  } else {
    kernels::serial::design_transpose_dot(data.features, c, score_beta);
  }
  const double score_sigma =
      (par ? kernels::parallel::sigma_score_sum(data.events, e, w)
           : kernels::serial::sigma_score_sum(data.events, e, w)) /
      sigma;

  // cross terms: (1/sigma^2) sum x_ij e_i w_i + (1/sigma) dl/dbeta_j
  Eigen::VectorXd ew(n);
  for (Eigen::Index i = 0; i < n; ++i) ew[i] = e[i] * w[i];
  Eigen::VectorXd cross;
  if (par) {
    kernels::parallel::design_transpose_dot(data.features, ew, cross);
  } else {
    kernels::serial::design_transpose_dot(data.features, ew, cross);
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    const double v = inv_s2 * cross[j] + score_beta[j] / sigma;
    info(j, p) = v;
    info(p, j) = v;
  }

  const double curv = par ? kernels::parallel::sigma_curvature_sum(data.events, e, w)
                          : kernels::serial::sigma_curvature_sum(data.events, e, w);
  info(p, p) = inv_s2 * curv + 2.0 * score_sigma / sigma;
  return info;
}

LipschitzBound lipschitz_bound(const ModelParams& params,
                               const SurvivalDataset& data, EvalBackend backend) {
  check_params(params, data);
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  const double sigma = params.sigma;
  const bool par = backend == EvalBackend::parallel;

  Eigen::VectorXd eta, e, w;
  if (par) {
    kernels::parallel::linear_predictor(data.features, params.beta, eta);
  } else {
    kernels::serial::linear_predictor(data.features, params.beta, eta);
  }
  const bool ok = par ? kernels::parallel::gumbel_weights(data.log_times, eta,
                                                          sigma, e, w)
                      : kernels::serial::gumbel_weights(data.log_times, eta,
                                                        sigma, e, w);
  if (!ok) {
    throw numeric_error("lipschitz_bound: diverged evaluation (exp overflow)");
  }

  const double scale = 1.0 / (double(n) * sigma * sigma);
  Eigen::VectorXd tmp_n(n), tmp_p(p);
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    if (par) {
      kernels::parallel::linear_predictor(data.features, v, tmp_n);
      for (Eigen::Index i = 0; i < n; ++i) tmp_n[i] *= w[i];
      kernels::parallel::design_transpose_dot(data.features, tmp_n, out);
    } else {
      kernels::serial::linear_predictor(data.features, v, tmp_n);
      for (Eigen::Index i = 0; i < n; ++i) tmp_n[i] *= w[i];
      kernels::serial::design_transpose_dot(data.features, tmp_n, out);
    }
    out *= scale;
  };

  LipschitzBound bound = detail::power_iteration(p, apply, 5000, 1e-13);
  if (bound.via_fallback) {
    // Frobenius norm of the beta block, an upper bound for the top
    // eigenvalue of a PSD matrix. Accumulated stripe by stripe.
    Eigen::MatrixXd gram;
    if (par) {
      kernels::parallel::weighted_gram(data.features, w, gram);
    } else {
      kernels::serial::weighted_gram(data.features, w, gram);
    }
    bound.value = scale * gram.norm();
  }
  if (!(bound.value > 0.0)) {
    // Degenerate design (all-zero features); any positive step works.
    bound.value = 1.0;
  }
  return bound;
}

namespace detail {

double nll_value_and_beta_grad(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& delta,
                               const Eigen::VectorXd& beta, double sigma,
                               Eigen::VectorXd* grad, NllWorkspace& ws,
                               EvalBackend backend) {
  const Eigen::Index n = X.rows();
  const bool par = backend == EvalBackend::parallel;
  if (par) {
    kernels::parallel::linear_predictor(X, beta, ws.eta);
  } else {
    kernels::serial::linear_predictor(X, beta, ws.eta);
  }
  const bool ok = par ? kernels::parallel::gumbel_weights(y, ws.eta, sigma, ws.e, ws.w)
                      : kernels::serial::gumbel_weights(y, ws.eta, sigma, ws.e, ws.w);
  if (!ok) return kInf;

  const double ll = par ? kernels::parallel::loglik_sum(delta, ws.e, ws.w, sigma)
                        : kernels::serial::loglik_sum(delta, ws.e, ws.w, sigma);
  const double value = -ll / double(n);
  if (!std::isfinite(value)) return kInf;

  if (grad != nullptr) {
    ws.coef.resize(n);
    const double scale = -1.0 / (double(n) * sigma);
    for (Eigen::Index i = 0; i < n; ++i)
      ws.coef[i] = scale * (ws.w[i] - delta[i]);
    if (par) {
      kernels::parallel::design_transpose_dot(X, ws.coef, *grad);
    } else {
      kernels::serial::design_transpose_dot(X, ws.coef, *grad);
    }
  }
  return value;
}

}  // namespace detail

}  // namespace aftnet
