#include "aftnet/scale.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "aftnet/likelihood.hpp"

namespace aftnet {

namespace {

constexpr double kLogSigmaFloor = -20.0;

struct TwoParamEval {
  double value;    // nll
  double g_mu;     // d nll / d mu
  double g_sigma;  // d nll / d sigma
  bool finite;
};

// Intercept-only model: x_i^T beta = mu for all i.
TwoParamEval eval_nll(const SurvivalDataset& data, double mu, double sigma) {
  const Eigen::Index n = data.n();
  const double inv_n = 1.0 / double(n);
  double ll = 0.0, s_mu = 0.0, s_sigma = 0.0;
  const double log_sigma = std::log(sigma);
  TwoParamEval out{0, 0, 0, true};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = (data.log_times[i] - mu) / sigma;
    if (e > 700.0) {
      out.finite = false;
      return out;
    }
    const double w = std::exp(e);
    const double d = data.events[i];
    ll += d * (-log_sigma + e) - w;
    s_mu += w - d;                          // sigma * dl/dmu summand
    s_sigma += d * (-1.0 - e) + w * e;      // sigma * dl/dsigma summand
  }
  out.value = -ll * inv_n;
  out.g_mu = -inv_n * s_mu / sigma;
  out.g_sigma = -inv_n * s_sigma / sigma;
  return out;
}

}  // namespace

ScaleFit estimate_sigma(const SurvivalDataset& data, double tol, int max_iter) {
  data.validate();

  // moment-matched start from the event observations
  double sum = 0.0, count = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.events[i] == 1.0) {
      sum += data.log_times[i];
      count += 1.0;
    }
  }
  if (count < 2.0) {
    throw invalid_dataset("estimate_sigma needs at least 2 events, got " +
                          std::to_string(static_cast<int>(count)));
  }
  const double mean_y = sum / count;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (data.events[i] == 1.0) {
      const double d = data.log_times[i] - mean_y;
      ss += d * d;
    }
  }
  const double sd = std::sqrt(ss / (count - 1.0));
  if (!(sd > 0.0)) {
    throw degenerate_scale("degenerate scale: event log-times have zero variance");
  }

  const double pi = 3.14159265358979323846;
  double mu = mean_y;
  double log_s = std::log(sd * std::sqrt(6.0) / pi);

  // Damped Newton on (mu, log sigma) using the intercept-only gradient and
  // observed information plus the log-parameterization chain rule.
  SurvivalDataset one;  // constant-1 design for the information matrix
  one.features = Eigen::MatrixXd::Ones(data.n(), 1);
  one.log_times = data.log_times;
  one.events = data.events;

  ScaleFit fit;
  TwoParamEval cur = eval_nll(data, mu, std::exp(log_s));
  if (!cur.finite) {
    throw numeric_error("estimate_sigma: diverged at the starting point");
  }

  for (int it = 0; it < max_iter; ++it) {
    const double sigma = std::exp(log_s);
    if (log_s < kLogSigmaFloor) {
      throw degenerate_scale("degenerate scale: log sigma fell below " +
                             std::to_string(kLogSigmaFloor));
    }

    fit.iterations = it;
    const double gnorm = std::max(std::abs(cur.g_mu), std::abs(cur.g_sigma));
    if (gnorm <= tol) {
      fit.converged = true;
      break;
    }

    ModelParams params;
    params.beta = Eigen::VectorXd::Constant(1, mu);
    params.sigma = sigma;
    // raw-loglik information; nll Hessian is info / n
    const Eigen::MatrixXd info = observed_information(params, one, EvalBackend::serial);
    const double inv_n = 1.0 / double(data.n());
    const double h_mm = info(0, 0) * inv_n;
    const double h_ms = info(0, 1) * inv_n;
    const double h_ss = info(1, 1) * inv_n;

    // chain rule to (mu, s = log sigma)
    Eigen::Matrix2d H;
    Eigen::Vector2d g;
    g << cur.g_mu, sigma * cur.g_sigma;
    H << h_mm, sigma * h_ms, sigma * h_ms,
        sigma * sigma * h_ss + sigma * cur.g_sigma;

    Eigen::Vector2d step;
    bool use_newton = false;
    // try Newton; require a descent direction
    const double det = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
    if (std::abs(det) > 1e-300) {
      step = -H.inverse() * g;
      use_newton = step.dot(g) < 0.0;
    }
    if (!use_newton) step = -g;

    double t = 1.0;
    bool accepted = false;
    for (int half = 0; half <= 30; ++half) {
      const double mu_try = mu + t * step[0];
      const double ls_try = log_s + t * step[1];
      const TwoParamEval trial = eval_nll(data, mu_try, std::exp(ls_try));
      if (trial.finite && trial.value <= cur.value) {
        mu = mu_try;
        log_s = ls_try;
        cur = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // no measurable progress left in this direction; treat the current
      // point as the optimum if the gradient is already small
      break;
    }
  }

  if (!fit.converged) {
    const double gnorm = std::max(std::abs(cur.g_mu), std::abs(cur.g_sigma));
    if (gnorm <= tol) {
      fit.converged = true;
    } else {
      throw no_convergence("estimate_sigma did not converge after " +
                           std::to_string(max_iter) + " iterations (mu=" +
                           std::to_string(mu) + ", sigma=" +
                           std::to_string(std::exp(log_s)) +
                           ", grad norm=" + std::to_string(gnorm) + ")");
    }
  }

  fit.mu_hat = mu;
  fit.sigma_hat = std::exp(log_s);
  return fit;
}

}  // namespace aftnet
