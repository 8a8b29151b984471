#include "aftnet/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "aftnet/kernels.hpp"
#include "aftnet/likelihood.hpp"

namespace aftnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Columns the penalty applies to start here (the intercept column, when
// present, is exempt from both penalty terms unless penalize_intercept).
Eigen::Index penalty_offset(const SolverOptions& opts) {
  return (opts.intercept && !opts.penalize_intercept) ? 1 : 0;
}

struct Standardization {
  bool active = false;
  Eigen::VectorXd center;  // zero unless centering
  Eigen::VectorXd scale;   // one where the column sd is zero
};

// Scale non-intercept columns to unit sd; center them only when an
// intercept is available to absorb the shift. Constant columns are left
// untouched.
Standardization apply_standardization(Eigen::MatrixXd& X, bool intercept) {
  Standardization s;
  s.active = true;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  s.center = Eigen::VectorXd::Zero(p);
  s.scale = Eigen::VectorXd::Ones(p);
  const Eigen::Index first = intercept ? 1 : 0;
  for (Eigen::Index j = first; j < p; ++j) {
    const double mean = X.col(j).mean();
    if (intercept) {
      X.col(j).array() -= mean;
      s.center[j] = mean;
    }
    // population sd about the mean (column already centered if intercept)
    double var = 0.0;
    const double ref = intercept ? 0.0 : mean;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = X(i, j) - ref;
      var += d * d;
    }
    var /= double(n);
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      X.col(j) /= sd;
      s.scale[j] = sd;
    }
  }
  return s;
}

}  // namespace

void SolverOptions::validate() const {
  if (max_iter < 1) throw invalid_argument("solver: max_iter must be >= 1");
  if (!(tol > 0.0)) throw invalid_argument("solver: tol must be positive");
  if (!(backtrack_factor > 1.0))
    throw invalid_argument("solver: backtrack_factor must be > 1");
  if (m_init && !(*m_init > 0.0))
    throw invalid_argument("solver: m_init must be positive");
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& u, double t) {
  if (t < 0.0) throw invalid_argument("soft_threshold: negative threshold");
  Eigen::VectorXd out(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (u[j] > t) {
      out[j] = u[j] - t;
    } else if (u[j] < -t) {
      out[j] = u[j] + t;
    } else {
      out[j] = 0.0;
    }
  }
  return out;
}

FitResult prox_grad_fit(const SurvivalDataset& data, const NetworkPrior& prior,
                        const PenaltyConfig& cfg, double sigma_hat,
                        const Eigen::VectorXd& beta_init,
                        const SolverOptions& opts) {
  opts.validate();
  cfg.validate();
  if (!(sigma_hat > 0.0))
    throw invalid_argument("prox_grad_fit: sigma_hat must be positive");
  const Eigen::Index p = data.p();
  detail::check_same_length(beta_init.size(), p, "prox_grad_fit beta_init");
  const Eigen::Index off = penalty_offset(opts);
  detail::check_same_length(prior.dim(), p - off, "prox_grad_fit network prior");

  Eigen::MatrixXd X = data.features;
  Standardization std_info;
  if (opts.standardize) std_info = apply_standardization(X, opts.intercept);

  Eigen::VectorXd beta = beta_init;
  if (std_info.active) {
    for (Eigen::Index j = (opts.intercept ? 1 : 0); j < p; ++j)
      beta[j] *= std_info.scale[j];
    if (opts.intercept) {
      double shift = 0.0;
      for (Eigen::Index j = 1; j < p; ++j)
        shift += std_info.center[j] / std_info.scale[j] * beta[j];
      beta[0] += shift;
    }
  }

  const double lambda_quad = cfg.lambda * (1.0 - cfg.alpha);
  const double lambda_l1 = cfg.lambda * cfg.alpha;
  const SpMat& L = prior.laplacian;

  detail::NllWorkspace ws;

  // smooth part f = nll + lambda(1-alpha) * beta_pen^T L beta_pen
  auto f_value = [&](const Eigen::VectorXd& b) -> double {
    double v = detail::nll_value_and_beta_grad(X, data.log_times, data.events, b,
                                               sigma_hat, nullptr, ws, opts.backend);
    if (!std::isfinite(v)) return kInf;
    if (lambda_quad > 0.0) {
      double quad = 0.0;
      for (Eigen::Index j = 0; j < L.outerSize(); ++j)
        for (SpMat::InnerIterator it(L, j); it; ++it)
          quad += b[it.row() + off] * it.value() * b[j + off];
      v += lambda_quad * quad;
    }
    return v;
  };

  // gradient of f at b, reusing the weights the last f_value(b) computed
  auto f_grad_from_ws = [&](const Eigen::VectorXd& b, Eigen::VectorXd& grad) {
    const Eigen::Index n = data.n();
    ws.coef.resize(n);
    const double scale = -1.0 / (double(n) * sigma_hat);
    for (Eigen::Index i = 0; i < n; ++i)
      ws.coef[i] = scale * (ws.w[i] - data.events[i]);
    if (opts.backend == EvalBackend::parallel) {
      kernels::parallel::design_transpose_dot(X, ws.coef, grad);
    } else {
      kernels::serial::design_transpose_dot(X, ws.coef, grad);
    }
    if (lambda_quad > 0.0) {
      for (Eigen::Index j = 0; j < L.outerSize(); ++j) {
        double acc = 0.0;
        for (SpMat::InnerIterator it(L, j); it; ++it)
          acc += it.value() * b[it.row() + off];
        grad[j + off] += 2.0 * lambda_quad * acc;  // L symmetric
      }
    }
  };

  auto l1_norm = [&](const Eigen::VectorXd& b) {
    double s = 0.0;
    for (Eigen::Index j = off; j < p; ++j) s += std::abs(b[j]);
    return s;
  };

  double f_cur = f_value(beta);
  if (!std::isfinite(f_cur)) {
    throw non_finite_objective("prox_grad_fit: objective is not finite at beta_init");
  }
  Eigen::VectorXd grad_f(p);
  f_grad_from_ws(beta, grad_f);

  double M;
  if (opts.m_init) {
    M = *opts.m_init;
  } else {
    ModelParams at_zero;
    at_zero.beta = Eigen::VectorXd::Zero(p);
    at_zero.sigma = sigma_hat;
    SurvivalDataset work;
    work.features = X;
    work.log_times = data.log_times;
    work.events = data.events;
    M = lipschitz_bound(at_zero, work, opts.backend).value;
    if (lambda_quad > 0.0) M += 2.0 * lambda_quad * laplacian_max_eigenvalue(prior);
  }

  FitResult result;
  result.lambda = cfg.lambda;
  result.alpha = cfg.alpha;
  result.sigma_hat = sigma_hat;
  result.objective_trace.push_back(f_cur + lambda_l1 * l1_norm(beta));

  Eigen::VectorXd beta_next(p), diff(p);

  for (int it = 0; it < opts.max_iter; ++it) {
    double f_next = 0.0;
    int growths = 0;
    for (;;) {
      const double thr = lambda_l1 / M;
      for (Eigen::Index j = 0; j < p; ++j) {
        const double u = beta[j] - grad_f[j] / M;
        if (j < off) {
          beta_next[j] = u;
        } else if (u > thr) {
          beta_next[j] = u - thr;
        } else if (u < -thr) {
          beta_next[j] = u + thr;
        } else {
          beta_next[j] = 0.0;
        }
      }
      diff = beta_next - beta;
      const double dist2 = diff.squaredNorm();
      f_next = f_value(beta_next);
      const double rhs = f_cur + grad_f.dot(diff) + 0.5 * M * dist2;
      if (f_next <= rhs) break;
      // once the quadratic progress term sits below the fp resolution of
      // the objective, the comparison is noise; take the prox step as is
      if (std::isfinite(f_next) &&
          0.5 * M * dist2 <= 8.0 * std::numeric_limits<double>::epsilon() *
                                 (1.0 + std::abs(f_cur))) {
        break;
      }
      M *= opts.backtrack_factor;
      if (++growths > 60) {
        throw step_collapse(
            "prox_grad_fit: backtracking exceeded 60 increases of M at iteration " +
            std::to_string(it));
      }
    }

    const double rel = diff.norm() / std::max(1.0, beta.norm());
    beta.swap(beta_next);
    f_cur = f_next;                 // workspace currently holds beta's weights
    f_grad_from_ws(beta, grad_f);
    result.objective_trace.push_back(f_cur + lambda_l1 * l1_norm(beta));
    result.iterations = it + 1;

    if (rel <= opts.tol) {
      result.converged = true;
      break;
    }
  }

  result.final_M = M;

  if (std_info.active) {
    if (opts.intercept) {
      double shift = 0.0;
      for (Eigen::Index j = 1; j < p; ++j)
        shift += std_info.center[j] / std_info.scale[j] * beta[j];
      beta[0] -= shift;
    }
    for (Eigen::Index j = (opts.intercept ? 1 : 0); j < p; ++j)
      beta[j] /= std_info.scale[j];
  }
  result.beta_hat = beta;
  return result;
}

SolutionPath fit_path(const SurvivalDataset& data, const NetworkPrior& prior,
                      double alpha, const std::vector<double>& lambda_grid,
                      double sigma_hat, const SolverOptions& opts) {
  if (lambda_grid.empty()) throw invalid_argument("fit_path: empty lambda grid");
  for (std::size_t k = 1; k < lambda_grid.size(); ++k) {
    if (!(lambda_grid[k] < lambda_grid[k - 1])) {
      throw invalid_argument(
          "fit_path: lambda grid must be strictly decreasing at index " +
          std::to_string(k));
    }
  }

  SolutionPath path;
  path.alpha = alpha;
  path.sigma_hat = sigma_hat;
  path.lambdas = lambda_grid;
  path.fits.reserve(lambda_grid.size());

  Eigen::VectorXd warm = Eigen::VectorXd::Zero(data.p());
  SolverOptions fit_opts = opts;
  for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
    PenaltyConfig cfg{lambda_grid[k], alpha};
    FitResult fit;
    try {
      fit = prox_grad_fit(data, prior, cfg, sigma_hat, warm, fit_opts);
    } catch (const error& err) {
      throw error("fit_path: lambda index " + std::to_string(k) + " (lambda=" +
                  std::to_string(lambda_grid[k]) + "): " + err.what());
    }
    warm = fit.beta_hat;
    fit_opts.m_init = fit.final_M;  // M retained along the path
    path.fits.push_back(std::move(fit));
  }
  return path;
}

}  // namespace aftnet
