#include "aftnet/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "aftnet/likelihood.hpp"
#include "aftnet/rng.hpp"

namespace aftnet {

LambdaGrid LambdaGrid::from_values(std::vector<double> vals) {
  if (vals.empty()) throw invalid_argument("lambda grid: empty value list");
  for (std::size_t k = 1; k < vals.size(); ++k) {
    if (!(vals[k] < vals[k - 1]))
      throw invalid_argument("lambda grid: values must be strictly decreasing");
  }
  LambdaGrid grid;
  grid.lambda_max = vals.front();
  grid.lambda_min = vals.back();
  grid.n_lambda = static_cast<int>(vals.size());
  grid.min_ratio = vals.back() / vals.front();
  grid.values = std::move(vals);
  return grid;
}

LambdaGrid make_lambda_grid(const SurvivalDataset& data, double alpha,
                            double sigma_hat, int n_lambda, double min_ratio,
                            EvalBackend backend) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw invalid_argument(
        "make_lambda_grid: alpha must be in (0, 1]; alpha = 0 has no finite "
        "lambda_max");
  }
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
    throw invalid_argument("make_lambda_grid: min_ratio must be in (0, 1)");
  }
  if (n_lambda < 2) {
    throw invalid_argument("make_lambda_grid: n_lambda must be at least 2");
  }

  ModelParams at_zero;
  at_zero.beta = Eigen::VectorXd::Zero(data.p());
  at_zero.sigma = sigma_hat;
  const Eigen::VectorXd g = gradient(at_zero, data, backend);
  double sup = 0.0;
  for (Eigen::Index j = 0; j < data.p(); ++j)
    sup = std::max(sup, std::abs(g[j]));
  if (!(sup > 0.0)) {
    throw invalid_argument(
        "make_lambda_grid: null problem, gradient at the origin is zero");
  }

  // One ulp of headroom so the all-zero vector stays an exact fixed point
  // of the prox step at lambda_max despite the division round-trip.
  const double lambda_max =
      std::nextafter(sup / alpha, std::numeric_limits<double>::infinity());
  const double lambda_min = min_ratio * lambda_max;

  LambdaGrid grid;
  grid.lambda_max = lambda_max;
  grid.lambda_min = lambda_min;
  grid.n_lambda = n_lambda;
  grid.min_ratio = min_ratio;
  grid.values.resize(n_lambda);
  const double hi = std::log10(lambda_max);
  const double lo = std::log10(lambda_min);
  for (int k = 0; k < n_lambda; ++k) {
    const double t = double(k) / double(n_lambda - 1);
    grid.values[k] = std::pow(10.0, hi + (lo - hi) * t);
  }
  grid.values.front() = lambda_max;
  grid.values.back() = lambda_min;
  return grid;
}

std::vector<int> assign_folds(const Eigen::VectorXd& events, int folds,
                              std::uint64_t seed, bool stratify_events) {
  const int n = static_cast<int>(events.size());
  if (folds < 2) throw invalid_argument("assign_folds: need at least 2 folds");
  if (folds > n) throw invalid_argument("assign_folds: more folds than subjects");

  SplitRng rng(seed);
  std::vector<int> order;
  order.reserve(n);
  if (stratify_events) {
    std::vector<int> ev, cen;
    for (int i = 0; i < n; ++i) (events[i] == 1.0 ? ev : cen).push_back(i);
    rng.shuffle(ev);
    rng.shuffle(cen);
    order.insert(order.end(), ev.begin(), ev.end());
    order.insert(order.end(), cen.begin(), cen.end());
  } else {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
  }

  std::vector<int> fold(n);
  for (int t = 0; t < n; ++t) fold[order[t]] = t % folds;
  return fold;
}

CvReport cv_pl(const SurvivalDataset& data, const NetworkPrior& prior,
               double alpha, const LambdaGrid& grid, double sigma_hat,
               const CvOptions& opts) {
  data.validate();
  if (grid.values.empty()) throw invalid_argument("cv_pl: empty lambda grid");
  const int n = static_cast<int>(data.n());
  const Eigen::Index p = data.p();
  const int K = opts.folds;
  const std::size_t n_lambda = grid.values.size();

  CvReport report;
  report.seed = opts.seed;
  report.fold_assignment = assign_folds(data.events, K, opts.seed,
                                        opts.stratify_events);

  // feasibility: each training part needs at least one event
  std::vector<int> events_in_fold(K, 0);
  int total_events = 0;
  for (int i = 0; i < n; ++i) {
    if (data.events[i] == 1.0) {
      ++events_in_fold[report.fold_assignment[i]];
      ++total_events;
    }
  }
  for (int k = 0; k < K; ++k) {
    if (total_events - events_in_fold[k] < 1) {
      throw infeasible_fold(
          "cv_pl: training part of fold " + std::to_string(k) +
          " has no events; use fewer folds or stratified assignment");
    }
  }

  // held-out linear predictors, per lambda then per subject
  Eigen::MatrixXd eta_cv(n, static_cast<Eigen::Index>(n_lambda));

  std::vector<std::string> fold_errors(K);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (int k = 0; k < K; ++k) {
    try {
      std::vector<int> train_rows, test_rows;
      for (int i = 0; i < n; ++i) {
        if (report.fold_assignment[i] == k) {
          test_rows.push_back(i);
        } else {
          train_rows.push_back(i);
        }
      }
      SurvivalDataset train;
      train.features.resize(train_rows.size(), p);
      train.log_times.resize(train_rows.size());
      train.events.resize(train_rows.size());
      for (std::size_t r = 0; r < train_rows.size(); ++r) {
        train.features.row(r) = data.features.row(train_rows[r]);
        train.log_times[r] = data.log_times[train_rows[r]];
        train.events[r] = data.events[train_rows[r]];
      }

      const SolutionPath path =
          fit_path(train, prior, alpha, grid.values, sigma_hat, opts.solver);

      for (std::size_t l = 0; l < n_lambda; ++l) {
        const Eigen::VectorXd& b = path.fits[l].beta_hat;
        for (int i : test_rows) {
          eta_cv(i, static_cast<Eigen::Index>(l)) = data.features.row(i).dot(b);
        }
      }
    } catch (const error& err) {
      fold_errors[k] = err.what();
    }
  }
  for (int k = 0; k < K; ++k) {
    if (!fold_errors[k].empty()) {
      throw error("cv_pl: fold " + std::to_string(k) + ": " + fold_errors[k]);
    }
  }

  // CV(lambda) = -sum_i [ delta_i(-log sigma + e_i) - exp(e_i) ] over the
  // pooled held-out residuals, summed in subject order.
  const double log_sigma = std::log(sigma_hat);
  report.cv_curve.resize(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double e = (data.log_times[i] - eta_cv(i, static_cast<Eigen::Index>(l))) /
                       sigma_hat;
      // exp overflows to +inf for wild residuals; that lambda scores +inf
      // and is simply never selected
      const double term = data.events[i] * (-log_sigma + e) - std::exp(e);
      acc -= term;
    }
    report.cv_curve[l] = acc;
  }

  // minimum, ties toward the larger lambda (smaller index)
  std::size_t best = 0;
  for (std::size_t l = 1; l < n_lambda; ++l) {
    if (report.cv_curve[l] < report.cv_curve[best]) best = l;
  }
  report.lambda_opt_index = static_cast<int>(best);
  report.lambda_opt = grid.values[best];
  return report;
}

}  // namespace aftnet
