#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "aftnet/likelihood.hpp"
#include "aftnet/rng.hpp"
#include "oracles.hpp"

using namespace aftnet;

namespace {

SurvivalDataset make_data(Eigen::MatrixXd X, Eigen::VectorXd y, Eigen::VectorXd d) {
  SurvivalDataset data;
  data.features = std::move(X);
  data.log_times = std::move(y);
  data.events = std::move(d);
  return data;
}

SurvivalDataset scalar_data(double x, double y, double d) {
  return make_data(Eigen::MatrixXd::Constant(1, 1, x),
                   Eigen::VectorXd::Constant(1, y),
                   Eigen::VectorXd::Constant(1, d));
}

}  // namespace

TEST_CASE("standardized residuals: identity at zero coefficients") {
  SurvivalDataset data = make_data(Eigen::MatrixXd::Random(2, 3),
                                   (Eigen::VectorXd(2) << 0.5, -0.2).finished(),
                                   Eigen::VectorXd::Ones(2));
  ModelParams params{Eigen::VectorXd::Zero(3), 1.0};
  const Eigen::VectorXd e = standardized_residuals(params, data);
  CHECK(e[0] == doctest::Approx(0.5));
  CHECK(e[1] == doctest::Approx(-0.2));
}

TEST_CASE("standardized residuals: scalar formula") {
  SurvivalDataset data = scalar_data(3.0, 5.0, 1.0);
  ModelParams params{Eigen::VectorXd::Constant(1, 1.0), 2.0};
  const Eigen::VectorXd e = standardized_residuals(params, data);
  CHECK(e[0] == doctest::Approx(1.0));
}

TEST_CASE("standardized residuals: matches a scalar row loop exactly") {
  SplitRng rng(11);
  Eigen::MatrixXd X;
  Eigen::VectorXd y, d, beta;
  double sigma;
  oracle::random_instance(rng, 13, 5, X, y, d, beta, sigma);
  SurvivalDataset data = make_data(X, y, d);
  ModelParams params{beta, sigma};
  const Eigen::VectorXd e = standardized_residuals(params, data, EvalBackend::serial);
  for (Eigen::Index i = 0; i < 13; ++i) {
    double eta = 0.0;
    for (Eigen::Index j = 0; j < 5; ++j) eta += X(i, j) * beta[j];
    CHECK(e[i] == (y[i] - eta) / sigma);
  }
}

TEST_CASE("residuals: dimension mismatch names both sizes") {
  SurvivalDataset data = scalar_data(1.0, 0.0, 1.0);
  ModelParams params{Eigen::VectorXd::Zero(3), 1.0};
  CHECK_THROWS_WITH_AS(standardized_residuals(params, data),
                       doctest::Contains("3"), dimension_error);
}

TEST_CASE("nll: event at e = 0") {
  SurvivalDataset data = scalar_data(0.0, 0.0, 1.0);
  ModelParams params{Eigen::VectorXd::Zero(1), 1.0};
  CHECK(neg_log_likelihood(params, data) == doctest::Approx(1.0));
}

TEST_CASE("nll: censored at e = 0") {
  SurvivalDataset data = make_data(Eigen::MatrixXd::Zero(2, 1),
                                   (Eigen::VectorXd(2) << 0.0, 0.0).finished(),
                                   (Eigen::VectorXd(2) << 0.0, 1.0).finished());
  // the censored subject at e=0 contributes -exp(0) = -1 to the raw loglik
  ModelParams params{Eigen::VectorXd::Zero(1), 1.0};
  CHECK(neg_log_likelihood(params, data) == doctest::Approx(1.0));
}

TEST_CASE("nll: scalar substitution") {
  SurvivalDataset data = scalar_data(0.0, std::log(2.0), 1.0);
  ModelParams params{Eigen::VectorXd::Zero(1), 0.5};
  const double expected = -(3.0 * std::log(2.0) - 4.0);
  CHECK(neg_log_likelihood(params, data) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.92056).epsilon(1e-5));
}

TEST_CASE("nll: overflow returns the +infinity sentinel, no throw") {
  SurvivalDataset data = scalar_data(0.0, 800.0, 1.0);
  ModelParams params{Eigen::VectorXd::Zero(1), 1.0};
  CHECK(std::isinf(neg_log_likelihood(params, data)));
  const Eigen::VectorXd g = gradient(params, data);
  CHECK(std::isinf(g[0]));
  const Eigen::MatrixXd info = observed_information(params, data);
  CHECK(std::isinf(info(0, 0)));
}

TEST_CASE("gradient: event at e = 0 forces beta parts 0, sigma part 1") {
  SurvivalDataset data = scalar_data(1.0, 0.0, 1.0);
  ModelParams params{Eigen::VectorXd::Zero(1), 1.0};
  const Eigen::VectorXd g = gradient(params, data);
  CHECK(g[0] == doctest::Approx(0.0));
  CHECK(g[1] == doctest::Approx(1.0));
}

TEST_CASE("gradient: stationarity construction at beta = 0") {
  // all events, y arranged so sum exp(y_i/sigma) x_ij = sum x_ij: two
  // symmetric rows +-x with y = 0 make both sums vanish
  Eigen::MatrixXd X(2, 2);
  X << 1.0, -2.0, -1.0, 2.0;
  SurvivalDataset data = make_data(X, Eigen::VectorXd::Zero(2),
                                   Eigen::VectorXd::Ones(2));
  ModelParams params{Eigen::VectorXd::Zero(2), 1.0};
  const Eigen::VectorXd g = gradient(params, data);
  CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gradient: finite-difference oracle on a random instance") {
  SplitRng rng(7);
  Eigen::MatrixXd X;
  Eigen::VectorXd y, d, beta;
  double sigma;
  oracle::random_instance(rng, 7, 3, X, y, d, beta, sigma);
  SurvivalDataset data = make_data(X, y, d);
  ModelParams params{beta, sigma};
  const Eigen::VectorXd g = gradient(params, data);

  Eigen::VectorXd theta(4);
  theta.head(3) = beta;
  theta[3] = sigma;
  auto f = [&](const Eigen::VectorXd& th) {
    return oracle::nll_scalar(X, y, d, th.head(3), th[3]);
  };
  const Eigen::VectorXd fd = oracle::central_diff(f, theta, 1e-6);
  for (Eigen::Index k = 0; k < 4; ++k) {
    CHECK(g[k] == doctest::Approx(fd[k]).epsilon(1e-5));
  }
}

TEST_CASE("finite-difference consistency property over random instances") {
  SplitRng rng(1234);
  for (int rep = 0; rep < 25; ++rep) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.next_u64() % 18);
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.next_u64() % 8);
    Eigen::MatrixXd X;
    Eigen::VectorXd y, d, beta;
    double sigma;
    oracle::random_instance(rng, n, p, X, y, d, beta, sigma);
    SurvivalDataset data = make_data(X, y, d);
    ModelParams params{beta, sigma};
    const Eigen::VectorXd g = gradient(params, data);

    Eigen::VectorXd theta(p + 1);
    theta.head(p) = beta;
    theta[p] = sigma;
    auto f = [&](const Eigen::VectorXd& th) {
      return oracle::nll_scalar(X, y, d, th.head(p), th[p]);
    };
    const Eigen::VectorXd fd = oracle::central_diff(f, theta, 1e-6);
    for (Eigen::Index k = 0; k <= p; ++k) {
      const double scale = std::max(1.0, std::abs(fd[k]));
      CHECK(std::abs(g[k] - fd[k]) / scale <= 1e-5);
    }
  }
}

TEST_CASE("observed information: scalar example with the paper's sign map") {
  SurvivalDataset data = scalar_data(1.0, 0.0, 1.0);
  ModelParams params{Eigen::VectorXd::Zero(1), 1.0};
  const Eigen::MatrixXd info = observed_information(params, data);
  CHECK(info(0, 0) == doctest::Approx(1.0));
  CHECK(info(0, 1) == doctest::Approx(0.0));
  // raw-loglik sigma entry: 1 + 2 * dl/dsigma with dl/dsigma = -1 here
  CHECK(info(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("observed information: exact symmetry") {
  SplitRng rng(3);
  Eigen::MatrixXd X;
  Eigen::VectorXd y, d, beta;
  double sigma;
  oracle::random_instance(rng, 9, 4, X, y, d, beta, sigma);
  SurvivalDataset data = make_data(X, y, d);
  ModelParams params{beta, sigma};
  const Eigen::MatrixXd info = observed_information(params, data);
  CHECK((info - info.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("observed information matches finite differences of the gradient") {
  SplitRng rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::MatrixXd X;
    Eigen::VectorXd y, d, beta;
    double sigma;
    oracle::random_instance(rng, 12, 4, X, y, d, beta, sigma);
    SurvivalDataset data = make_data(X, y, d);
    ModelParams params{beta, sigma};
    const Eigen::MatrixXd info = observed_information(params, data);
    const Eigen::Index p = 4;

    // Hessian of nll = info / n, checked column by column
    const double h = 1e-6;
    for (Eigen::Index k = 0; k <= p; ++k) {
      ModelParams hi = params, lo = params;
      if (k < p) {
        hi.beta[k] += h;
        lo.beta[k] -= h;
      } else {
        hi.sigma += h;
        lo.sigma -= h;
      }
      const Eigen::VectorXd ghi = gradient(hi, data);
      const Eigen::VectorXd glo = gradient(lo, data);
      for (Eigen::Index j = 0; j <= p; ++j) {
        const double fd = (ghi[j] - glo[j]) / (2.0 * h);
        const double entry = info(j, k) / double(data.n());
        const double scale = std::max(1.0, std::abs(fd));
        const double tol = (j < p && k < p) ? 1e-4 : 2e-4;
        CHECK(std::abs(entry - fd) / scale <= tol);
      }
    }
  }
}

TEST_CASE("censoring monotonicity: flipping one delta shifts the loglik by the density term") {
  SplitRng rng(21);
  Eigen::MatrixXd X;
  Eigen::VectorXd y, d, beta;
  double sigma;
  oracle::random_instance(rng, 10, 3, X, y, d, beta, sigma);
  d.setOnes();
  SurvivalDataset data = make_data(X, y, d);
  ModelParams params{beta, sigma};
  const Eigen::VectorXd e = standardized_residuals(params, data);
  const double base = neg_log_likelihood(params, data);

  for (Eigen::Index i = 0; i < 3; ++i) {
    SurvivalDataset flipped = data;
    flipped.events[i] = 0.0;
    const double v = neg_log_likelihood(params, flipped);
    // dropping delta_i removes (-log sigma + e_i) from the raw loglik,
    // which adds it / n to the normalized nll
    const double expected = base + (-std::log(sigma) + e[i]) / double(data.n());
    CHECK(v == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("scale equivariance with an explicit intercept column") {
  SplitRng rng(31);
  Eigen::MatrixXd X0;
  Eigen::VectorXd y, d, beta0;
  double sigma;
  oracle::random_instance(rng, 8, 2, X0, y, d, beta0, sigma);

  Eigen::MatrixXd X(8, 3);
  X.col(0).setOnes();
  X.rightCols(2) = X0;
  Eigen::VectorXd beta(3);
  beta << 0.3, beta0[0], beta0[1];
  SurvivalDataset data = make_data(X, y, d);

  const double c = 0.7125;
  SurvivalDataset shifted = data;
  shifted.log_times.array() += c;
  Eigen::VectorXd beta_shifted = beta;
  beta_shifted[0] += c;

  ModelParams a{beta, sigma};
  ModelParams b{beta_shifted, sigma};
  CHECK(neg_log_likelihood(a, data) ==
        doctest::Approx(neg_log_likelihood(b, shifted)).epsilon(1e-12));
}

TEST_CASE("lipschitz bound: single subject at e = 0") {
  SurvivalDataset data = scalar_data(1.0, 0.0, 1.0);
  ModelParams params{Eigen::VectorXd::Zero(1), 1.0};
  const LipschitzBound b = lipschitz_bound(params, data);
  CHECK(b.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(b.via_fallback);
}

TEST_CASE("lipschitz bound: diagonal operator via the shared power iteration") {
  Eigen::Vector3d diag(2.0, 5.0, 1.0);
  auto apply = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
    out = diag.asDiagonal() * v;
  };
  const LipschitzBound b = detail::power_iteration(3, apply, 5000, 1e-13);
  CHECK(b.value == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("lipschitz bound: random 10x10 against a dense eigensolver") {
  SplitRng rng(77);
  Eigen::MatrixXd X;
  Eigen::VectorXd y, d, beta;
  double sigma;
  oracle::random_instance(rng, 10, 10, X, y, d, beta, sigma);
  SurvivalDataset data = make_data(X, y, d);
  ModelParams params{beta, sigma};
  const LipschitzBound b = lipschitz_bound(params, data);

  const Eigen::VectorXd e = standardized_residuals(params, data);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(10, 10);
  for (Eigen::Index i = 0; i < 10; ++i)
    B += std::exp(e[i]) * X.row(i).transpose() * X.row(i);
  B /= (10.0 * sigma * sigma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  const double top = es.eigenvalues().maxCoeff();
  CHECK(b.value == doctest::Approx(top).epsilon(1e-8));
}

TEST_CASE("dataset validation rejects bad inputs") {
  SurvivalDataset data = scalar_data(1.0, 0.0, 2.0);
  CHECK_THROWS_AS(data.validate(), invalid_dataset);
  data.events[0] = 0.0;  // all censored
  CHECK_THROWS_AS(data.validate(), invalid_dataset);
  data.events[0] = 1.0;
  data.log_times[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(data.validate(), invalid_dataset);
}
