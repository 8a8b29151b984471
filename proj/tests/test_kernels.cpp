#include <doctest.h>

#include <Eigen/Dense>

#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aftnet/kernels.hpp"
#include "aftnet/likelihood.hpp"
#include "aftnet/rng.hpp"
#include "oracles.hpp"

using namespace aftnet;

namespace {

struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y, delta, beta;
  double sigma = 1.0;
};

Instance random_instance(std::uint64_t seed, Eigen::Index n, Eigen::Index p) {
  SplitRng rng(seed);
  Instance in;
  oracle::random_instance(rng, n, p, in.X, in.y, in.delta, in.beta, in.sigma);
  return in;
}

}  // namespace

TEST_CASE("serial and parallel kernels agree within rounding") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Instance in = random_instance(seed, 4097, 13);  // spans several blocks
    Eigen::VectorXd eta_s, eta_p;
    kernels::serial::linear_predictor(in.X, in.beta, eta_s);
    kernels::parallel::linear_predictor(in.X, in.beta, eta_p);
    CHECK((eta_s - eta_p).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::VectorXd es, ws, ep, wp;
    CHECK(kernels::serial::gumbel_weights(in.y, eta_s, in.sigma, es, ws));
    CHECK(kernels::parallel::gumbel_weights(in.y, eta_p, in.sigma, ep, wp));

    const double ls = kernels::serial::loglik_sum(in.delta, es, ws, in.sigma);
    const double lp = kernels::parallel::loglik_sum(in.delta, ep, wp, in.sigma);
    CHECK(ls == doctest::Approx(lp).epsilon(1e-12));

    const double ss = kernels::serial::sigma_score_sum(in.delta, es, ws);
    const double sp = kernels::parallel::sigma_score_sum(in.delta, ep, wp);
    CHECK(ss == doctest::Approx(sp).epsilon(1e-12));

    Eigen::VectorXd gs, gp;
    kernels::serial::design_transpose_dot(in.X, ws, gs);
    kernels::parallel::design_transpose_dot(in.X, wp, gp);
    for (Eigen::Index j = 0; j < 13; ++j)
      CHECK(gs[j] == doctest::Approx(gp[j]).epsilon(1e-12));

    Eigen::MatrixXd Bs, Bp;
    kernels::serial::weighted_gram(in.X, ws, Bs);
    kernels::parallel::weighted_gram(in.X, wp, Bp);
    CHECK((Bs - Bp).cwiseAbs().maxCoeff() / Bs.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("parallel kernels are bitwise invariant to the thread count") {
#ifdef _OPENMP
  const Instance in = random_instance(9, 6000, 17);
  const int saved = omp_get_max_threads();

  auto run_all = [&](int threads) {
    omp_set_num_threads(threads);
    Eigen::VectorXd eta, e, w, g;
    Eigen::MatrixXd B;
    kernels::parallel::linear_predictor(in.X, in.beta, eta);
    kernels::parallel::gumbel_weights(in.y, eta, in.sigma, e, w);
    const double a = kernels::parallel::loglik_sum(in.delta, e, w, in.sigma);
    const double b = kernels::parallel::sigma_score_sum(in.delta, e, w);
    const double c = kernels::parallel::sigma_curvature_sum(in.delta, e, w);
    kernels::parallel::design_transpose_dot(in.X, w, g);
    kernels::parallel::weighted_gram(in.X, w, B);
    return std::make_tuple(eta, a, b, c, g, B);
  };

  const auto one = run_all(1);
  const auto two = run_all(2);
  const auto four = run_all(4);
  omp_set_num_threads(saved);

  CHECK(std::get<0>(one) == std::get<0>(two));
  CHECK(std::get<0>(one) == std::get<0>(four));
  CHECK(std::get<1>(one) == std::get<1>(two));
  CHECK(std::get<1>(one) == std::get<1>(four));
  CHECK(std::get<2>(one) == std::get<2>(two));
  CHECK(std::get<3>(one) == std::get<3>(two));
  CHECK(std::get<4>(one) == std::get<4>(two));
  CHECK(std::get<4>(one) == std::get<4>(four));
  CHECK(std::get<5>(one) == std::get<5>(two));
#endif
}

TEST_CASE("linear predictor skips zero coefficients without changing results") {
  const Instance in = random_instance(5, 301, 20);
  Eigen::VectorXd sparse = in.beta;
  for (Eigen::Index j = 0; j < 20; j += 2) sparse[j] = 0.0;
  Eigen::VectorXd eta_p, eta_s;
  kernels::parallel::linear_predictor(in.X, sparse, eta_p);
  kernels::serial::linear_predictor(in.X, sparse, eta_s);
  CHECK((eta_p - eta_s).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("gumbel weights flag overflow identically in both backends") {
  Eigen::VectorXd y(3), eta(3);
  y << 0.0, 900.0, 1.0;
  eta.setZero();
  Eigen::VectorXd e, w;
  CHECK_FALSE(kernels::serial::gumbel_weights(y, eta, 1.0, e, w));
  CHECK_FALSE(kernels::parallel::gumbel_weights(y, eta, 1.0, e, w));
  y[1] = 5.0;
  CHECK(kernels::serial::gumbel_weights(y, eta, 1.0, e, w));
  CHECK(kernels::parallel::gumbel_weights(y, eta, 1.0, e, w));
}

TEST_CASE("full likelihood evaluations agree across backends") {
  const Instance in = random_instance(13, 2500, 9);
  SurvivalDataset data;
  data.features = in.X;
  data.log_times = in.y;
  data.events = in.delta;
  ModelParams params{in.beta, in.sigma};

  const double v_s = neg_log_likelihood(params, data, EvalBackend::serial);
  const double v_p = neg_log_likelihood(params, data, EvalBackend::parallel);
  CHECK(v_s == doctest::Approx(v_p).epsilon(1e-13));

  const Eigen::VectorXd g_s = gradient(params, data, EvalBackend::serial);
  const Eigen::VectorXd g_p = gradient(params, data, EvalBackend::parallel);
  for (Eigen::Index k = 0; k < g_s.size(); ++k)
    CHECK(g_s[k] == doctest::Approx(g_p[k]).epsilon(1e-12));

  const Eigen::MatrixXd i_s = observed_information(params, data, EvalBackend::serial);
  const Eigen::MatrixXd i_p = observed_information(params, data, EvalBackend::parallel);
  CHECK((i_s - i_p).cwiseAbs().maxCoeff() / i_s.cwiseAbs().maxCoeff() <= 1e-12);
}
