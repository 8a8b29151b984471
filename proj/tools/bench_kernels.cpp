// Benchmark comparing the serial reference kernels against the OpenMP
// versions on likelihood-sized workloads: full nll + beta-gradient sweeps at
// the benchmark dimensions, plus the observed-information gram.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "aftnet/kernels.hpp"
#include "aftnet/likelihood.hpp"
#include "aftnet/rng.hpp"
#include "aftnet/threading.hpp"

namespace {

using aftnet::EvalBackend;
using Clock = std::chrono::steady_clock;

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y, delta, beta;
};

Problem make_problem(Eigen::Index n, Eigen::Index p, double density) {
  aftnet::SplitRng rng(42);
  Problem pr;
  pr.X.resize(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) pr.X(i, j) = rng.normal();
  pr.beta = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j)
    if (rng.uniform01() < density) pr.beta[j] = rng.uniform(-0.5, 0.5);
  pr.y.resize(n);
  pr.delta.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    pr.y[i] = rng.normal();
    pr.delta[i] = rng.uniform01() < 0.7 ? 1.0 : 0.0;
  }
  return pr;
}

double time_eval(const Problem& pr, EvalBackend backend, int iters, double* sink) {
  aftnet::detail::NllWorkspace ws;
  Eigen::VectorXd grad(pr.X.cols());
  double acc = 0.0;
  const auto start = Clock::now();
  for (int it = 0; it < iters; ++it) {
    acc += aftnet::detail::nll_value_and_beta_grad(pr.X, pr.y, pr.delta, pr.beta,
                                                   1.0, &grad, ws, backend);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  *sink = acc + grad.sum();
  return secs * 1e6 / iters;  // microseconds per evaluation
}

double time_gram(const Problem& pr, EvalBackend backend, int iters, double* sink) {
  Eigen::VectorXd w = pr.y.array().exp();
  Eigen::MatrixXd B;
  const auto start = Clock::now();
  for (int it = 0; it < iters; ++it) {
    if (backend == EvalBackend::parallel) {
      aftnet::kernels::parallel::weighted_gram(pr.X, w, B);
    } else {
      aftnet::kernels::serial::weighted_gram(pr.X, w, B);
    }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  *sink = B.sum();
  return secs * 1e6 / iters;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aftnet kernel benchmark: serial reference vs OpenMP"};
  int iters = 200;
  double density = 0.3;
  app.add_option("--iters", iters, "evaluations per measurement");
  app.add_option("--density", density, "fraction of nonzero coefficients");
  CLI11_PARSE(app, argc, argv);

  aftnet::apply_thread_cap();
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("threads: %d, iters: %d, beta density: %.2f\n", threads, iters,
              density);
  std::printf("%8s %8s | %14s %14s %8s | %14s %14s %8s\n", "n", "p",
              "nll+grad ser", "nll+grad par", "speedup", "gram ser", "gram par",
              "speedup");

  const std::vector<std::pair<Eigen::Index, Eigen::Index>> sizes = {
      {165, 220}, {413, 1100}, {2000, 500}, {5000, 200}};
  double sink = 0.0;
  for (const auto& [n, p] : sizes) {
    const Problem pr = make_problem(n, p, density);
    const int gram_iters = std::max(1, iters / 20);
    const double ser = time_eval(pr, EvalBackend::serial, iters, &sink);
    const double par = time_eval(pr, EvalBackend::parallel, iters, &sink);
    const double gser = time_gram(pr, EvalBackend::serial, gram_iters, &sink);
    const double gpar = time_gram(pr, EvalBackend::parallel, gram_iters, &sink);
    std::printf("%8lld %8lld | %11.1f us %11.1f us %7.2fx | %11.1f us %11.1f us %7.2fx\n",
                static_cast<long long>(n), static_cast<long long>(p), ser, par,
                ser / par, gser, gpar, gser / gpar);
  }
  // keep the optimizer honest
  std::printf("(checksum %.6g)\n", sink);
  return 0;
}
