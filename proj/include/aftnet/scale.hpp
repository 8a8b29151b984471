#pragma once

#include "aftnet/types.hpp"

// Step 1 of the two-step fit: maximum likelihood for the intercept-only
// Weibull AFT model, giving the scale estimate reused by the solver and by
// cross-validation.
namespace aftnet {

class degenerate_scale : public error {
 public:
  using error::error;
};

class no_convergence : public error {
 public:
  using error::error;
};

struct ScaleFit {
  double mu_hat = 0.0;     // intercept on the log-time scale
  double sigma_hat = 1.0;  // > 0
  int iterations = 0;
  bool converged = false;
};

// Damped Newton on (mu, log sigma). Initial values: mu0 = mean of event
// log-times, sigma0 = sqrt(6)/pi * sd of event log-times (Gumbel moment
// match). Convergence requires the (mu, sigma) gradient infinity-norm of
// the normalized likelihood to drop below tol. log(sigma) falling under
// -20 raises degenerate_scale; exceeding max_iter raises no_convergence
// with the last iterate in the message.
ScaleFit estimate_sigma(const SurvivalDataset& data, double tol = 1e-8,
                        int max_iter = 100);

}  // namespace aftnet
