#pragma once

#include <Eigen/Dense>

#include <vector>

#include "aftnet/solver.hpp"
#include "aftnet/synthetic.hpp"
#include "aftnet/types.hpp"

// Estimation / selection / prediction metrics and Harrell's C-index.
namespace aftnet {

class no_comparable_pairs : public error {
 public:
  using error::error;
};

struct MetricsReport {
  double emse = 0.0;  // ||beta* - beta_hat||_2 (norm, not squared)
  double pmse = 0.0;  // ||X_D (beta* - beta_hat)||_2^2 / n_D
  double fnr = 0.0;   // missed actives / p_active
  double fpr = 0.0;   // false selections / (p - p_active)
  double nsr = 0.0;   // selected / p
  // counts behind the rates
  int p = 0;
  int p_active = 0;
  int selected = 0;
  int missed = 0;
  int false_positive = 0;
};

// "Selected" means beta_hat_j exactly nonzero (the prox output is exactly
// sparse).
MetricsReport selection_metrics(const Eigen::VectorXd& beta_hat,
                                const GroundTruth& truth,
                                const Eigen::MatrixXd& X_test);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

// One point per lambda in decreasing-lambda order, with (0,0) prepended and
// (1,1) appended for trapezoid integration.
std::vector<RocPoint> selection_roc(const SolutionPath& path,
                                    const GroundTruth& truth);

double roc_auc(const std::vector<RocPoint>& points);

// Harrell's C over comparable pairs (delta_i = 1 and t_i < t_j): concordant
// when risk_i > risk_j, ties in risk credit 0.5. For an AFT fit the risk
// score is -x^T beta_hat.
double c_index(const Eigen::VectorXd& risk_scores, const Eigen::VectorXd& times,
               const Eigen::VectorXd& events);

}  // namespace aftnet
