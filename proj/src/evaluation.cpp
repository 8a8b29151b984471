#include "aftnet/evaluation.hpp"

#include <cmath>
#include <string>

namespace aftnet {

MetricsReport selection_metrics(const Eigen::VectorXd& beta_hat,
                                const GroundTruth& truth,
                                const Eigen::MatrixXd& X_test) {
  const Eigen::Index p = truth.beta_star.size();
  detail::check_same_length(beta_hat.size(), p, "selection_metrics beta");
  detail::check_same_length(X_test.cols(), p, "selection_metrics test design");

  MetricsReport rep;
  rep.p = static_cast<int>(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool truly_active = truth.beta_star[j] != 0.0;
    const bool selected = beta_hat[j] != 0.0;
    if (truly_active) ++rep.p_active;
    if (selected) ++rep.selected;
    if (truly_active && !selected) ++rep.missed;
    if (!truly_active && selected) ++rep.false_positive;
  }
  if (rep.p_active == 0 || rep.p_active == rep.p) {
    throw invalid_argument("selection_metrics: need 0 < p_active < p, got " +
                           std::to_string(rep.p_active) + " of " +
                           std::to_string(rep.p));
  }

  rep.emse = (truth.beta_star - beta_hat).norm();
  const Eigen::VectorXd diff_pred = X_test * (truth.beta_star - beta_hat);
  rep.pmse = diff_pred.squaredNorm() / double(X_test.rows());
  rep.fnr = double(rep.missed) / double(rep.p_active);
  rep.fpr = double(rep.false_positive) / double(rep.p - rep.p_active);
  rep.nsr = double(rep.selected) / double(rep.p);
  return rep;
}

std::vector<RocPoint> selection_roc(const SolutionPath& path,
                                    const GroundTruth& truth) {
  if (path.fits.empty()) throw invalid_argument("selection_roc: empty path");
  std::vector<RocPoint> pts;
  pts.reserve(path.fits.size() + 2);
  pts.push_back({0.0, 0.0});
  for (const FitResult& fit : path.fits) {
    int p_active = 0, missed = 0, false_pos = 0, inactive = 0;
    for (Eigen::Index j = 0; j < truth.beta_star.size(); ++j) {
      const bool truly_active = truth.beta_star[j] != 0.0;
      const bool selected = fit.beta_hat[j] != 0.0;
      if (truly_active) {
        ++p_active;
        if (!selected) ++missed;
      } else {
        ++inactive;
        if (selected) ++false_pos;
      }
    }
    RocPoint pt;
    pt.tpr = p_active > 0 ? 1.0 - double(missed) / double(p_active) : 0.0;
    pt.fpr = inactive > 0 ? double(false_pos) / double(inactive) : 0.0;
    pts.push_back(pt);
  }
  pts.push_back({1.0, 1.0});
  return pts;
}

double roc_auc(const std::vector<RocPoint>& points) {
  double auc = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    auc += (points[k].fpr - points[k - 1].fpr) *
           (points[k].tpr + points[k - 1].tpr) * 0.5;
  }
  return auc;
}

double c_index(const Eigen::VectorXd& risk_scores, const Eigen::VectorXd& times,
               const Eigen::VectorXd& events) {
  const Eigen::Index n = times.size();
  detail::check_same_length(risk_scores.size(), n, "c_index risks");
  detail::check_same_length(events.size(), n, "c_index events");

  double comparable = 0.0, concordant = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (events[i] != 1.0) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i || !(times[i] < times[j])) continue;
      comparable += 1.0;
      if (risk_scores[i] > risk_scores[j]) {
        concordant += 1.0;
      } else if (risk_scores[i] == risk_scores[j]) {
        concordant += 0.5;
      }
    }
  }
  if (comparable == 0.0) {
    throw no_comparable_pairs("c_index: no comparable pairs in the sample");
  }
  return concordant / comparable;
}

}  // namespace aftnet
