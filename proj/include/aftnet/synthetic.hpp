#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "aftnet/network.hpp"
#include "aftnet/rng.hpp"
#include "aftnet/types.hpp"

// Synthetic regulatory-network benchmark: modules of one transcription
// factor (TF) regulating correlated genes, sparse true coefficients, Weibull
// survival times and calibrated exponential censoring.
namespace aftnet {

enum class Topology { not_overlapping, overlapping };

struct ScenarioConfig {
  Topology topology = Topology::not_overlapping;
  int modules = 20;          // r
  int genes_per_module = 10;
  int positive_genes = 5;    // v: positively correlated genes per module of 10
  double rho = 0.7;
  int n_train = 110;
  int n_test = 55;
  double sigma_true = 1.0;
  int n_active = 88;
  double censor_rate = 0.30;
  std::uint64_t seed = 0;

  void validate() const;
  int total_genes() const;  // p

  // Table-style presets: weak = (110, 55, 220), strong = (275, 138, 1100).
  static ScenarioConfig weak_effect(Topology t, double sigma, std::uint64_t seed);
  static ScenarioConfig strong_effect(Topology t, double sigma, std::uint64_t seed);
};

struct GroundTruth {
  Eigen::VectorXd beta_star;
  std::vector<int> active_set;
  double sigma_true = 1.0;
};

// Module structure behind the adjacency matrix. Genes carry one regulator
// (their TF) or two (genes shared between overlapping modules, conditioned
// on the standardized average of both TFs).
struct ModuleMap {
  std::vector<int> tf_of_module;           // node index of each module's TF
  std::vector<int> module_of;              // primary module of each node
  std::vector<std::vector<int>> regulators;  // per node; empty for TFs
  // Gene groups sharing one conditioning variable, in generation order.
  std::vector<std::vector<int>> gene_groups;
};

struct NetworkBuild {
  NetworkPrior prior;
  ModuleMap modules;
};

NetworkBuild gen_network(const ScenarioConfig& cfg);

// n x p design: TF columns iid N(0,1); gene g with sign s_g gets
// X_g = s_g * rho * Z_cond + sqrt(1 - rho^2) * noise, where Z_cond is the
// (standardized) TF or TF-average column. Per group of 10 genes exactly v
// get s_g = +1 (smaller groups get the proportional rounded count).
Eigen::MatrixXd gen_design(const ModuleMap& modules, const ScenarioConfig& cfg,
                           Eigen::Index n, SplitRng& rng);

// First 44 coefficients U(0.1, 0.5), next 44 U(-0.5, -0.1), rest zero, in
// the network's variable order.
GroundTruth gen_true_beta(const ScenarioConfig& cfg, Eigen::Index p, SplitRng& rng);

struct SurvivalDraw {
  Eigen::VectorXd log_times;
  Eigen::VectorXd events;
};

// T_i = exp(x_i^T beta*) * (-log U)^sigma; independent exponential censoring
// with the rate calibrated by bisection so the realized censored count is
// within one subject of round(censor_rate * n).
SurvivalDraw gen_survival(const Eigen::MatrixXd& X, const GroundTruth& truth,
                          const ScenarioConfig& cfg, SplitRng& rng_times,
                          SplitRng& rng_censor);

struct ScenarioData {
  SurvivalDataset train;
  SurvivalDataset test;
  NetworkPrior prior;
  ModuleMap modules;
  GroundTruth truth;
};

// Full scenario draw: one design distribution and one truth; rows split by
// index into train and test; censoring calibrated per split.
ScenarioData simulate_scenario(const ScenarioConfig& cfg);

}  // namespace aftnet
