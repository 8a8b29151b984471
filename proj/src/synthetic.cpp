#include "aftnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <vector>

namespace aftnet {

void ScenarioConfig::validate() const {
  if (modules < 1) throw invalid_argument("scenario: modules must be >= 1");
  if (topology == Topology::overlapping && modules < 4) {
    throw invalid_argument("scenario: overlapping topology needs at least 4 modules");
  }
  if (genes_per_module < 1)
    throw invalid_argument("scenario: genes_per_module must be >= 1");
  if (positive_genes < 0 || positive_genes > genes_per_module) {
    throw invalid_argument("scenario: positive_genes must be in [0, genes_per_module]");
  }
  if (!(rho >= -1.0 && rho <= 1.0))
    throw invalid_argument("scenario: rho must be in [-1, 1]");
  if (n_train < 1 || n_test < 0)
    throw invalid_argument("scenario: sample sizes invalid");
  if (!(sigma_true > 0.0))
    throw invalid_argument("scenario: sigma_true must be positive");
  if (!(censor_rate >= 0.0 && censor_rate < 1.0))
    throw invalid_argument("scenario: censor_rate must be in [0, 1)");
  if (total_genes() < n_active)
    throw invalid_argument("scenario: p < n_active (" +
                           std::to_string(total_genes()) + " < " +
                           std::to_string(n_active) + ")");
}

int ScenarioConfig::total_genes() const {
  // both topologies come out to r * (genes_per_module + 1)
  return modules * (genes_per_module + 1);
}

ScenarioConfig ScenarioConfig::weak_effect(Topology t, double sigma,
                                           std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.topology = t;
  cfg.modules = 20;
  cfg.n_train = 110;
  cfg.n_test = 55;
  cfg.sigma_true = sigma;
  cfg.seed = seed;
  return cfg;
}

ScenarioConfig ScenarioConfig::strong_effect(Topology t, double sigma,
                                             std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.topology = t;
  cfg.modules = 100;
  cfg.n_train = 275;
  cfg.n_test = 138;
  cfg.sigma_true = sigma;
  cfg.seed = seed;
  return cfg;
}

namespace {

struct Builder {
  std::vector<Eigen::Triplet<double>> edges;
  ModuleMap map;
  int next = 0;

  int add_tf(int module) {
    const int id = next++;
    map.tf_of_module.push_back(id);
    map.module_of.push_back(module);
    map.regulators.emplace_back();
    return id;
  }

  int add_gene(int module, std::vector<int> tfs) {
    const int id = next++;
    map.module_of.push_back(module);
    for (int tf : tfs) {
      edges.emplace_back(id, tf, 1.0);
      edges.emplace_back(tf, id, 1.0);
    }
    map.regulators.push_back(std::move(tfs));
    return id;
  }
};

}  // namespace

NetworkBuild gen_network(const ScenarioConfig& cfg) {
  cfg.validate();
  const int r = cfg.modules;
  const int g = cfg.genes_per_module;
  Builder b;

  auto star_module = [&](int module) {
    const int tf = b.add_tf(module);
    std::vector<int> group;
    for (int k = 0; k < g; ++k) group.push_back(b.add_gene(module, {tf}));
    b.map.gene_groups.push_back(std::move(group));
  };

  if (cfg.topology == Topology::not_overlapping) {
    for (int m = 0; m < r; ++m) star_module(m);
  } else {
    // modules 0-1: two TFs, 10 shared genes, 5 exclusive each;
    // modules 2-3: two TFs, 6 shared genes, 7 exclusive each;
    // shared genes live in the earlier module's block.
    const int tf1 = b.add_tf(0);
    // block of module 0: TF1, shared(10), exclusive1(5). TF2 is created
    // later in its own block; shared genes reference both, so their edges
    // are wired after TF2 exists.
    std::vector<int> shared12_nodes;
    for (int k = 0; k < 10; ++k) {
      const int id = b.next++;
      b.map.module_of.push_back(0);
      b.map.regulators.emplace_back();  // filled below
      shared12_nodes.push_back(id);
    }
    std::vector<int> excl1;
    for (int k = 0; k < 5; ++k) excl1.push_back(b.add_gene(0, {tf1}));
    const int tf2 = b.add_tf(1);
    std::vector<int> excl2;
    for (int k = 0; k < 5; ++k) excl2.push_back(b.add_gene(1, {tf2}));
    for (int id : shared12_nodes) {
      b.map.regulators[id] = {tf1, tf2};
      b.edges.emplace_back(id, tf1, 1.0);
      b.edges.emplace_back(tf1, id, 1.0);
      b.edges.emplace_back(id, tf2, 1.0);
      b.edges.emplace_back(tf2, id, 1.0);
    }

    const int tf3 = b.add_tf(2);
    std::vector<int> shared34_nodes;
    for (int k = 0; k < 6; ++k) {
      const int id = b.next++;
      b.map.module_of.push_back(2);
      b.map.regulators.emplace_back();
      shared34_nodes.push_back(id);
    }
    std::vector<int> excl3;
    for (int k = 0; k < 7; ++k) excl3.push_back(b.add_gene(2, {tf3}));
    const int tf4 = b.add_tf(3);
    std::vector<int> excl4;
    for (int k = 0; k < 7; ++k) excl4.push_back(b.add_gene(3, {tf4}));
    for (int id : shared34_nodes) {
      b.map.regulators[id] = {tf3, tf4};
      b.edges.emplace_back(id, tf3, 1.0);
      b.edges.emplace_back(tf3, id, 1.0);
      b.edges.emplace_back(id, tf4, 1.0);
      b.edges.emplace_back(tf4, id, 1.0);
    }

    b.map.gene_groups.push_back(shared12_nodes);
    b.map.gene_groups.push_back(excl1);
    b.map.gene_groups.push_back(excl2);
    b.map.gene_groups.push_back(shared34_nodes);
    b.map.gene_groups.push_back(excl3);
    b.map.gene_groups.push_back(excl4);

    for (int m = 4; m < r; ++m) star_module(m);
  }

  const int p = b.next;
  SpMat A(p, p);
  A.setFromTriplets(b.edges.begin(), b.edges.end(),
                    [](double, double bv) { return bv; });  // dedup to 1

  NetworkBuild out;
  out.prior = build_laplacian(A);
  out.modules = std::move(b.map);
  return out;
}

Eigen::MatrixXd gen_design(const ModuleMap& modules, const ScenarioConfig& cfg,
                           Eigen::Index n, SplitRng& rng) {
  const Eigen::Index p = static_cast<Eigen::Index>(modules.module_of.size());

  // signs first: per gene group, the proportional share of v genes (exactly
  // v for groups of 10) drawn without replacement gets +1
  std::vector<double> sign(p, 0.0);
  for (const auto& group : modules.gene_groups) {
    const int size = static_cast<int>(group.size());
    int n_pos = static_cast<int>(std::llround(
        double(cfg.positive_genes) * double(size) / double(cfg.genes_per_module)));
    n_pos = std::min(n_pos, size);
    std::vector<int> ids = group;
    rng.shuffle(ids);
    for (int k = 0; k < size; ++k) sign[ids[k]] = (k < n_pos) ? 1.0 : -1.0;
  }

  Eigen::MatrixXd X(n, p);

  // TF columns, module order
  for (int tf : modules.tf_of_module) {
    for (Eigen::Index i = 0; i < n; ++i) X(i, tf) = rng.normal();
  }

  // gene columns in ascending node order
  const double rho = cfg.rho;
  const double noise = std::sqrt(1.0 - rho * rho);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index jnode = 0; jnode < p; ++jnode) {
    const auto& regs = modules.regulators[jnode];
    if (regs.empty()) continue;  // TF
    const double s = sign[jnode];
    if (regs.size() == 1) {
      const int tf = regs[0];
      for (Eigen::Index i = 0; i < n; ++i)
        X(i, jnode) = s * rho * X(i, tf) + noise * rng.normal();
    } else {
      // conditioned on the standardized average of both TFs
      const int t1 = regs[0], t2 = regs[1];
      for (Eigen::Index i = 0; i < n; ++i) {
        const double avg = (X(i, t1) + X(i, t2)) * inv_sqrt2;
        X(i, jnode) = s * rho * avg + noise * rng.normal();
      }
    }
  }
  return X;
}

GroundTruth gen_true_beta(const ScenarioConfig& cfg, Eigen::Index p, SplitRng& rng) {
  if (p < cfg.n_active) {
    throw invalid_argument("gen_true_beta: p = " + std::to_string(p) +
                           " < n_active = " + std::to_string(cfg.n_active));
  }
  GroundTruth truth;
  truth.sigma_true = cfg.sigma_true;
  truth.beta_star = Eigen::VectorXd::Zero(p);
  const int half = cfg.n_active / 2;
  for (int j = 0; j < cfg.n_active; ++j) {
    truth.beta_star[j] = (j < half) ? rng.uniform(0.1, 0.5)
                                    : rng.uniform(-0.5, -0.1);
    truth.active_set.push_back(j);
  }
  return truth;
}

SurvivalDraw gen_survival(const Eigen::MatrixXd& X, const GroundTruth& truth,
                          const ScenarioConfig& cfg, SplitRng& rng_times,
                          SplitRng& rng_censor) {
  const Eigen::Index n = X.rows();
  detail::check_same_length(X.cols(), truth.beta_star.size(), "gen_survival design");

  SurvivalDraw draw;
  draw.log_times.resize(n);
  draw.events = Eigen::VectorXd::Ones(n);

  // log T_i = x_i^T beta* + sigma * log(-log U)
  Eigen::VectorXd log_t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = X.row(i).dot(truth.beta_star);
    const double u = rng_times.uniform01();
    log_t[i] = eta + cfg.sigma_true * std::log(-std::log(u));
  }

  if (cfg.censor_rate <= 0.0) {
    draw.log_times = log_t;
    return draw;
  }

  // exponential censoring, rate calibrated by bisection on this sample:
  // censored(i) <=> log tau_i < log c with log tau_i = log(-log u_i) - log T_i
  const long target = std::llround(cfg.censor_rate * double(n));
  Eigen::VectorXd log_tau(n), log_neglog_u(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng_censor.uniform01();
    log_neglog_u[i] = std::log(-std::log(u));
    log_tau[i] = log_neglog_u[i] - log_t[i];
  }
  auto censored_count = [&](double log_c) {
    long cnt = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (log_tau[i] < log_c) ++cnt;
    return cnt;
  };

  double lo = log_tau.minCoeff() - 1.0;
  double hi = log_tau.maxCoeff() + 1.0;
  double log_c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    log_c = 0.5 * (lo + hi);
    const long cnt = censored_count(log_c);
    if (cnt == target) break;
    if (cnt < target) {
      lo = log_c;
    } else {
      hi = log_c;
    }
  }
  const long realized = censored_count(log_c);
  if (std::labs(realized - target) > 1) {
    throw numeric_error("gen_survival: censoring calibration missed the target (" +
                        std::to_string(realized) + " vs " +
                        std::to_string(target) + ")");
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double log_censor = log_neglog_u[i] - log_c;  // log C_i
    if (log_t[i] <= log_censor) {
      draw.log_times[i] = log_t[i];
      draw.events[i] = 1.0;
    } else {
      draw.log_times[i] = log_censor;
      draw.events[i] = 0.0;
    }
  }
  return draw;
}

ScenarioData simulate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  SplitRng root(cfg.seed);
  SplitRng rng_design = root.child(1);
  SplitRng rng_truth = root.child(2);
  SplitRng rng_times = root.child(3);
  SplitRng rng_censor = root.child(4);

  NetworkBuild net = gen_network(cfg);
  const Eigen::Index p = net.prior.dim();
  const Eigen::Index n_all = cfg.n_train + cfg.n_test;

  const Eigen::MatrixXd X = gen_design(net.modules, cfg, n_all, rng_design);
  GroundTruth truth = gen_true_beta(cfg, p, rng_truth);

  ScenarioData out;

  std::vector<std::string> names(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool is_tf = net.modules.regulators[j].empty();
    names[j] = (is_tf ? "tf" : "g") + std::to_string(j);
  }

  const Eigen::MatrixXd X_train = X.topRows(cfg.n_train);
  const Eigen::MatrixXd X_test = X.bottomRows(cfg.n_test);

  // censoring calibrated per emitted split
  SurvivalDraw train_draw = gen_survival(X_train, truth, cfg, rng_times, rng_censor);
  SurvivalDraw test_draw = gen_survival(X_test, truth, cfg, rng_times, rng_censor);

  out.train.features = X_train;
  out.train.log_times = std::move(train_draw.log_times);
  out.train.events = std::move(train_draw.events);
  out.train.feature_names = names;
  out.train.validate();

  out.test.features = X_test;
  out.test.log_times = std::move(test_draw.log_times);
  out.test.events = std::move(test_draw.events);
  out.test.feature_names = names;
  if (cfg.n_test > 0) out.test.validate();

  out.prior = std::move(net.prior);
  out.prior.node_names = names;
  out.modules = std::move(net.modules);
  out.truth = std::move(truth);
  return out;
}

}  // namespace aftnet
