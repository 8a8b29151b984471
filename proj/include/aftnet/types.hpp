#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace aftnet {

// Base class for all structured errors thrown by the library.
class error : public std::runtime_error {
 public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

class dimension_error : public error {
 public:
  using error::error;
};

class invalid_dataset : public error {
 public:
  using error::error;
};

class invalid_argument : public error {
 public:
  using error::error;
};

class numeric_error : public error {
 public:
  using error::error;
};

// Censored survival sample: one row per subject. `log_times` holds
// y_i = min(log T_i, log C_i); `events` holds delta_i in {0, 1}.
struct SurvivalDataset {
  Eigen::MatrixXd features;              // n x p
  Eigen::VectorXd log_times;             // n
  Eigen::VectorXd events;                // n, entries 0 or 1
  std::vector<std::string> feature_names;  // empty or size p

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index p() const { return features.cols(); }

  // Throws invalid_dataset on any violated invariant.
  void validate() const;
};

// Coefficients plus Weibull scale. sigma is the paper's scale parameter;
// the Weibull shape is 1/sigma.
struct ModelParams {
  Eigen::VectorXd beta;
  double sigma = 1.0;

  void validate() const;
};

// Kernel backend selector. `parallel` is the production path (OpenMP,
// blocked reductions, results independent of thread count); `serial` is the
// plain-loop reference kept for testing and benchmarking.
enum class EvalBackend { serial, parallel };

namespace detail {
inline void check_same_length(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw dimension_error(std::string(what) + ": sizes " + std::to_string(a) +
                          " and " + std::to_string(b) + " do not match");
  }
}
}  // namespace detail

}  // namespace aftnet
