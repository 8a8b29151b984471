#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aftnet/evaluation.hpp"
#include "aftnet/model_selection.hpp"
#include "aftnet/network.hpp"
#include "aftnet/solver.hpp"
#include "aftnet/synthetic.hpp"
#include "aftnet/types.hpp"

// File formats: headered CSV for tabular data, plain edge lists for
// networks, JSON for results and manifests. Newlines are '\n', decimals use
// '.', numbers are written with enough digits to round-trip bitwise.
namespace aftnet {

class parse_error : public error {
 public:
  using error::error;
};

struct LoadOptions {
  bool log_times = false;  // outcomes `time` column already holds y_i
};

// features: headered delimited table, one row per subject. outcomes: columns
// `time` (positive unless log_times) and `status` (0/1), same row count.
SurvivalDataset load_dataset(const std::filesystem::path& features_path,
                             const std::filesystem::path& outcomes_path,
                             const LoadOptions& options = {});

struct AdjacencyLoad {
  NetworkPrior prior;
  int dropped_self_loops = 0;
};

// Edge list: two node columns (names from feature_names, or 1-based column
// indices) and an optional nonnegative weight; '#' starts a comment.
// Duplicate edges collapse to one; self-loops are dropped and counted.
AdjacencyLoad load_adjacency(const std::filesystem::path& path,
                             const std::vector<std::string>& feature_names);

// --- result persistence -------------------------------------------------

void write_fit_json(const std::filesystem::path& path, const FitResult& fit,
                    Eigen::Index p);
FitResult read_fit_json(const std::filesystem::path& path, Eigen::Index* p_out = nullptr);

void write_path_json(const std::filesystem::path& path, const SolutionPath& sp,
                     Eigen::Index p);
SolutionPath read_path_json(const std::filesystem::path& path, Eigen::Index* p_out = nullptr);

void write_cv_json(const std::filesystem::path& path, const CvReport& report,
                   const LambdaGrid& grid);

void write_truth_json(const std::filesystem::path& path, const GroundTruth& truth,
                      Eigen::Index p);
GroundTruth read_truth_json(const std::filesystem::path& path, Eigen::Index* p_out = nullptr);

void write_dataset_csv(const std::filesystem::path& features_path,
                       const std::filesystem::path& outcomes_path,
                       const SurvivalDataset& data);

void write_edge_list(const std::filesystem::path& path, const NetworkPrior& prior);

struct MetricsOutput {
  MetricsReport metrics;
  double lambda = 0.0;
};
void write_metrics_json(const std::filesystem::path& path, const MetricsOutput& out);

void write_roc_csv(const std::filesystem::path& path,
                   const std::vector<RocPoint>& points);

// --- manifests ------------------------------------------------------------

// FNV-1a 64-bit digest of a file's raw bytes, hex encoded.
std::string file_digest(const std::filesystem::path& path);

struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> options;  // resolved flags
  std::vector<std::pair<std::string, std::string>> inputs;   // path -> digest
  std::uint64_t seed = 0;
  bool has_seed = false;
  double duration_seconds = 0.0;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

// --- CLI -------------------------------------------------------------------

// Entry point behind the aftnet binary; exposed for in-process testing.
// On error: prints one structured line to stderr, removes files created by
// the failed run, returns nonzero.
int run_cli(const std::vector<std::string>& args);

}  // namespace aftnet
