#include "aftnet/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aftnet/version.hpp"

namespace aftnet {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

double parse_double(const std::string& tok, std::size_t row, const std::string& col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (...) {
    throw parse_error("non-numeric cell '" + tok + "' at row " +
                      std::to_string(row) + ", column '" + col + "'");
  }
}

// shortest decimal that round-trips; falls back to %.17g semantics via
// std::to_chars-like printf precision
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const std::exception& ex) {
    throw parse_error("invalid JSON in " + path.string() + ": " + ex.what());
  }
  return j;
}

json sparse_beta_json(const Eigen::VectorXd& beta) {
  json obj = json::object();
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] != 0.0) obj[std::to_string(j)] = beta[j];
  }
  return obj;
}

Eigen::VectorXd dense_beta_from_json(const json& obj, Eigen::Index p) {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const long j = std::stol(it.key());
    if (j < 0 || j >= p) {
      throw parse_error("beta index " + it.key() + " out of range for p = " +
                        std::to_string(p));
    }
    beta[j] = it.value().get<double>();
  }
  return beta;
}

json fit_to_json(const FitResult& fit, Eigen::Index p) {
  json j;
  j["p"] = static_cast<long>(p);
  j["lambda"] = fit.lambda;
  j["alpha"] = fit.alpha;
  j["sigma_hat"] = fit.sigma_hat;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["final_M"] = fit.final_M;
  if (!fit.objective_trace.empty()) j["objective"] = fit.objective_trace.back();
  j["beta"] = sparse_beta_json(fit.beta_hat);
  return j;
}

FitResult fit_from_json(const json& j) {
  FitResult fit;
  const Eigen::Index p = j.at("p").get<long>();
  fit.lambda = j.at("lambda").get<double>();
  fit.alpha = j.at("alpha").get<double>();
  fit.sigma_hat = j.at("sigma_hat").get<double>();
  fit.iterations = j.at("iterations").get<int>();
  fit.converged = j.at("converged").get<bool>();
  fit.final_M = j.value("final_M", 0.0);
  if (j.contains("objective"))
    fit.objective_trace.push_back(j["objective"].get<double>());
  fit.beta_hat = dense_beta_from_json(j.at("beta"), p);
  return fit;
}

}  // namespace

SurvivalDataset load_dataset(const std::filesystem::path& features_path,
                             const std::filesystem::path& outcomes_path,
                             const LoadOptions& options) {
  const std::vector<std::string> flines = read_lines(features_path);
  if (flines.empty()) throw parse_error("empty features file: " + features_path.string());
  const std::vector<std::string> header = split_csv_line(flines[0]);
  const Eigen::Index p = static_cast<Eigen::Index>(header.size());

  std::vector<std::vector<double>> rows;
  for (std::size_t r = 1; r < flines.size(); ++r) {
    if (trim(flines[r]).empty()) continue;
    const std::vector<std::string> toks = split_csv_line(flines[r]);
    if (static_cast<Eigen::Index>(toks.size()) != p) {
      throw parse_error("row " + std::to_string(r) + " of " +
                        features_path.string() + " has " +
                        std::to_string(toks.size()) + " cells, expected " +
                        std::to_string(p));
    }
    std::vector<double> vals(toks.size());
    for (std::size_t c = 0; c < toks.size(); ++c)
      vals[c] = parse_double(toks[c], r, header[c]);
    rows.push_back(std::move(vals));
  }

  const std::vector<std::string> olines = read_lines(outcomes_path);
  if (olines.empty()) throw parse_error("empty outcomes file: " + outcomes_path.string());
  const std::vector<std::string> oheader = split_csv_line(olines[0]);
  long time_col = -1, status_col = -1;
  for (std::size_t c = 0; c < oheader.size(); ++c) {
    if (oheader[c] == "time") time_col = static_cast<long>(c);
    if (oheader[c] == "status") status_col = static_cast<long>(c);
  }
  if (time_col < 0 || status_col < 0) {
    throw parse_error("outcomes file " + outcomes_path.string() +
                      " must have 'time' and 'status' columns");
  }

  std::vector<double> times, status;
  for (std::size_t r = 1; r < olines.size(); ++r) {
    if (trim(olines[r]).empty()) continue;
    const std::vector<std::string> toks = split_csv_line(olines[r]);
    if (toks.size() != oheader.size()) {
      throw parse_error("row " + std::to_string(r) + " of " +
                        outcomes_path.string() + " has " +
                        std::to_string(toks.size()) + " cells, expected " +
                        std::to_string(oheader.size()));
    }
    const double t = parse_double(toks[time_col], r, "time");
    const double s = parse_double(toks[status_col], r, "status");
    if (s != 0.0 && s != 1.0) {
      throw parse_error("status must be 0 or 1, got '" + toks[status_col] +
                        "' at row " + std::to_string(r) + ", column 'status'");
    }
    if (!options.log_times && !(t > 0.0)) {
      throw parse_error("time must be positive (or pass --log-times), got '" +
                        toks[time_col] + "' at row " + std::to_string(r) +
                        ", column 'time'");
    }
    times.push_back(t);
    status.push_back(s);
  }

  if (times.size() != rows.size()) {
    throw parse_error("row count mismatch: " + std::to_string(rows.size()) +
                      " feature rows vs " + std::to_string(times.size()) +
                      " outcome rows");
  }

  SurvivalDataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  data.features.resize(n, p);
  data.log_times.resize(n);
  data.events.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) data.features(i, j) = rows[i][j];
    data.log_times[i] = options.log_times ? times[i] : std::log(times[i]);
    data.events[i] = status[i];
  }
  data.feature_names = header;
  data.validate();
  return data;
}

AdjacencyLoad load_adjacency(const std::filesystem::path& path,
                             const std::vector<std::string>& feature_names) {
  const Eigen::Index p = static_cast<Eigen::Index>(feature_names.size());
  std::map<std::string, Eigen::Index> index;
  for (Eigen::Index j = 0; j < p; ++j) index[feature_names[j]] = j;

  auto resolve = [&](const std::string& tok, std::size_t row) -> Eigen::Index {
    auto it = index.find(tok);
    if (it != index.end()) return it->second;
    // 1-based column index fallback
    try {
      std::size_t used = 0;
      const long v = std::stol(tok, &used);
      if (used == tok.size() && v >= 1 && v <= p) return v - 1;
    } catch (...) {
    }
    throw parse_error("unknown node '" + tok + "' at line " + std::to_string(row));
  };

  AdjacencyLoad out;
  std::map<std::pair<Eigen::Index, Eigen::Index>, double> edges;
  const std::vector<std::string> lines = read_lines(path);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    std::string line = lines[r];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    // accept comma or whitespace separators
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream iss(line);
    std::string a, bs, ws;
    iss >> a >> bs;
    if (bs.empty()) {
      throw parse_error("edge line " + std::to_string(r + 1) +
                        " needs two node columns");
    }
    double w = 1.0;
    if (iss >> ws) w = parse_double(ws, r + 1, "weight");
    if (w < 0.0) {
      throw parse_error("negative edge weight at line " + std::to_string(r + 1));
    }
    const Eigen::Index u = resolve(a, r + 1);
    const Eigen::Index v = resolve(bs, r + 1);
    if (u == v) {
      ++out.dropped_self_loops;
      continue;
    }
    const auto key = std::minmax(u, v);
    edges[{key.first, key.second}] = w;  // duplicates collapse
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(edges.size() * 2);
  for (const auto& [key, w] : edges) {
    if (w == 0.0) continue;
    trip.emplace_back(key.first, key.second, w);
    trip.emplace_back(key.second, key.first, w);
  }
  SpMat A(p, p);
  A.setFromTriplets(trip.begin(), trip.end());
  out.prior = build_laplacian(A);
  out.prior.node_names = feature_names;
  return out;
}

void write_fit_json(const std::filesystem::path& path, const FitResult& fit,
                    Eigen::Index p) {
  json j = fit_to_json(fit, p);
  j["type"] = "fit";
  dump_json(path, j);
}

FitResult read_fit_json(const std::filesystem::path& path, Eigen::Index* p_out) {
  const json j = load_json(path);
  if (j.value("type", "") != "fit") {
    throw parse_error(path.string() + " is not a fit result");
  }
  if (p_out != nullptr) *p_out = j.at("p").get<long>();
  return fit_from_json(j);
}

void write_path_json(const std::filesystem::path& path, const SolutionPath& sp,
                     Eigen::Index p) {
  json j;
  j["type"] = "path";
  j["p"] = static_cast<long>(p);
  j["alpha"] = sp.alpha;
  j["sigma_hat"] = sp.sigma_hat;
  j["lambdas"] = sp.lambdas;
  json fits = json::array();
  for (const FitResult& fit : sp.fits) fits.push_back(fit_to_json(fit, p));
  j["fits"] = std::move(fits);
  dump_json(path, j);
}

SolutionPath read_path_json(const std::filesystem::path& path, Eigen::Index* p_out) {
  const json j = load_json(path);
  if (j.value("type", "") != "path") {
    throw parse_error(path.string() + " is not a path result");
  }
  SolutionPath sp;
  const Eigen::Index p = j.at("p").get<long>();
  if (p_out != nullptr) *p_out = p;
  sp.alpha = j.at("alpha").get<double>();
  sp.sigma_hat = j.at("sigma_hat").get<double>();
  sp.lambdas = j.at("lambdas").get<std::vector<double>>();
  for (const json& f : j.at("fits")) sp.fits.push_back(fit_from_json(f));
  return sp;
}

void write_cv_json(const std::filesystem::path& path, const CvReport& report,
                   const LambdaGrid& grid) {
  json j;
  j["type"] = "cv_report";
  j["lambda_opt"] = report.lambda_opt;
  j["lambda_opt_index"] = report.lambda_opt_index;
  j["cv_curve"] = report.cv_curve;
  j["fold_assignment"] = report.fold_assignment;
  j["seed"] = report.seed;
  j["grid"] = {{"lambda_max", grid.lambda_max},
               {"lambda_min", grid.lambda_min},
               {"n_lambda", grid.n_lambda},
               {"min_ratio", grid.min_ratio},
               {"values", grid.values}};
  dump_json(path, j);
}

void write_truth_json(const std::filesystem::path& path, const GroundTruth& truth,
                      Eigen::Index p) {
  json j;
  j["type"] = "truth";
  j["p"] = static_cast<long>(p);
  j["sigma_true"] = truth.sigma_true;
  j["active_set"] = truth.active_set;
  j["beta_star"] = sparse_beta_json(truth.beta_star);
  dump_json(path, j);
}

GroundTruth read_truth_json(const std::filesystem::path& path, Eigen::Index* p_out) {
  const json j = load_json(path);
  if (j.value("type", "") != "truth") {
    throw parse_error(path.string() + " is not a truth file");
  }
  GroundTruth truth;
  const Eigen::Index p = j.at("p").get<long>();
  if (p_out != nullptr) *p_out = p;
  truth.sigma_true = j.at("sigma_true").get<double>();
  truth.active_set = j.at("active_set").get<std::vector<int>>();
  truth.beta_star = dense_beta_from_json(j.at("beta_star"), p);
  return truth;
}

void write_dataset_csv(const std::filesystem::path& features_path,
                       const std::filesystem::path& outcomes_path,
                       const SurvivalDataset& data) {
  {
    std::ofstream out(features_path);
    if (!out) throw parse_error("cannot write file: " + features_path.string());
    for (Eigen::Index j = 0; j < data.p(); ++j) {
      if (j > 0) out << ',';
      out << (data.feature_names.empty() ? "x" + std::to_string(j)
                                         : data.feature_names[j]);
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      for (Eigen::Index j = 0; j < data.p(); ++j) {
        if (j > 0) out << ',';
        out << fmt_double(data.features(i, j));
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(outcomes_path);
    if (!out) throw parse_error("cannot write file: " + outcomes_path.string());
    out << "time,status\n";
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      out << fmt_double(std::exp(data.log_times[i])) << ','
          << (data.events[i] == 1.0 ? 1 : 0) << '\n';
    }
  }
}

void write_edge_list(const std::filesystem::path& path, const NetworkPrior& prior) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write file: " + path.string());
  out << "# from to weight\n";
  const SpMat& A = prior.adjacency;
  for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
    for (SpMat::InnerIterator it(A, j); it; ++it) {
      if (it.row() >= j) continue;  // emit each undirected edge once
      const auto name = [&](Eigen::Index k) {
        return prior.node_names.empty() ? std::to_string(k + 1)
                                        : prior.node_names[k];
      };
      out << name(it.row()) << ' ' << name(j) << ' ' << fmt_double(it.value())
          << '\n';
    }
  }
}

void write_metrics_json(const std::filesystem::path& path, const MetricsOutput& out) {
  json j;
  j["type"] = "metrics";
  j["lambda"] = out.lambda;
  j["emse"] = out.metrics.emse;
  j["pmse"] = out.metrics.pmse;
  j["fnr"] = out.metrics.fnr;
  j["fpr"] = out.metrics.fpr;
  j["nsr"] = out.metrics.nsr;
  j["counts"] = {{"p", out.metrics.p},
                 {"p_active", out.metrics.p_active},
                 {"selected", out.metrics.selected},
                 {"missed", out.metrics.missed},
                 {"false_positive", out.metrics.false_positive}};
  dump_json(path, j);
}

void write_roc_csv(const std::filesystem::path& path,
                   const std::vector<RocPoint>& points) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write file: " + path.string());
  out << "fpr,tpr\n";
  for (const RocPoint& pt : points)
    out << fmt_double(pt.fpr) << ',' << fmt_double(pt.tpr) << '\n';
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("cannot open file for digest: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json j;
  j["type"] = "manifest";
  j["subcommand"] = manifest.subcommand;
  j["version"] = kVersion;
  json opts = json::object();
  for (const auto& [k, v] : manifest.options) opts[k] = v;
  j["options"] = std::move(opts);
  json inputs = json::object();
  for (const auto& [k, v] : manifest.inputs) inputs[k] = v;
  j["inputs"] = std::move(inputs);
  if (manifest.has_seed) j["seed"] = manifest.seed;
  j["duration_seconds"] = manifest.duration_seconds;
  dump_json(path, j);
}

}  // namespace aftnet
