#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dkm/dataset.hpp"
#include "dkm/diffusion.hpp"
#include "dkm/kernel.hpp"
#include "dkm/partition.hpp"
#include "dkm/sdp.hpp"
#include "dkm/selection.hpp"

namespace dkm {

enum class Method {
  DKM,      // trace-constrained SDP, global bandwidth
  RDKM,     // regularized SDP tuned by the rho path, global bandwidth
  LDKM,     // DKM on the local-scaling kernel
  LRDKM,    // RDKM on the local-scaling kernel
  SC_UN,
  SC_RWN,
  SC_NJW,
  LSC_UN,
  LSC_RWN,
  LSC_NJW,
  THRESH,   // connected components of {A_ij > gamma}
};

std::string to_string(Method m);
Method parse_method(const std::string& name);
bool is_localized(Method m);
bool is_regularized(Method m);
bool is_spectral(Method m);

struct ExperimentConfig {
  DgpSpec dgp = DgpSpec::dgp1(0.1);
  std::size_t n = 300;
  int replications = 50;
  std::vector<Method> methods{Method::DKM};
  std::optional<double> h;   // global bandwidth
  std::optional<int> k0;     // neighbour rank for local scaling
  double t_exponent = 2.0;   // t = ceil(n^t_exponent)
  std::optional<int> k;      // cluster count; defaults to the labels / DGP
  std::optional<double> gamma;  // THRESH level; oracle midpoint when absent
  SolverOptions solver;
  SelectionOptions selection;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  int jobs = 1;

  // k0 default: floor(log n), or floor(0.5 log n) for DGP 2.
  int effective_k0(std::size_t n_points) const;
  // With check_methods, also requires h for every global-bandwidth method.
  void validate(bool check_methods = true) const;
};

// Reads the JSON config schema documented in the README. Unknown keys are
// rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

// ceil(n^exponent), computed with a 1e-9 guard so exact powers stay exact.
long long diffusion_steps(std::size_t n, double exponent);
std::uint64_t replication_seed(std::uint64_t base, int replication);

KernelGraph build_graph(const ExperimentConfig& config, Method method,
                        const Eigen::MatrixXd& points);

// [max between-cluster A_ij, min over clusters of the bottleneck edge of the
// maximum spanning tree]. Any gamma strictly inside recovers the partition
// by thresholding.
std::pair<double, double> threshold_interval(const Eigen::MatrixXd& affinity,
                                             const Partition& truth);

// Streams JSON-lines diagnostics (stage timings, solver iterations).
using DiagnosticSink = std::function<void(const std::string&)>;

struct ClusterResult {
  Method method = Method::DKM;
  Partition partition;
  int k = 0;
  std::optional<double> l1_error;                // SDP methods with labels
  std::optional<double> classification_error;   // with labels
  std::optional<double> trace;
  std::optional<double> rho;                     // regularized methods
  std::optional<int> k_hat;                      // regularized methods
  std::optional<double> gamma;                   // THRESH
  int iterations = 0;
  bool converged = true;
  double wall_time = 0.0;
};

struct PathResult {
  RhoGrid grid;
  TuningPath path;
  std::optional<SelectionResult> selection;  // empty on selection failure
  std::string selection_error;
  long long t = 0;
  double wall_time = 0.0;
};

// Stage errors are rethrown with the stage name prefixed, keeping the type.
ClusterResult run_cluster(const ExperimentConfig& config, Method method,
                          const LabeledDataset& data, std::uint64_t seed,
                          const DiagnosticSink& sink = {});
PathResult run_path(const ExperimentConfig& config, Method method,
                    const LabeledDataset& data,
                    const DiagnosticSink& sink = {});

std::string cluster_result_json(const ClusterResult& r, bool with_timing);
std::string path_result_json(const PathResult& r, bool with_timing);

struct BenchmarkRow {
  Method method;
  int replications = 0;
  int failures = 0;
  int unconverged = 0;
  double mean_classification_error = 0.0;
  double mean_l1_error = 0.0;     // NaN when not applicable
  double exact_recovery_rate = 0.0;  // share with classification error 0
  double k_hat_success_rate = 0.0;   // regularized methods: share with K_hat = K
  double mean_wall_time = 0.0;
};

struct ReplicationRecord {
  Method method;
  int replication = 0;
  std::uint64_t seed = 0;
  std::optional<ClusterResult> result;
  std::string error;
};

struct BenchmarkResult {
  std::vector<BenchmarkRow> rows;
  std::vector<ReplicationRecord> records;
};

// Draws config.replications datasets and runs every configured method on
// each. Replications run on config.jobs threads; a failed replication is
// recorded and skipped in the aggregates.
BenchmarkResult run_benchmark(const ExperimentConfig& config,
                              const DiagnosticSink& sink = {});
void write_benchmark_csv(const BenchmarkResult& result, std::ostream& out,
                         bool with_timing);
void write_replications_csv(const BenchmarkResult& result, std::ostream& out,
                            bool with_timing);

}  // namespace dkm
