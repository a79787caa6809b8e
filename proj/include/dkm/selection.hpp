#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <vector>

#include "dkm/diffusion.hpp"
#include "dkm/sdp.hpp"

namespace dkm {

struct RhoGrid {
  std::vector<double> rhos;  // strictly increasing
  double lambda_min = 0.0;   // after flooring
  double lambda_max = 0.0;
  bool floor_applied = false;  // lambda_min was raised to 1e-12 lambda_max
};

// J-point geometric grid on [lambda_min(A)/n, lambda_max(A)/n].
RhoGrid rho_grid(const AffinityMatrix& a, int grid_size);
RhoGrid rho_grid(double lambda_min, double lambda_max, Eigen::Index n,
                 int grid_size);

struct PathOptions {
  SolverOptions solver;
  // Sequential sweep from the largest rho down, each solve warm-started from
  // the previous one. Otherwise every rho is solved cold on `jobs` threads.
  bool warm_start = true;
  int jobs = 1;
  bool keep_solutions = false;
};

struct TuningPath {
  std::vector<double> rhos;
  std::vector<double> traces;
  std::vector<bool> converged;
  std::vector<int> iterations;
  std::vector<SdpSolution> solutions;  // filled when keep_solutions is set

  std::size_t size() const { return rhos.size(); }
};

TuningPath tuning_path(const AffinityMatrix& a, const std::vector<double>& rhos,
                       const PathOptions& opts = {});

struct SelectionOptions {
  int grid_size = 40;
  int k_max = 10;
  double eps = 0.3;
};

struct SelectionResult {
  int k_hat = 0;
  double rho_hat = 0.0;
  std::size_t rho_hat_index = 0;  // 0-based position in the path
  // L_k for k = 2..k_max; -infinity when k has no flat stretch.
  std::map<int, double> interval_lengths;
  // 0-based (j_{k,1}, j_{k,2}) for eligible k.
  std::map<int, std::pair<std::size_t, std::size_t>> intervals;
  bool unconverged_in_path = false;
};

// Longest flat stretch of the trace path on the log-rho scale. For each k,
// j_{k,1} is the first index with trace <= k + eps and j_{k,2} the last with
// trace >= k - eps; k is eligible only when j_{k,2} > j_{k,1}. Ties in L_k go
// to the smaller k. Throws SelectionError when no k in [2, k_max] qualifies.
SelectionResult select(const TuningPath& path, int k_max, double eps);

// Columns rho, log_rho, trace, converged.
void write_path_csv(const TuningPath& path, std::ostream& out);

}  // namespace dkm
