#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <variant>

#include "dkm/diffusion.hpp"
#include "dkm/partition.hpp"

namespace dkm {

// max <A, Z> over C_K = {Z = Z^T, Z >= 0 (PSD), tr Z = K, Z 1 = 1, Z >= 0}.
struct TraceConstraint {
  int k;
};

// max <A, Z> - n rho tr Z over C (no trace constraint).
struct TracePenalty {
  double rho;
};

using SdpMode = std::variant<TraceConstraint, TracePenalty>;

struct SdpProblem {
  Eigen::MatrixXd affinity;  // symmetric n x n
  SdpMode mode;

  static SdpProblem trace_constrained(const AffinityMatrix& a, int k);
  static SdpProblem regularized(const AffinityMatrix& a, double rho);

  Eigen::Index size() const { return affinity.rows(); }
  void validate() const;
};

struct IterationLog {
  int iteration;
  double primal_residual;
  double dual_residual;
  double objective;  // original scale, at the consensus iterate
  double penalty;
};

struct SolverOptions {
  double penalty = 1.0;  // ADMM step, on the rescaled problem
  int max_iters = 20000;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  bool rescale = true;        // divide A (and rho) by max |A_ij|
  bool adapt_penalty = true;  // residual balancing
  int adapt_interval = 50;
  double adapt_ratio = 10.0;
  double adapt_factor = 2.0;
  int log_interval = 0;  // call on_iteration every this many iterations
  std::function<void(const IterationLog&)> on_iteration;

  void validate() const;
};

struct SdpSolution {
  Eigen::MatrixXd z;
  double objective = 0.0;  // <A,Z> or <A,Z> - n rho tr Z, original scale
  double trace = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

// Frobenius projections onto the three constraint sets.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m);
// {Z = Z^T, Z 1 = 1} intersected with {tr Z = trace_target} when given.
Eigen::MatrixXd project_affine(const Eigen::MatrixXd& m,
                               std::optional<double> trace_target = {});
Eigen::MatrixXd project_nonneg(const Eigen::MatrixXd& m);

// Three-set consensus ADMM. Keeps its iterates between calls, so solving a
// sequence of nearby problems of equal size warm-starts each from the last.
class ConsensusSolver {
 public:
  explicit ConsensusSolver(SolverOptions opts = {});

  SdpSolution solve(const SdpProblem& problem);
  void reset() { state_.reset(); }
  const SolverOptions& options() const { return opts_; }

 private:
  struct State {
    Eigen::MatrixXd z;
    Eigen::MatrixXd u_psd, u_affine, u_nonneg;
    double penalty;
    double scale;
    Eigen::Index positive_hint = -1;
  };

  SolverOptions opts_;
  std::optional<State> state_;
};

// Cold-started solve.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts = {});

// Connected components of the graph with an edge wherever A_ij > gamma.
Partition threshold_estimator(const Eigen::MatrixXd& affinity, double gamma);

}  // namespace dkm
