#include "dkm/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dkm/errors.hpp"
#include "dkm/linalg.hpp"

namespace dkm {
namespace {

// V diag(w) V^T for selected columns.
Eigen::MatrixXd weighted_outer(const Eigen::MatrixXd& v,
                               const Eigen::VectorXd& w, Eigen::Index first,
                               Eigen::Index count) {
  const auto cols = v.middleCols(first, count);
  return cols * w.segment(first, count).asDiagonal() * cols.transpose();
}

std::optional<double> trace_target(const SdpMode& mode) {
  if (const auto* c = std::get_if<TraceConstraint>(&mode)) {
    return static_cast<double>(c->k);
  }
  return std::nullopt;
}

// Feasible starting point a I + b J with unit row sums and trace k.
Eigen::MatrixXd initial_point(Eigen::Index n, double k) {
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  const auto nd = static_cast<double>(n);
  const double a = (k - 1.0) / (nd - 1.0);
  const double b = (1.0 - a) / nd;
  return a * Eigen::MatrixXd::Identity(n, n) +
         b * Eigen::MatrixXd::Ones(n, n);
}

// Positive-part reconstruction. When the previous projection kept few
// eigenpairs, or dropped few, only that side of the spectrum is computed,
// which skips most of the back-transformation work.
Eigen::MatrixXd project_psd_hinted(const Eigen::MatrixXd& m,
                                   Eigen::Index& positive_hint) {
  const Eigen::MatrixXd s = linalg::symmetrize(m);
  const Eigen::Index n = s.rows();
  if (positive_hint >= 0 && 4 * positive_hint <= n) {
    const auto eig = linalg::symmetric_eigen_above(s, 0.0);
    positive_hint = eig.values.size();
    if (positive_hint == n) return s;
    return linalg::symmetrize(
        weighted_outer(eig.vectors, eig.values, 0, positive_hint));
  }
  if (positive_hint >= 0 && 4 * (n - positive_hint) <= n) {
    const auto eig = linalg::symmetric_eigen_at_most(s, 0.0);
    const Eigen::Index negative = eig.values.size();
    positive_hint = n - negative;
    if (negative == 0) return s;
    return linalg::symmetrize(
        s - weighted_outer(eig.vectors, eig.values, 0, negative));
  }
  const auto eig = linalg::symmetric_eigen(s);
  Eigen::Index negative = 0;
  while (negative < n && eig.values(negative) <= 0.0) ++negative;
  positive_hint = n - negative;
  if (negative == 0) return s;
  // Rebuild from whichever side of the spectrum is smaller.
  Eigen::MatrixXd out =
      negative <= n - negative
          ? Eigen::MatrixXd(s - weighted_outer(eig.vectors, eig.values, 0,
                                               negative))
          : weighted_outer(eig.vectors, eig.values, negative, n - negative);
  return linalg::symmetrize(out);
}

}  // namespace

SdpProblem SdpProblem::trace_constrained(const AffinityMatrix& a, int k) {
  SdpProblem p{a.values, TraceConstraint{k}};
  p.validate();
  return p;
}

SdpProblem SdpProblem::regularized(const AffinityMatrix& a, double rho) {
  SdpProblem p{a.values, TracePenalty{rho}};
  p.validate();
  return p;
}

void SdpProblem::validate() const {
  const Eigen::Index n = affinity.rows();
  if (n == 0 || affinity.cols() != n) {
    throw ValidationError("sdp: affinity must be square and nonempty");
  }
  if (!affinity.allFinite()) {
    throw ValidationError("sdp: affinity has non-finite entries");
  }
  if (const auto* c = std::get_if<TraceConstraint>(&mode)) {
    if (c->k < 1 || c->k > n) throw ValidationError("sdp: K must lie in [1, n]");
  } else if (!(std::get<TracePenalty>(mode).rho > 0.0)) {
    throw ValidationError("sdp: rho must be positive");
  }
}

void SolverOptions::validate() const {
  if (!(penalty > 0.0)) throw ValidationError("solver: penalty must be > 0");
  if (max_iters < 1) throw ValidationError("solver: max_iters must be >= 1");
  if (!(tol_primal > 0.0 && tol_dual > 0.0)) {
    throw ValidationError("solver: tolerances must be positive");
  }
  if (adapt_penalty && (adapt_interval < 1 || !(adapt_factor > 1.0) ||
                        !(adapt_ratio > 1.0))) {
    throw ValidationError("solver: invalid residual-balancing settings");
  }
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  Eigen::Index hint = -1;
  return project_psd_hinted(m, hint);
}

Eigen::MatrixXd project_affine(const Eigen::MatrixXd& m,
                               std::optional<double> trace_target) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw ValidationError("project_affine: matrix not square");
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);

  // Stationarity gives Z = S + y 1^T + 1 y^T + mu I; the row-sum and trace
  // conditions fix y and mu in closed form.
  const auto nd = static_cast<double>(n);
  Eigen::MatrixXd z = linalg::symmetrize(m);
  const Eigen::VectorXd row_sums = z.rowwise().sum();
  const double total = row_sums.sum();
  double mu = 0.0;
  if (trace_target) {
    mu = (*trace_target - z.trace() - 1.0 + total / nd) / (nd - 1.0);
  }
  const double a = (nd - total - nd * mu) / (2.0 * nd);
  const Eigen::VectorXd y =
      (Eigen::VectorXd::Ones(n) - row_sums).array() - (a + mu);
  const Eigen::VectorXd yn = y / nd;
  z.colwise() += yn;
  z.rowwise() += yn.transpose();
  z.diagonal().array() += mu;
  return z;
}

Eigen::MatrixXd project_nonneg(const Eigen::MatrixXd& m) {
  return m.cwiseMax(0.0);
}

ConsensusSolver::ConsensusSolver(SolverOptions opts) : opts_(std::move(opts)) {
  opts_.validate();
}

SdpSolution ConsensusSolver::solve(const SdpProblem& problem) {
  problem.validate();
  const Eigen::Index n = problem.size();
  const auto nd = static_cast<double>(n);
  const std::optional<double> target = trace_target(problem.mode);
  const double max_abs = problem.affinity.cwiseAbs().maxCoeff();
  const double scale = opts_.rescale && max_abs > 0.0 ? max_abs : 1.0;

  // Linear term of the maximisation on the rescaled problem.
  Eigen::MatrixXd c = linalg::symmetrize(problem.affinity) / scale;
  double rho = 0.0;
  if (const auto* pen = std::get_if<TracePenalty>(&problem.mode)) {
    rho = pen->rho;
    c.diagonal().array() -= nd * rho / scale;
  }

  if (!state_ || state_->z.rows() != n) {
    const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, n);
    state_ = State{initial_point(n, target.value_or(1.0)), zero, zero, zero,
                   opts_.penalty, scale, -1};
  } else if (state_->scale != scale) {
    const double f = state_->scale / scale;
    state_->u_psd *= f;
    state_->u_affine *= f;
    state_->u_nonneg *= f;
    state_->scale = scale;
  }
  State& st = *state_;

  auto original_objective = [&](const Eigen::MatrixXd& z) {
    double v = problem.affinity.cwiseProduct(z).sum();
    if (rho > 0.0) v -= nd * rho * z.trace();
    return v;
  };

  SdpSolution sol;
  Eigen::MatrixXd x_psd, x_affine, x_nonneg, z_prev;
  for (int it = 1; it <= opts_.max_iters; ++it) {
    x_psd = project_psd_hinted(st.z - st.u_psd, st.positive_hint);
    x_affine = project_affine(st.z - st.u_affine + c / st.penalty, target);
    x_nonneg = project_nonneg(st.z - st.u_nonneg);

    z_prev = st.z;
    st.z = (x_psd + st.u_psd + x_affine + st.u_affine + x_nonneg +
            st.u_nonneg) / 3.0;
    st.u_psd += x_psd - st.z;
    st.u_affine += x_affine - st.z;
    st.u_nonneg += x_nonneg - st.z;

    const double primal =
        std::sqrt((x_psd - st.z).squaredNorm() +
                  (x_affine - st.z).squaredNorm() +
                  (x_nonneg - st.z).squaredNorm()) / nd;
    const double dual =
        st.penalty * std::sqrt(3.0) * (st.z - z_prev).norm() / nd;
    if (!std::isfinite(primal) || !std::isfinite(dual)) {
      throw NumericalError("sdp: non-finite iterate at iteration " +
                           std::to_string(it));
    }
    sol.iterations = it;
    sol.primal_residual = primal;
    sol.dual_residual = dual;

    if (opts_.on_iteration && opts_.log_interval > 0 &&
        it % opts_.log_interval == 0) {
      opts_.on_iteration({it, primal, dual, original_objective(st.z),
                          st.penalty});
    }
    if (primal <= opts_.tol_primal && dual <= opts_.tol_dual) {
      sol.converged = true;
      break;
    }
    if (opts_.adapt_penalty && it % opts_.adapt_interval == 0) {
      double f = 1.0;
      if (primal > opts_.adapt_ratio * dual) f = opts_.adapt_factor;
      if (dual > opts_.adapt_ratio * primal) f = 1.0 / opts_.adapt_factor;
      if (f != 1.0) {
        st.penalty *= f;
        st.u_psd /= f;
        st.u_affine /= f;
        st.u_nonneg /= f;
      }
    }
  }

  // Clamping can move row sums by up to n times the residual, so alternate the
  // two projections until the equalities hold tightly again.
  sol.z = project_nonneg(project_affine(st.z, target));
  for (int round = 0; round < 100; ++round) {
    double slack = (sol.z.rowwise().sum().array() - 1.0).abs().maxCoeff();
    if (target) slack = std::max(slack, std::abs(sol.z.trace() - *target));
    if (slack <= 1e-10) break;
    sol.z = project_nonneg(project_affine(sol.z, target));
  }
  sol.trace = sol.z.trace();
  sol.objective = original_objective(sol.z);
  return sol;
}

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts) {
  ConsensusSolver solver(opts);
  return solver.solve(problem);
}

Partition threshold_estimator(const Eigen::MatrixXd& affinity, double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("threshold: gamma must be > 0");
  const Eigen::Index n = affinity.rows();
  if (affinity.cols() != n || n == 0) {
    throw ValidationError("threshold: affinity must be square and nonempty");
  }
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index i) {
    while (parent[static_cast<std::size_t>(i)] != i) {
      auto& p = parent[static_cast<std::size_t>(i)];
      p = parent[static_cast<std::size_t>(p)];
      i = p;
    }
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (affinity(i, j) > gamma) {
        const auto a = find(i), b = find(j);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
    }
  }
  std::vector<int> roots(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    roots[static_cast<std::size_t>(i)] = static_cast<int>(find(i));
  }
  return Partition::from_any_labels(roots);
}

}  // namespace dkm
