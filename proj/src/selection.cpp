#include "dkm/selection.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dkm/errors.hpp"
#include "dkm/linalg.hpp"
#include "dkm/parallel.hpp"

namespace dkm {
namespace {

constexpr double kGridFloor = 1e-12;

}  // namespace

RhoGrid rho_grid(double lambda_min, double lambda_max, Eigen::Index n,
                 int grid_size) {
  if (grid_size < 2) throw ValidationError("rho_grid: J must be >= 2");
  if (n < 1) throw ValidationError("rho_grid: n must be >= 1");
  if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw ValidationError("rho_grid: affinity has no positive eigenvalue");
  }
  RhoGrid g;
  g.lambda_max = lambda_max;
  g.lambda_min = lambda_min;
  if (!(lambda_min >= kGridFloor * lambda_max)) {
    g.lambda_min = kGridFloor * lambda_max;
    g.floor_applied = true;
  }
  const auto nd = static_cast<double>(n);
  const double lo = std::log(g.lambda_min / nd);
  const double hi = std::log(g.lambda_max / nd);
  if (!(hi > lo)) {
    throw ValidationError("rho_grid: eigenvalue interval is degenerate");
  }
  g.rhos.resize(static_cast<std::size_t>(grid_size));
  for (int j = 0; j < grid_size; ++j) {
    g.rhos[static_cast<std::size_t>(j)] =
        std::exp(lo + (hi - lo) * j / (grid_size - 1));
  }
  g.rhos.front() = g.lambda_min / nd;
  g.rhos.back() = g.lambda_max / nd;
  return g;
}

RhoGrid rho_grid(const AffinityMatrix& a, int grid_size) {
  const auto eig = linalg::symmetric_eigen(linalg::symmetrize(a.values));
  return rho_grid(eig.values(0), eig.values(eig.values.size() - 1), a.size(),
                  grid_size);
}

TuningPath tuning_path(const AffinityMatrix& a, const std::vector<double>& rhos,
                       const PathOptions& opts) {
  if (rhos.empty()) throw ValidationError("tuning_path: empty grid");
  for (std::size_t j = 0; j < rhos.size(); ++j) {
    if (!(rhos[j] > 0.0) || (j > 0 && !(rhos[j] > rhos[j - 1]))) {
      throw ValidationError("tuning_path: grid must be positive and increasing");
    }
  }
  const std::size_t m = rhos.size();
  TuningPath path;
  path.rhos = rhos;
  path.traces.resize(m);
  path.converged.resize(m);
  path.iterations.resize(m);
  std::vector<SdpSolution> sols(m);

  if (opts.warm_start) {
    ConsensusSolver solver(opts.solver);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t j = m - 1 - r;
      sols[j] = solver.solve(SdpProblem::regularized(a, rhos[j]));
    }
  } else {
    parallel_for(m, opts.jobs, [&](std::size_t j) {
      sols[j] = solve(SdpProblem::regularized(a, rhos[j]), opts.solver);
    });
  }
  for (std::size_t j = 0; j < m; ++j) {
    path.traces[j] = sols[j].trace;
    path.converged[j] = sols[j].converged;
    path.iterations[j] = sols[j].iterations;
  }
  if (opts.keep_solutions) path.solutions = std::move(sols);
  return path;
}

SelectionResult select(const TuningPath& path, int k_max, double eps) {
  if (path.size() == 0) throw ValidationError("select: empty path");
  if (path.traces.size() != path.size()) {
    throw ValidationError("select: traces and rhos differ in length");
  }
  if (k_max < 2) throw ValidationError("select: k_max must be >= 2");
  if (!(eps > 0.0 && eps < 0.5)) {
    throw ValidationError("select: eps must lie in (0, 1/2)");
  }

  SelectionResult res;
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t m = path.size();
  for (int k = 2; k <= k_max; ++k) {
    std::size_t first = m, last = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (path.traces[j] <= k + eps) {
        first = j;
        break;
      }
    }
    for (std::size_t j = m; j-- > 0;) {
      if (path.traces[j] >= k - eps) {
        last = j;
        break;
      }
    }
    double len = -std::numeric_limits<double>::infinity();
    if (first < m && last < m && last > first) {
      len = std::log(path.rhos[last]) - std::log(path.rhos[first]);
      res.intervals[k] = {first, last};
    }
    res.interval_lengths[k] = len;
    if (len > best) {
      best = len;
      res.k_hat = k;
    }
  }
  if (res.k_hat == 0) {
    throw SelectionError(
        "no cluster count has a flat trace stretch; widen or refine the rho "
        "grid");
  }
  const auto [first, last] = res.intervals.at(res.k_hat);
  res.rho_hat_index = (first + last) / 2;
  res.rho_hat = path.rhos[res.rho_hat_index];
  for (bool c : path.converged) res.unconverged_in_path |= !c;
  return res;
}

void write_path_csv(const TuningPath& path, std::ostream& out) {
  out << "rho,log_rho,trace,converged\n";
  char buf[128];
  for (std::size_t j = 0; j < path.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.10e,%.10f,%.10f,%d\n", path.rhos[j],
                  std::log(path.rhos[j]), path.traces[j],
                  path.converged[j] ? 1 : 0);
    out << buf;
  }
}

}  // namespace dkm
