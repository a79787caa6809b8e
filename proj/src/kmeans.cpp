#include "dkm/kmeans.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "dkm/errors.hpp"

namespace dkm {
namespace {

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, int k,
                               std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(k, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  std::vector<bool> taken(static_cast<std::size_t>(n));
  Eigen::Index pick = first(rng);
  centers.row(0) = x.row(pick);
  taken[static_cast<std::size_t>(pick)] = true;

  Eigen::VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> draw(d2.data(),
                                                    d2.data() + n);
      pick = draw(rng);
    } else {
      // All remaining mass sits on existing centers: take any unused row.
      std::vector<Eigen::Index> free;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!taken[static_cast<std::size_t>(i)]) free.push_back(i);
      }
      std::uniform_int_distribution<std::size_t> u(0, free.size() - 1);
      pick = free[u(rng)];
    }
    taken[static_cast<std::size_t>(pick)] = true;
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin(
        (x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& x, Eigen::MatrixXd centers,
                   const KMeansOptions& opts) {
  const Eigen::Index n = x.rows();
  const auto k = centers.rows();
  KMeansResult res;
  res.labels.assign(static_cast<std::size_t>(n), -1);
  Eigen::VectorXd dist(n);
  double prev = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      const double d = (centers.rowwise() - x.row(i))
                           .rowwise()
                           .squaredNorm()
                           .minCoeff(&best);
      if (res.labels[static_cast<std::size_t>(i)] != best) changed = true;
      res.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
      dist(i) = d;
      inertia += d;
    }

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int l = res.labels[static_cast<std::size_t>(i)];
      sums.row(l) += x.row(i);
      ++counts(l);
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts(c) > 0) {
        centers.row(c) = sums.row(c) / counts(c);
        continue;
      }
      // Empty cluster: move it onto the worst-served point.
      Eigen::Index far = 0;
      if (dist.maxCoeff(&far) <= 0.0) continue;
      centers.row(c) = x.row(far);
      dist(far) = 0.0;
      changed = true;
    }

    res.inertia = inertia;
    if (!changed) break;
    if (std::isfinite(prev) && prev - inertia <= opts.rel_tol * prev) break;
    prev = inertia;
  }
  // Final assignment against the last centers.
  res.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    res.inertia += (centers.rowwise() - x.row(i))
                       .rowwise()
                       .squaredNorm()
                       .minCoeff(&best);
    res.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  res.centers = std::move(centers);
  return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed,
                    const KMeansOptions& opts) {
  if (k < 1 || k > rows.rows()) {
    throw ValidationError("kmeans: k must lie in [1, n]");
  }
  if (opts.restarts < 1 || opts.max_iters < 1) {
    throw ValidationError("kmeans: restarts and max_iters must be >= 1");
  }
  std::mt19937_64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < opts.restarts; ++r) {
    auto res = lloyd(rows, seed_plus_plus(rows, k, rng), opts);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

}  // namespace dkm
