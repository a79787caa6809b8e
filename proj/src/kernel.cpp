#include "dkm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "dkm/errors.hpp"

namespace dkm {
namespace {

void check_points(const Eigen::MatrixXd& points) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw ValidationError("kernel: empty point set");
  }
  if (!points.allFinite()) {
    throw ValidationError("kernel: non-finite coordinates");
  }
}

KernelGraph finish(Eigen::MatrixXd weights, Bandwidth bw) {
  KernelGraph g;
  g.degrees = weights.rowwise().sum();
  g.weights = std::move(weights);
  g.bandwidth = std::move(bw);
  return g;
}

}  // namespace

Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d2(n, n);
  // Direct differences rather than the Gram expansion: keeps d2 exactly
  // symmetric with an exact zero diagonal.
  for (Eigen::Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (points.row(i) - points.row(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

KernelGraph gaussian_kernel(const Eigen::MatrixXd& points, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw ValidationError("gaussian_kernel: bandwidth must be positive");
  }
  check_points(points);
  // Same per-entry expression as local_scaling_kernel, so constant local
  // bandwidths reproduce this matrix bit for bit.
  Eigen::MatrixXd k = (-pairwise_sq_distances(points) / (2.0 * h * h))
                          .array()
                          .exp();
  return finish(std::move(k), GlobalBandwidth{h});
}

Eigen::VectorXd local_bandwidths(const Eigen::MatrixXd& points, int k0) {
  check_points(points);
  const Eigen::Index n = points.rows();
  if (k0 < 1 || k0 > n - 1) {
    throw ValidationError("local_bandwidths: k0 must lie in [1, n-1]");
  }
  const Eigen::MatrixXd d2 = pairwise_sq_distances(points);
  Eigen::VectorXd h(n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n - 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order[m++] = j;
    }
    const auto nth = order.begin() + (k0 - 1);
    std::nth_element(order.begin(), nth, order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       const double da = d2(i, a), db = d2(i, b);
                       return da < db || (da == db && a < b);
                     });
    h(i) = std::sqrt(d2(i, *nth));
    if (!(h(i) > 0.0)) {
      throw NumericalError("local_bandwidths: point " + std::to_string(i) +
                           " has a zero-distance k0-th neighbour");
    }
  }
  return h;
}

KernelGraph local_scaling_kernel(const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& h) {
  check_points(points);
  if (h.size() != points.rows()) {
    throw ValidationError("local_scaling_kernel: one bandwidth per point");
  }
  if (!((h.array() > 0.0).all() && h.allFinite())) {
    throw ValidationError("local_scaling_kernel: bandwidths must be positive");
  }
  const Eigen::Index n = points.rows();
  const Eigen::MatrixXd d2 = pairwise_sq_distances(points);
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::exp(-d2(i, j) / (2.0 * h(i) * h(j)));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return finish(std::move(k), LocalBandwidths{h});
}

Eigen::MatrixXd transition_matrix(const KernelGraph& graph) {
  if (!(graph.degrees.array() > 0.0).all()) {
    throw ValidationError("transition_matrix: zero degree");
  }
  return graph.degrees.cwiseInverse().asDiagonal() * graph.weights;
}

}  // namespace dkm
