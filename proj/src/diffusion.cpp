#include "dkm/diffusion.hpp"

#include <algorithm>
#include <cmath>

#include "dkm/errors.hpp"
#include "dkm/linalg.hpp"

namespace dkm {
namespace {

constexpr double kLogUnderflow = -700.0;
constexpr long long kDirectPowerGuard = 10000;

void check_t(long long t) {
  if (t < 1) throw ValidationError("diffusion time t must be >= 1");
}

// lambda^p for p = t or 2t, in log space.
double power_weight(double lambda, double p) {
  if (lambda <= 0.0) return 0.0;
  const double e = p * std::log(lambda);
  return e < kLogUnderflow ? 0.0 : std::exp(e);
}

}  // namespace

Eigen::MatrixXd DiffusionSpectrum::right_eigenvectors() const {
  return degrees.cwiseSqrt().cwiseInverse().asDiagonal() * eigenvectors;
}

double diffusion_weight(double lambda, long long t) {
  return power_weight(lambda, 2.0 * static_cast<double>(t));
}

Eigen::MatrixXd normalized_kernel(const KernelGraph& graph) {
  if (!(graph.degrees.array() > 0.0).all()) {
    throw ValidationError("normalized_kernel: zero degree");
  }
  const Eigen::VectorXd s = graph.degrees.cwiseSqrt().cwiseInverse();
  return linalg::symmetrize(s.asDiagonal() * graph.weights * s.asDiagonal());
}

DiffusionSpectrum spectrum(const KernelGraph& graph) {
  const auto eig = linalg::symmetric_eigen(normalized_kernel(graph));
  const Eigen::Index n = eig.values.size();

  DiffusionSpectrum out;
  out.degrees = graph.degrees;
  out.eigenvalues = eig.values.reverse();
  out.eigenvectors = eig.vectors.rowwise().reverse();
  for (Eigen::Index l = 0; l < n; ++l) {
    double& v = out.eigenvalues(l);
    if (v < 0.0 || v > 1.0) {
      v = std::clamp(v, 0.0, 1.0);
      ++out.clamped;
    }
  }
  return out;
}

AffinityMatrix affinity(const DiffusionSpectrum& spec, long long t) {
  check_t(t);
  const Eigen::Index n = spec.size();
  const Eigen::MatrixXd psi = spec.right_eigenvectors();

  // Eigenvalues are sorted, so the surviving weights form a prefix.
  Eigen::VectorXd w(n);
  Eigen::Index active = 0;
  for (Eigen::Index l = 0; l < n; ++l) {
    w(l) = diffusion_weight(spec.eigenvalues(l), t);
    if (w(l) > 0.0) active = l + 1;
  }
  const auto cols = psi.leftCols(active);
  AffinityMatrix out;
  out.t = t;
  out.values = cols * w.head(active).asDiagonal() * cols.transpose();
  out.values = linalg::symmetrize(out.values);
  return out;
}

AffinityMatrix direct_affinity(const KernelGraph& graph, long long t) {
  check_t(t);
  if (t > kDirectPowerGuard) {
    throw ValidationError("direct_affinity: t exceeds the 10^4 cost guard");
  }
  const Eigen::MatrixXd p = transition_matrix(graph);
  Eigen::MatrixXd acc = p;
  for (long long s = 1; s < 2 * t; ++s) acc = (acc * p).eval();
  AffinityMatrix out;
  out.t = t;
  out.values = acc * graph.degrees.cwiseInverse().asDiagonal();
  return out;
}

Eigen::MatrixXd diffusion_map(const DiffusionSpectrum& spec, long long t,
                              Eigen::Index q) {
  check_t(t);
  if (q < 0 || q > spec.size() - 1) {
    throw ValidationError("diffusion_map: q must lie in [0, n-1]");
  }
  const Eigen::MatrixXd psi = spec.right_eigenvectors();
  Eigen::VectorXd w(q + 1);
  for (Eigen::Index l = 0; l <= q; ++l) {
    w(l) = power_weight(spec.eigenvalues(l), static_cast<double>(t));
  }
  return psi.leftCols(q + 1) * w.asDiagonal();
}

double diffusion_distance(const DiffusionSpectrum& spec, long long t,
                          Eigen::Index i, Eigen::Index j) {
  check_t(t);
  const Eigen::Index n = spec.size();
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw ValidationError("diffusion_distance: index out of range");
  }
  if (i == j) return 0.0;
  const Eigen::VectorXd& d = spec.degrees;
  const double si = 1.0 / std::sqrt(d(i)), sj = 1.0 / std::sqrt(d(j));
  double acc = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    const double diff =
        spec.eigenvectors(i, l) * si - spec.eigenvectors(j, l) * sj;
    acc += diffusion_weight(spec.eigenvalues(l), t) * diff * diff;
  }
  return std::sqrt(acc);
}

}  // namespace dkm
