#pragma once

#include <Eigen/Dense>

#include "dkm/kernel.hpp"

namespace dkm {

// Eigendecomposition of S = D^{-1/2} K D^{-1/2}. Since P = D^{-1/2} S D^{1/2},
// S shares its eigenvalues with the transition matrix, and psi_l = D^{-1/2}
// phi_l are the right eigenvectors of P with unit L2(D) norm.
struct DiffusionSpectrum {
  Eigen::VectorXd eigenvalues;   // descending, clamped to [0, 1]
  Eigen::MatrixXd eigenvectors;  // orthonormal columns phi_l
  Eigen::VectorXd degrees;
  int clamped = 0;               // eigenvalues moved by the clamp

  Eigen::Index size() const { return eigenvalues.size(); }
  // Columns psi_l = D^{-1/2} phi_l.
  Eigen::MatrixXd right_eigenvectors() const;
};

// A = P^{2t} D^{-1}; `values` holds scale * A.
struct AffinityMatrix {
  Eigen::MatrixXd values;
  long long t = 1;
  double scale = 1.0;

  Eigen::Index size() const { return values.rows(); }
};

// S = D^{-1/2} K D^{-1/2}, symmetrized.
Eigen::MatrixXd normalized_kernel(const KernelGraph& graph);

DiffusionSpectrum spectrum(const KernelGraph& graph);

// Spectral route: A = sum_l lambda_l^{2t} psi_l psi_l^T, powers evaluated as
// exp(2t ln lambda) with a hard zero below e^{-700}.
AffinityMatrix affinity(const DiffusionSpectrum& spec, long long t);

// Test oracle: P multiplied 2t times, then D^{-1}. t <= 10^4.
AffinityMatrix direct_affinity(const KernelGraph& graph, long long t);

// n x (q+1) embedding; column l is lambda_l^t psi_l.
Eigen::MatrixXd diffusion_map(const DiffusionSpectrum& spec, long long t,
                              Eigen::Index q);

double diffusion_distance(const DiffusionSpectrum& spec, long long t,
                          Eigen::Index i, Eigen::Index j);

// lambda^{2t} with the clamping and underflow rule used by affinity().
double diffusion_weight(double lambda, long long t);

}  // namespace dkm
