#pragma once

#include <Eigen/Dense>
#include <variant>

namespace dkm {

struct GlobalBandwidth {
  double h;
};

struct LocalBandwidths {
  Eigen::VectorXd h;  // one per point
};

using Bandwidth = std::variant<GlobalBandwidth, LocalBandwidths>;

// Dense symmetric kernel matrix with unit diagonal and its degree vector.
struct KernelGraph {
  Eigen::MatrixXd weights;
  Eigen::VectorXd degrees;  // row sums of weights
  Bandwidth bandwidth;

  Eigen::Index size() const { return weights.rows(); }
};

// K_ij = exp(-|x_i - x_j|^2 / (2 h^2)).
KernelGraph gaussian_kernel(const Eigen::MatrixXd& points, double h);

// h_i = distance from x_i to its k0-th nearest neighbour, self excluded,
// ties broken by smaller index. Throws NumericalError if some h_i is zero.
Eigen::VectorXd local_bandwidths(const Eigen::MatrixXd& points, int k0);

// K_ij = exp(-|x_i - x_j|^2 / (2 h_i h_j)). Not PSD in general.
KernelGraph local_scaling_kernel(const Eigen::MatrixXd& points,
                                 const Eigen::VectorXd& h);

// Row-stochastic P = D^{-1} K.
Eigen::MatrixXd transition_matrix(const KernelGraph& graph);

// Squared Euclidean distances between rows.
Eigen::MatrixXd pairwise_sq_distances(const Eigen::MatrixXd& points);

}  // namespace dkm
