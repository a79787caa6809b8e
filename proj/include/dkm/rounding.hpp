#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "dkm/kmeans.hpp"
#include "dkm/partition.hpp"

namespace dkm {

// Z*_ij = 1/n_k when i and j share cluster k, else 0.
Eigen::MatrixXd membership_matrix(const Partition& p);

// Partition from an SDP solution: top-k eigenvectors of sym(Z), column l
// scaled by sqrt(max(lambda_l, 0)), then k-means on the rows. Clusters left
// empty by k-means (only possible with repeated rows) are dropped.
Partition round_solution(const Eigen::MatrixXd& z, int k, std::uint64_t seed,
                         const KMeansOptions& opts = {});

// n^{-1} sum_ij |Zhat_ij - Z*_ij|.
double l1_error(const Eigen::MatrixXd& z_hat, const Eigen::MatrixXd& z_star);

// n^{-1} sum_k |1_{Ghat_k} - 1_{G*_sigma(k)}|_1 minimised over label
// bijections sigma; the smaller partition is padded with empty clusters.
double classification_error(const Partition& estimate, const Partition& truth);

struct BruteForceResult {
  Partition partition;
  double objective = 0.0;
};

// max over partitions into exactly k nonempty blocks of
// sum_k |G_k|^{-1} sum_{i,j in G_k} A_ij. Ties go to the lexicographically
// smallest label vector. Throws SizeError beyond 10^6 candidate partitions.
BruteForceResult brute_force(const Eigen::MatrixXd& affinity, int k);

// Stirling number of the second kind, in floating point.
double stirling2(int n, int k);

// sum_k |G_k|^{-1} sum_{i,j in G_k} A_ij for a fixed partition.
double kmeans_objective(const Eigen::MatrixXd& affinity, const Partition& p);

}  // namespace dkm
