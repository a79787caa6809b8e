#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "dkm/kernel.hpp"
#include "dkm/kmeans.hpp"
#include "dkm/partition.hpp"

namespace dkm {

enum class SpectralVariant {
  Unnormalized,  // SC-UN: bottom eigenvectors of L = D - K
  RandomWalk,    // SC-RWN: bottom generalized eigenvectors of (L, D)
  Symmetric,     // SC-NJW: I - D^{-1/2} K D^{-1/2}, rows normalized
};

std::string to_string(SpectralVariant v);

struct SpectralEmbedding {
  Eigen::MatrixXd rows;         // n x k
  Eigen::VectorXd eigenvalues;  // the k smallest Laplacian eigenvalues
};

SpectralEmbedding spectral_embedding(const KernelGraph& graph, int k,
                                     SpectralVariant variant);

// Embedding followed by the same k-means protocol used for rounding.
Partition spectral_cluster(const KernelGraph& graph, int k,
                           SpectralVariant variant, std::uint64_t seed,
                           const KMeansOptions& opts = {});

}  // namespace dkm
