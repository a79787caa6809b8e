#include "dkm/baselines.hpp"

#include "dkm/diffusion.hpp"
#include "dkm/errors.hpp"
#include "dkm/linalg.hpp"

namespace dkm {

std::string to_string(SpectralVariant v) {
  switch (v) {
    case SpectralVariant::Unnormalized: return "UN";
    case SpectralVariant::RandomWalk: return "RWN";
    case SpectralVariant::Symmetric: return "NJW";
  }
  return "?";
}

SpectralEmbedding spectral_embedding(const KernelGraph& graph, int k,
                                     SpectralVariant variant) {
  const Eigen::Index n = graph.size();
  if (k < 1 || k > n) throw ValidationError("spectral: k must lie in [1, n]");

  SpectralEmbedding out;
  if (variant == SpectralVariant::Unnormalized) {
    Eigen::MatrixXd lap = -graph.weights;
    lap.diagonal() += graph.degrees;
    const auto eig = linalg::symmetric_eigen(linalg::symmetrize(lap));
    out.rows = eig.vectors.leftCols(k);
    out.eigenvalues = eig.values.head(k);
    return out;
  }

  // Both normalized variants come from the symmetric S = D^{-1/2} K D^{-1/2}:
  // the bottom of I - S is the top of S.
  const auto eig = linalg::symmetric_eigen(normalized_kernel(graph));
  out.eigenvalues = (1.0 - eig.values.tail(k).reverse().array()).matrix();
  Eigen::MatrixXd phi = eig.vectors.rightCols(k).rowwise().reverse();
  if (variant == SpectralVariant::RandomWalk) {
    out.rows = graph.degrees.cwiseSqrt().cwiseInverse().asDiagonal() * phi;
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = phi.row(i).norm();
    if (norm > 0.0) phi.row(i) /= norm;
  }
  out.rows = std::move(phi);
  return out;
}

Partition spectral_cluster(const KernelGraph& graph, int k,
                           SpectralVariant variant, std::uint64_t seed,
                           const KMeansOptions& opts) {
  const auto embed = spectral_embedding(graph, k, variant);
  return Partition::from_any_labels(kmeans(embed.rows, k, seed, opts).labels);
}

}  // namespace dkm
