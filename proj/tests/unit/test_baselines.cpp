#include <gtest/gtest.h>

#include "dkm/baselines.hpp"
#include "dkm/dataset.hpp"
#include "dkm/errors.hpp"
#include "dkm/kernel.hpp"
#include "dkm/rounding.hpp"

using Eigen::MatrixXd;

namespace {

const dkm::SpectralVariant kVariants[] = {dkm::SpectralVariant::Unnormalized,
                                          dkm::SpectralVariant::RandomWalk,
                                          dkm::SpectralVariant::Symmetric};

}  // namespace

TEST(SpectralClusterTest, FarSeparatedPairs) {
  MatrixXd x(4, 2);
  x << 0, 0, 0.1, 0, 50, 50, 50.1, 50;
  const auto graph = dkm::gaussian_kernel(x, 1.0);
  for (auto v : kVariants) {
    const auto p = dkm::spectral_cluster(graph, 2, v, 3);
    EXPECT_TRUE(p.equivalent(dkm::Partition({0, 0, 1, 1}, 2)))
        << dkm::to_string(v);
  }
}

TEST(SpectralClusterTest, IdentityKernelIsDeterministic) {
  MatrixXd x(5, 1);
  x << 0, 100, 200, 300, 400;
  const auto graph = dkm::gaussian_kernel(x, 1.0);
  for (auto v : kVariants) {
    const auto a = dkm::spectral_cluster(graph, 2, v, 17);
    const auto b = dkm::spectral_cluster(graph, 2, v, 17);
    EXPECT_EQ(a.labels(), b.labels());
  }
}

TEST(SpectralClusterTest, RejectsTooManyClusters) {
  const auto graph = dkm::gaussian_kernel(MatrixXd::Random(3, 2), 1.0);
  EXPECT_THROW(dkm::spectral_cluster(graph, 4, kVariants[0], 0),
               dkm::ValidationError);
}

TEST(SpectralEmbeddingTest, NormalizedRowsHaveUnitLength) {
  const auto data = dkm::generate(dkm::DgpSpec::dgp3(), 60, 4);
  const auto graph = dkm::gaussian_kernel(data.points, 1.0);
  const auto e =
      dkm::spectral_embedding(graph, 3, dkm::SpectralVariant::Symmetric);
  for (Eigen::Index i = 0; i < e.rows.rows(); ++i) {
    EXPECT_NEAR(e.rows.row(i).norm(), 1.0, 1e-10);
  }
}

TEST(SpectralEmbeddingTest, RandomWalkAndSymmetricEigenvaluesAgree) {
  const auto data = dkm::generate(dkm::DgpSpec::dgp3_prime(), 50, 5);
  const auto graph =
      dkm::local_scaling_kernel(data.points, dkm::local_bandwidths(data.points, 3));
  const auto rw =
      dkm::spectral_embedding(graph, 4, dkm::SpectralVariant::RandomWalk);
  const auto sym =
      dkm::spectral_embedding(graph, 4, dkm::SpectralVariant::Symmetric);
  EXPECT_LE((rw.eigenvalues - sym.eigenvalues).cwiseAbs().maxCoeff(), 1e-8);
  const MatrixXd lap = MatrixXd(graph.degrees.asDiagonal()) - graph.weights;
  const MatrixXd residual =
      lap * rw.rows -
      graph.degrees.asDiagonal() * rw.rows * rw.eigenvalues.asDiagonal();
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SpectralClusterTest, RecoversDeskScaleRings) {
  const auto data = dkm::generate(dkm::DgpSpec::dgp1(0.1), 300, 21);
  const auto graph = dkm::gaussian_kernel(data.points, 0.29);
  const dkm::Partition truth(*data.labels, 3);
  for (auto v : kVariants) {
    const auto p = dkm::spectral_cluster(graph, 3, v, 1);
    EXPECT_EQ(dkm::classification_error(p, truth), 0.0) << dkm::to_string(v);
  }
}
