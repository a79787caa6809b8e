#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dkm/errors.hpp"
#include "dkm/linalg.hpp"
#include "dkm/selection.hpp"

using Eigen::MatrixXd;

namespace {

dkm::TuningPath make_path(const std::vector<double>& traces,
                          double ratio = 2.0) {
  dkm::TuningPath p;
  double rho = 1e-3;
  for (double t : traces) {
    p.rhos.push_back(rho);
    p.traces.push_back(t);
    p.converged.push_back(true);
    p.iterations.push_back(1);
    rho *= ratio;
  }
  return p;
}

MatrixXd random_pd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(i, j) = normal(rng);
  }
  return b * b.transpose() / n + 0.2 * MatrixXd::Identity(n, n);
}

}  // namespace

TEST(RhoGridTest, GeometricInterpolation) {
  const auto g = dkm::rho_grid(1e-4, 1e-2, 100, 3);
  ASSERT_EQ(g.rhos.size(), 3u);
  EXPECT_NEAR(g.rhos[0], 1e-6, 1e-18);
  EXPECT_NEAR(g.rhos[1], 1e-5, 1e-17);
  EXPECT_NEAR(g.rhos[2], 1e-4, 1e-16);
  EXPECT_FALSE(g.floor_applied);
}

TEST(RhoGridTest, TwoPointsAreEndpoints) {
  const auto g = dkm::rho_grid(0.5, 4.0, 2, 2);
  ASSERT_EQ(g.rhos.size(), 2u);
  EXPECT_DOUBLE_EQ(g.rhos[0], 0.25);
  EXPECT_DOUBLE_EQ(g.rhos[1], 2.0);
}

TEST(RhoGridTest, StrictlyIncreasingFromAffinity) {
  const MatrixXd a = random_pd(12, 3);
  const auto g = dkm::rho_grid(dkm::AffinityMatrix{a, 1, 1.0}, 40);
  ASSERT_EQ(g.rhos.size(), 40u);
  for (std::size_t j = 1; j < g.rhos.size(); ++j) {
    EXPECT_GT(g.rhos[j], g.rhos[j - 1]);
  }
  const auto eig = dkm::linalg::symmetric_eigen(a);
  EXPECT_NEAR(g.rhos.front(), eig.values(0) / 12, 1e-14);
  EXPECT_NEAR(g.rhos.back(), eig.values(11) / 12, 1e-14);
}

TEST(RhoGridTest, FloorForRankDeficientAffinity) {
  const MatrixXd a = MatrixXd::Constant(5, 5, 1.0);
  const auto g = dkm::rho_grid(dkm::AffinityMatrix{a, 1, 1.0}, 5);
  EXPECT_TRUE(g.floor_applied);
  EXPECT_NEAR(g.rhos.front() / g.rhos.back(), 1e-12, 1e-20);
}

TEST(RhoGridTest, RejectsBadInput) {
  EXPECT_THROW(dkm::rho_grid(1e-3, 1.0, 10, 1), dkm::ValidationError);
  EXPECT_THROW(dkm::rho_grid(0.0, 0.0, 10, 5), dkm::ValidationError);
  EXPECT_THROW(dkm::rho_grid(1.0, 1.0, 10, 5), dkm::ValidationError);
}

TEST(TuningPathTest, EndpointsAndMonotonicity) {
  const int n = 10;
  const MatrixXd a = random_pd(n, 5);
  const auto eig = dkm::linalg::symmetric_eigen(a);
  const double lo = 0.5 * eig.values(0) / n, hi = 2.0 * eig.values(n - 1) / n;
  std::vector<double> rhos;
  for (int j = 0; j < 12; ++j) rhos.push_back(lo * std::pow(hi / lo, j / 11.0));
  const auto path = dkm::tuning_path(dkm::AffinityMatrix{a, 1, 1.0}, rhos);
  EXPECT_NEAR(path.traces.front(), n, 1e-3);
  EXPECT_NEAR(path.traces.back(), 1.0, 1e-3);
  for (std::size_t j = 1; j < path.size(); ++j) {
    EXPECT_LE(path.traces[j], path.traces[j - 1] + 1e-3);
  }
}

TEST(TuningPathTest, ColdParallelAgreesWithWarmSweep) {
  const MatrixXd a = random_pd(8, 6);
  const std::vector<double> rhos{0.01, 0.05, 0.2};
  dkm::PathOptions cold;
  cold.warm_start = false;
  cold.jobs = 2;
  cold.keep_solutions = true;
  const dkm::AffinityMatrix am{a, 1, 1.0};
  const auto p1 = dkm::tuning_path(am, rhos);
  const auto p2 = dkm::tuning_path(am, rhos, cold);
  ASSERT_EQ(p2.solutions.size(), 3u);
  EXPECT_TRUE(p1.solutions.empty());
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_NEAR(p1.traces[j], p2.traces[j], 1e-4);
  }
}

TEST(TuningPathTest, RejectsUnsortedGrid) {
  const dkm::AffinityMatrix am{random_pd(4, 1), 1, 1.0};
  EXPECT_THROW(dkm::tuning_path(am, {0.2, 0.1}), dkm::ValidationError);
  EXPECT_THROW(dkm::tuning_path(am, {}), dkm::ValidationError);
  EXPECT_THROW(dkm::tuning_path(am, {-1.0, 0.1}), dkm::ValidationError);
}

TEST(SelectTest, IndexRulesOnShortPath) {
  const auto path = make_path({5.0, 3.1, 3.0, 2.9, 2.0, 1.0});
  const auto s = dkm::select(path, 5, 0.2);
  EXPECT_EQ(s.k_hat, 3);
  EXPECT_EQ(s.intervals.at(3), (std::pair<std::size_t, std::size_t>{1, 3}));
  EXPECT_EQ(s.rho_hat_index, 2u);
  EXPECT_DOUBLE_EQ(s.rho_hat, path.rhos[2]);
  EXPECT_NEAR(s.interval_lengths.at(3), 2 * std::log(2.0), 1e-12);
  EXPECT_TRUE(std::isinf(s.interval_lengths.at(2)));
  EXPECT_TRUE(std::isinf(s.interval_lengths.at(4)));
}

TEST(SelectTest, FlatPathAtOneFails) {
  const auto path = make_path({1.0, 1.0, 1.0, 1.0});
  EXPECT_THROW(dkm::select(path, 10, 0.3), dkm::SelectionError);
}

TEST(SelectTest, TwoPointGridFails) {
  const auto path = make_path({300.0, 1.0});
  EXPECT_THROW(dkm::select(path, 10, 0.3), dkm::SelectionError);
}

TEST(SelectTest, LongerThreeStretchBeatsTwo) {
  const auto path = make_path(
      {9.0, 6.0, 4.1, 3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 2.0, 2.0, 2.0, 1.0});
  const auto s = dkm::select(path, 10, 0.3);
  EXPECT_EQ(s.k_hat, 3);
  EXPECT_GT(s.interval_lengths.at(3), s.interval_lengths.at(2));
  EXPECT_GE(s.interval_lengths.at(2), 0.0);
}

TEST(SelectTest, TiesGoToSmallerK) {
  const auto path = make_path({4.0, 4.0, 3.0, 3.0, 2.0, 2.0, 1.0});
  const auto s = dkm::select(path, 10, 0.3);
  EXPECT_EQ(s.k_hat, 2);
  EXPECT_DOUBLE_EQ(s.interval_lengths.at(2), s.interval_lengths.at(4));
}

TEST(SelectTest, InvariantToCommonRhoScale) {
  auto path = make_path({7.0, 5.0, 3.0, 3.0, 3.0, 2.0, 2.0, 1.0}, 3.0);
  const auto s1 = dkm::select(path, 10, 0.3);
  for (double& r : path.rhos) r *= 1e-5;
  const auto s2 = dkm::select(path, 10, 0.3);
  EXPECT_EQ(s1.k_hat, s2.k_hat);
  EXPECT_EQ(s1.rho_hat_index, s2.rho_hat_index);
  for (const auto& [k, len] : s1.interval_lengths) {
    if (std::isfinite(len)) {
      EXPECT_NEAR(len, s2.interval_lengths.at(k), 1e-9);
    }
  }
}

TEST(SelectTest, FlagsUnconvergedEntries) {
  auto path = make_path({5.0, 3.0, 3.0, 3.0, 1.0});
  EXPECT_FALSE(dkm::select(path, 10, 0.3).unconverged_in_path);
  path.converged[0] = false;
  EXPECT_TRUE(dkm::select(path, 10, 0.3).unconverged_in_path);
}

TEST(SelectTest, RejectsBadArguments) {
  const auto path = make_path({3.0, 3.0, 1.0});
  EXPECT_THROW(dkm::select(path, 1, 0.3), dkm::ValidationError);
  EXPECT_THROW(dkm::select(path, 5, 0.5), dkm::ValidationError);
  EXPECT_THROW(dkm::select(path, 5, 0.0), dkm::ValidationError);
  EXPECT_THROW(dkm::select(dkm::TuningPath{}, 5, 0.3), dkm::ValidationError);
}

TEST(PathCsvTest, HeaderAndRows) {
  const auto path = make_path({3.0, 1.0});
  std::ostringstream out;
  dkm::write_path_csv(path, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "rho,log_rho,trace,converged");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}
