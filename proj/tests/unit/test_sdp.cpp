#include <gtest/gtest.h>

#include <random>

#include "dkm/errors.hpp"
#include "dkm/linalg.hpp"
#include "dkm/rounding.hpp"
#include "dkm/sdp.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

MatrixXd random_symmetric(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = normal(rng);
  }
  return dkm::linalg::symmetrize(m);
}

MatrixXd random_pd(int n, std::uint64_t seed) {
  const MatrixXd b = random_symmetric(n, seed);
  return b * b.transpose() / n + 0.1 * MatrixXd::Identity(n, n);
}

dkm::AffinityMatrix wrap(const MatrixXd& a) { return {a, 1, 1.0}; }

// Two tight groups far apart, plus symmetric noise.
MatrixXd two_block_affinity(int half, double noise, std::uint64_t seed) {
  const int n = 2 * half;
  MatrixXd a = MatrixXd::Zero(n, n);
  a.topLeftCorner(half, half).setOnes();
  a.bottomRightCorner(half, half).setOnes();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double e = noise * unif(rng);
      a(i, j) += e;
      if (i != j) a(j, i) += e;
    }
  }
  return a;
}

void expect_feasible(const dkm::SdpSolution& s, std::optional<int> k) {
  const double tol = 1e-6;
  const Eigen::Index n = s.z.rows();
  EXPECT_LE(max_abs(s.z - s.z.transpose()), tol);
  EXPECT_GE(dkm::linalg::symmetric_eigen(s.z).values(0), -tol);
  EXPECT_LE((s.z.rowwise().sum().array() - 1.0).abs().maxCoeff(), tol);
  EXPECT_GE(s.z.minCoeff(), -tol);
  if (k) {
    EXPECT_LE(std::abs(s.z.trace() - *k), tol * *k);
  }
  EXPECT_EQ(s.z.rows(), n);
}

// Minimizes |Z - M|_F^2 subject to symmetry, Z 1 = 1 and optionally tr Z = c
// by solving the KKT system directly on vec(Z).
MatrixXd affine_projection_oracle(const MatrixXd& m, std::optional<double> c) {
  const int n = static_cast<int>(m.rows());
  const int vars = n * n;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  auto idx = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      VectorXd r = VectorXd::Zero(vars);
      r(idx(i, j)) = 1;
      r(idx(j, i)) = -1;
      rows.push_back(r);
      rhs.push_back(0);
    }
  }
  for (int i = 0; i < n; ++i) {
    VectorXd r = VectorXd::Zero(vars);
    for (int j = 0; j < n; ++j) r(idx(i, j)) = 1;
    rows.push_back(r);
    rhs.push_back(1);
  }
  if (c) {
    VectorXd r = VectorXd::Zero(vars);
    for (int i = 0; i < n; ++i) r(idx(i, i)) = 1;
    rows.push_back(r);
    rhs.push_back(*c);
  }
  const int m_rows = static_cast<int>(rows.size());
  MatrixXd kkt = MatrixXd::Zero(vars + m_rows, vars + m_rows);
  VectorXd b(vars + m_rows);
  kkt.topLeftCorner(vars, vars).setIdentity();
  for (int r = 0; r < m_rows; ++r) {
    kkt.block(vars + r, 0, 1, vars) = rows[r].transpose();
    kkt.block(0, vars + r, vars, 1) = rows[r];
    b(vars + r) = rhs[r];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) b(idx(i, j)) = m(i, j);
  }
  const VectorXd sol = kkt.completeOrthogonalDecomposition().solve(b);
  MatrixXd z(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = sol(idx(i, j));
  }
  return z;
}

}  // namespace

TEST(ProjectPsdTest, PsdInputUnchanged) {
  const MatrixXd a = random_pd(8, 1);
  EXPECT_LE(max_abs(dkm::project_psd(a) - a), 1e-10);
}

TEST(ProjectPsdTest, TruncatesNegativeEigenvalues) {
  MatrixXd m(2, 2);
  m << 1, 0, 0, -1;
  MatrixXd expected(2, 2);
  expected << 1, 0, 0, 0;
  EXPECT_LE(max_abs(dkm::project_psd(m) - expected), 1e-14);
}

TEST(ProjectPsdTest, MatchesFullEigenTruncation) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MatrixXd m = random_symmetric(12, seed);
    const auto eig = dkm::linalg::symmetric_eigen(m);
    const MatrixXd expected = eig.vectors *
                              eig.values.cwiseMax(0.0).asDiagonal() *
                              eig.vectors.transpose();
    const MatrixXd p = dkm::project_psd(m);
    EXPECT_LE(max_abs(p - expected), 1e-10);
    EXPECT_LE(max_abs(dkm::project_psd(p) - p), 1e-10);
  }
}

TEST(LinalgTest, PartialSpectraMatchFull) {
  const MatrixXd m = random_symmetric(25, 12);
  const auto full = dkm::linalg::symmetric_eigen(m);
  const auto above = dkm::linalg::symmetric_eigen_above(m, 0.5);
  const auto below = dkm::linalg::symmetric_eigen_at_most(m, 0.5);
  ASSERT_EQ(above.values.size() + below.values.size(), 25);
  EXPECT_LE((below.values - full.values.head(below.values.size()))
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  EXPECT_LE((above.values - full.values.tail(above.values.size()))
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  EXPECT_GT(above.values.minCoeff(), 0.5);
}

TEST(ProjectAffineTest, FeasibleInputsUnchanged) {
  MatrixXd z = MatrixXd::Zero(4, 4);
  z.topLeftCorner(2, 2).setConstant(0.5);
  z.bottomRightCorner(2, 2).setConstant(0.5);
  EXPECT_LE(max_abs(dkm::project_affine(z, 2.0) - z), 1e-12);
  const MatrixXd j = MatrixXd::Constant(5, 5, 0.2);
  EXPECT_LE(max_abs(dkm::project_affine(j) - j), 1e-12);
}

TEST(ProjectAffineTest, MatchesQuadraticProgramOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    MatrixXd m(4, 4);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) m(i, j) = normal(rng);
    }
    for (std::optional<double> c : {std::optional<double>{}, {2.0}}) {
      const MatrixXd p = dkm::project_affine(m, c);
      EXPECT_LE(max_abs(p - p.transpose()), 1e-12);
      EXPECT_LE((p.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
      if (c) {
        EXPECT_NEAR(p.trace(), *c, 1e-12);
      }
      EXPECT_LE(max_abs(p - affine_projection_oracle(m, c)), 1e-10);
      EXPECT_LE(max_abs(dkm::project_affine(p, c) - p), 1e-12);
    }
  }
}

TEST(ProjectNonnegTest, ClampsEntrywise) {
  MatrixXd m(2, 2);
  m << -1, 2, 0.5, -1e-9;
  MatrixXd expected(2, 2);
  expected << 0, 2, 0.5, 0;
  EXPECT_EQ(dkm::project_nonneg(m), expected);
  const MatrixXd pos = MatrixXd::Constant(3, 3, 0.3);
  EXPECT_EQ(dkm::project_nonneg(pos), pos);
  EXPECT_EQ(dkm::project_nonneg(dkm::project_nonneg(m)), dkm::project_nonneg(m));
}

TEST(SolveTest, TraceConstrainedRecoversBlocks) {
  const MatrixXd a = 0.01 * two_block_affinity(2, 1e-3, 4);
  const auto s = dkm::solve(dkm::SdpProblem::trace_constrained(wrap(a), 2));
  EXPECT_TRUE(s.converged);
  MatrixXd expected = MatrixXd::Zero(4, 4);
  expected.topLeftCorner(2, 2).setConstant(0.5);
  expected.bottomRightCorner(2, 2).setConstant(0.5);
  EXPECT_LE(max_abs(s.z - expected), 1e-4);
  EXPECT_NEAR(s.trace, 2.0, 1e-6);
  expect_feasible(s, 2);
  const auto bf = dkm::brute_force(a, 2);
  EXPECT_TRUE(dkm::round_solution(s.z, 2, 0).equivalent(bf.partition));
}

TEST(SolveTest, LargePenaltyGivesAveragingMatrix) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const MatrixXd a = random_pd(10, seed);
    const auto eig = dkm::linalg::symmetric_eigen(a);
    const double rho = 2 * eig.values(9) / 10;
    const auto s = dkm::solve(dkm::SdpProblem::regularized(wrap(a), rho));
    EXPECT_LE(max_abs(s.z - MatrixXd::Constant(10, 10, 0.1)), 1e-4);
  }
}

TEST(SolveTest, SmallPenaltyGivesIdentity) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const MatrixXd a = random_pd(10, seed);
    const auto eig = dkm::linalg::symmetric_eigen(a);
    const double rho = eig.values(0) / 2 / 10;
    const auto s = dkm::solve(dkm::SdpProblem::regularized(wrap(a), rho));
    EXPECT_LE(max_abs(s.z - MatrixXd::Identity(10, 10)), 1e-4);
  }
}

TEST(SolveTest, TraceNonIncreasingInRho) {
  const MatrixXd a = random_pd(12, 7);
  const auto eig = dkm::linalg::symmetric_eigen(a);
  const double lo = eig.values(0) / 12, hi = eig.values(11) / 12;
  double previous = 1e300;
  for (int j = 0; j < 8; ++j) {
    const double rho = lo * std::pow(hi / lo, j / 7.0);
    const auto s = dkm::solve(dkm::SdpProblem::regularized(wrap(a), rho));
    EXPECT_LE(s.trace, previous + 1e-4);
    previous = s.trace;
  }
}

TEST(SolveTest, RelaxationBoundsIntegerOptimum) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const int n = 5 + static_cast<int>(seed % 3);
    const MatrixXd a = random_pd(n, 100 + seed);
    for (int k : {2, 3}) {
      const auto s = dkm::solve(dkm::SdpProblem::trace_constrained(wrap(a), k));
      const auto bf = dkm::brute_force(a, k);
      EXPECT_GE(s.objective, bf.objective - 1e-6) << "seed " << seed;
    }
  }
}

TEST(SolveTest, TraceConstrainedIsScaleInvariant) {
  const MatrixXd a = random_pd(8, 21);
  const auto s1 = dkm::solve(dkm::SdpProblem::trace_constrained(wrap(a), 3));
  const auto s2 =
      dkm::solve(dkm::SdpProblem::trace_constrained(wrap(250.0 * a), 3));
  EXPECT_LE(max_abs(s1.z - s2.z), 1e-5);
  EXPECT_NEAR(s2.objective, 250.0 * s1.objective, 1e-6 * std::abs(s2.objective));
}

TEST(SolveTest, ConvergedSolutionsAreFeasible) {
  const MatrixXd a = random_pd(15, 31);
  const auto t = dkm::solve(dkm::SdpProblem::trace_constrained(wrap(a), 4));
  ASSERT_TRUE(t.converged);
  expect_feasible(t, 4);
  const auto r = dkm::solve(dkm::SdpProblem::regularized(wrap(a), 0.01));
  ASSERT_TRUE(r.converged);
  expect_feasible(r, std::nullopt);
}

TEST(SolveTest, IterationCapFlagsNonConvergence) {
  dkm::SolverOptions opts;
  opts.max_iters = 3;
  const auto s = dkm::solve(
      dkm::SdpProblem::trace_constrained(wrap(random_pd(10, 5)), 3), opts);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 3);
}

TEST(SolveTest, ReportsIterationLogs) {
  dkm::SolverOptions opts;
  opts.log_interval = 10;
  int calls = 0;
  opts.on_iteration = [&](const dkm::IterationLog& log) {
    EXPECT_EQ(log.iteration % 10, 0);
    ++calls;
  };
  const auto s = dkm::solve(
      dkm::SdpProblem::trace_constrained(wrap(random_pd(6, 2)), 2), opts);
  EXPECT_EQ(calls, s.iterations / 10);
}

TEST(SolveTest, WarmStartMatchesColdSolve) {
  const MatrixXd a = random_pd(10, 13);
  dkm::ConsensusSolver solver;
  solver.solve(dkm::SdpProblem::regularized(wrap(a), 0.02));
  const auto warm = solver.solve(dkm::SdpProblem::regularized(wrap(a), 0.03));
  const auto cold = dkm::solve(dkm::SdpProblem::regularized(wrap(a), 0.03));
  EXPECT_NEAR(warm.trace, cold.trace, 1e-4);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-6);
}

TEST(SolveTest, RejectsInvalidProblems) {
  const MatrixXd a = random_pd(4, 1);
  EXPECT_THROW(dkm::solve(dkm::SdpProblem::trace_constrained(wrap(a), 0)),
               dkm::ValidationError);
  EXPECT_THROW(dkm::solve(dkm::SdpProblem::trace_constrained(wrap(a), 5)),
               dkm::ValidationError);
  EXPECT_THROW(dkm::solve(dkm::SdpProblem::regularized(wrap(a), 0.0)),
               dkm::ValidationError);
  EXPECT_THROW(dkm::solve(dkm::SdpProblem::regularized(wrap(MatrixXd(2, 3)), 1)),
               dkm::ValidationError);
  MatrixXd bad = a;
  bad(0, 0) = std::nan("");
  EXPECT_THROW(dkm::solve(dkm::SdpProblem::regularized(wrap(bad), 1.0)),
               dkm::ValidationError);
  dkm::SolverOptions opts;
  opts.tol_primal = 0.0;
  EXPECT_THROW(dkm::solve(dkm::SdpProblem::regularized(wrap(a), 1.0), opts),
               dkm::ValidationError);
}

TEST(ThresholdTest, BlockMatrixRecoversPartition) {
  MatrixXd a = MatrixXd::Zero(5, 5);
  a.topLeftCorner(3, 3).setConstant(1.0 / 3);
  a.bottomRightCorner(2, 2).setConstant(1.0 / 2);
  const auto p = dkm::threshold_estimator(a, 0.1);
  EXPECT_TRUE(p.equivalent(dkm::Partition({0, 0, 0, 1, 1}, 2)));
}

TEST(ThresholdTest, HighLevelGivesSingletons) {
  const MatrixXd a = MatrixXd::Constant(4, 4, 0.25);
  const auto p = dkm::threshold_estimator(a, 1.0);
  EXPECT_EQ(p.k(), 4);
  EXPECT_THROW(dkm::threshold_estimator(a, 0.0), dkm::ValidationError);
}
