#include "dkm/linalg.hpp"

#include <lapacke.h>

#include <limits>
#include <string>
#include <vector>

#include "dkm/errors.hpp"

namespace dkm::linalg {
namespace {

SymmetricEigen run_dsyevr(const Eigen::MatrixXd& m, char range, double vl,
                          double vu) {
  const auto n = static_cast<lapack_int>(m.rows());
  if (m.rows() != m.cols()) {
    throw ValidationError("symmetric_eigen: matrix is not square");
  }
  SymmetricEigen out;
  if (n == 0) return out;
  if (!m.allFinite()) {
    throw NumericalError("symmetric_eigen: non-finite matrix entries");
  }

  Eigen::MatrixXd work = m;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, n);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', range, 'L', n, work.data(), n, vl, vu, 0, 0, 0.0,
      &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0) {
    throw NumericalError("dsyevr failed to converge (info=" +
                         std::to_string(info) + ")");
  }
  out.values = w.head(found);
  out.vectors = z.leftCols(found);
  return out;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m) {
  return run_dsyevr(m, 'A', 0.0, 0.0);
}

SymmetricEigen symmetric_eigen_above(const Eigen::MatrixXd& m, double lower) {
  return run_dsyevr(m, 'V', lower, std::numeric_limits<double>::infinity());
}

SymmetricEigen symmetric_eigen_at_most(const Eigen::MatrixXd& m, double upper) {
  return run_dsyevr(m, 'V', -std::numeric_limits<double>::infinity(), upper);
}

}  // namespace dkm::linalg
