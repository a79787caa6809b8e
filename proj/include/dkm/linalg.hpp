#pragma once

#include <Eigen/Dense>

namespace dkm::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
};

// Full eigendecomposition of a symmetric matrix (lower triangle is read).
// Throws NumericalError if LAPACK does not converge.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

// Eigenpairs with eigenvalue strictly above `lower`, ascending.
SymmetricEigen symmetric_eigen_above(const Eigen::MatrixXd& m, double lower);

// Eigenpairs with eigenvalue at most `upper`, ascending.
SymmetricEigen symmetric_eigen_at_most(const Eigen::MatrixXd& m, double upper);

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace dkm::linalg
