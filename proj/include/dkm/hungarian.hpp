#pragma once

#include <Eigen/Dense>
#include <vector>

namespace dkm {

// Minimum-cost perfect matching on a square cost matrix. Returns col[row].
std::vector<int> hungarian_min_cost(const Eigen::MatrixXd& cost);

}  // namespace dkm
