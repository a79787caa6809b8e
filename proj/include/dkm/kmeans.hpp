#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dkm {

struct KMeansOptions {
  int restarts = 20;
  int max_iters = 300;
  double rel_tol = 1e-9;  // stop when inertia improves by less than this
};

struct KMeansResult {
  std::vector<int> labels;  // may leave clusters empty if rows repeat
  Eigen::MatrixXd centers;  // k x dim
  double inertia = 0.0;
};

// Lloyd's algorithm on the rows of `rows` with k-means++ seeding; the
// lowest-inertia restart wins. Deterministic in `seed`.
KMeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed,
                    const KMeansOptions& opts = {});

}  // namespace dkm
