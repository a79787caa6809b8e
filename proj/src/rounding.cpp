#include "dkm/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dkm/errors.hpp"
#include "dkm/hungarian.hpp"
#include "dkm/linalg.hpp"

namespace dkm {
namespace {

constexpr double kBruteForceGuard = 1e6;

struct Enumerator {
  const Eigen::MatrixXd& a;
  int n;
  int k;
  std::vector<int> labels;
  std::vector<int> best_labels;
  double best = -std::numeric_limits<double>::infinity();

  double objective() const {
    std::vector<double> within(static_cast<std::size_t>(k));
    std::vector<int> size(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) {
      const auto li = static_cast<std::size_t>(labels[i]);
      ++size[li];
      for (int j = 0; j < n; ++j) {
        if (labels[j] == labels[i]) within[li] += a(i, j);
      }
    }
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
      total += within[static_cast<std::size_t>(c)] / size[static_cast<std::size_t>(c)];
    }
    return total;
  }

  // Restricted growth strings in lexicographic order.
  void visit(int pos, int used) {
    if (pos == n) {
      if (used != k) return;
      const double v = objective();
      if (v > best) {
        best = v;
        best_labels = labels;
      }
      return;
    }
    for (int l = 0; l <= std::min(used, k - 1); ++l) {
      const int now = std::max(used, l + 1);
      if (now + (n - pos - 1) < k) continue;
      labels[static_cast<std::size_t>(pos)] = l;
      visit(pos + 1, now);
    }
  }
};

}  // namespace

Eigen::MatrixXd membership_matrix(const Partition& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  const auto sizes = p.cluster_sizes();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const int li = p[static_cast<std::size_t>(i)];
      if (li == p[static_cast<std::size_t>(j)]) {
        z(i, j) = 1.0 / static_cast<double>(sizes[static_cast<std::size_t>(li)]);
      }
    }
  }
  return z;
}

Partition round_solution(const Eigen::MatrixXd& z, int k, std::uint64_t seed,
                         const KMeansOptions& opts) {
  const Eigen::Index n = z.rows();
  if (z.cols() != n || n == 0) {
    throw ValidationError("round: Z must be square and nonempty");
  }
  if (k < 1 || k > n) throw ValidationError("round: k must lie in [1, n]");
  const double asym = (z - z.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
    throw ValidationError("round: Z is not symmetric");
  }
  const auto eig = linalg::symmetric_eigen(linalg::symmetrize(z));
  Eigen::MatrixXd embed = eig.vectors.rightCols(k);
  for (int c = 0; c < k; ++c) {
    embed.col(c) *= std::sqrt(std::max(eig.values(n - k + c), 0.0));
  }
  const auto km = kmeans(embed, k, seed, opts);
  return Partition::from_any_labels(km.labels);
}

double l1_error(const Eigen::MatrixXd& z_hat, const Eigen::MatrixXd& z_star) {
  if (z_hat.rows() != z_star.rows() || z_hat.cols() != z_star.cols()) {
    throw ValidationError("l1_error: shape mismatch");
  }
  return (z_hat - z_star).cwiseAbs().sum() / static_cast<double>(z_hat.rows());
}

double classification_error(const Partition& estimate, const Partition& truth) {
  if (estimate.size() != truth.size()) {
    throw ValidationError("classification_error: partitions differ in size");
  }
  const std::size_t n = estimate.size();
  if (n == 0) return 0.0;
  const int m = std::max(estimate.k(), truth.k());
  Eigen::MatrixXd overlap = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t i = 0; i < n; ++i) overlap(estimate[i], truth[i]) += 1.0;
  const auto match = hungarian_min_cost(-overlap);
  double matched = 0.0;
  for (int r = 0; r < m; ++r) matched += overlap(r, match[static_cast<std::size_t>(r)]);
  const auto nd = static_cast<double>(n);
  return 2.0 * (nd - matched) / nd;
}

double stirling2(int n, int k) {
  if (k < 0 || n < 0) return 0.0;
  std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
  row[0] = 1.0;  // S(0,0)
  for (int i = 1; i <= n; ++i) {
    for (int j = std::min(i, k); j >= 1; --j) {
      row[static_cast<std::size_t>(j)] =
          j * row[static_cast<std::size_t>(j)] + row[static_cast<std::size_t>(j) - 1];
    }
    row[0] = 0.0;
  }
  return row[static_cast<std::size_t>(k)];
}

double kmeans_objective(const Eigen::MatrixXd& affinity, const Partition& p) {
  if (static_cast<std::size_t>(affinity.rows()) != p.size()) {
    throw ValidationError("kmeans_objective: size mismatch");
  }
  return (affinity.cwiseProduct(membership_matrix(p))).sum();
}

BruteForceResult brute_force(const Eigen::MatrixXd& affinity, int k) {
  const auto n = static_cast<int>(affinity.rows());
  if (affinity.cols() != n || n == 0) {
    throw ValidationError("brute_force: affinity must be square and nonempty");
  }
  if (k < 1 || k > n) throw ValidationError("brute_force: k must lie in [1, n]");
  if (stirling2(n, k) > kBruteForceGuard) {
    throw SizeError("brute_force: more than 10^6 partitions to enumerate");
  }
  Enumerator e{affinity, n, k, std::vector<int>(static_cast<std::size_t>(n)), {}};
  e.visit(0, 0);
  return {Partition(e.best_labels, k), e.best};
}

}  // namespace dkm
