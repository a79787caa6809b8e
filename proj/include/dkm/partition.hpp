#pragma once

#include <cstddef>
#include <vector>

namespace dkm {

// Hard clustering of n items into k nonempty clusters, labels in [0, k).
class Partition {
 public:
  Partition() = default;
  // Throws ValidationError if a label is out of range or a cluster is empty.
  Partition(std::vector<int> labels, int k);

  // Relabels arbitrary integer labels to 0..k-1 in order of first
  // appearance.
  static Partition from_any_labels(const std::vector<int>& labels);

  const std::vector<int>& labels() const { return labels_; }
  int k() const { return k_; }
  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t i) const { return labels_[i]; }
  std::vector<std::size_t> cluster_sizes() const;

  // Same clusters up to a relabeling.
  bool equivalent(const Partition& other) const;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

}  // namespace dkm
