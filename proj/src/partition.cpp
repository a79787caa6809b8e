#include "dkm/partition.hpp"

#include <algorithm>
#include <unordered_map>

#include "dkm/errors.hpp"

namespace dkm {

Partition::Partition(std::vector<int> labels, int k)
    : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw ValidationError("partition: k must be >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(k_));
  for (int l : labels_) {
    if (l < 0 || l >= k_) throw ValidationError("partition: label out of range");
    seen[static_cast<std::size_t>(l)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError("partition: empty cluster");
  }
}

Partition Partition::from_any_labels(const std::vector<int>& labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return Partition(std::move(out), static_cast<int>(remap.size()));
}

std::vector<std::size_t> Partition::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k_));
  for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

bool Partition::equivalent(const Partition& other) const {
  if (size() != other.size() || k_ != other.k_) return false;
  return from_any_labels(labels_).labels_ ==
         from_any_labels(other.labels_).labels_;
}

}  // namespace dkm
