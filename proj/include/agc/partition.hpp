#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "agc/error.hpp"

namespace agc {

/// A hard partition of n nodes into m labelled clusters. Labels are in
/// [0, m); label ids with no members are permitted (k-means can leave a
/// cluster empty on degenerate input) and are reported by
/// has_empty_clusters().
struct ClusterPartition {
  std::vector<int> labels;
  int m = 0;

  /// m < 0 infers m = max label + 1. Validates the label range.
  static ClusterPartition from_labels(std::vector<int> labels, int m = -1) {
    int max_label = -1;
    for (int l : labels) {
      if (l < 0) throw ValidationError("labels must be nonnegative");
      max_label = std::max(max_label, l);
    }
    if (m < 0) m = max_label + 1;
    if (max_label >= m)
      throw ValidationError("label " + std::to_string(max_label) +
                            " out of range for m=" + std::to_string(m));
    return ClusterPartition{std::move(labels), m};
  }

  std::size_t size() const { return labels.size(); }

  std::vector<std::size_t> cluster_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(m), 0);
    for (int l : labels) sizes[static_cast<std::size_t>(l)]++;
    return sizes;
  }

  int used_clusters() const {
    int used = 0;
    for (std::size_t s : cluster_sizes()) used += s > 0 ? 1 : 0;
    return used;
  }

  bool has_empty_clusters() const { return used_clusters() != m; }

  /// FNV-1a over the little-endian label bytes; platform-stable, used in
  /// driver traces to identify partitions compactly.
  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int l : labels) {
      const auto u = static_cast<std::uint32_t>(l);
      for (int b = 0; b < 4; ++b) {
        h ^= (u >> (8 * b)) & 0xffu;
        h *= 0x100000001b3ull;
      }
    }
    return h;
  }
};

}  // namespace agc
