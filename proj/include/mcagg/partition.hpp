#pragma once

#include <cstddef>
#include <vector>

namespace mcagg {

using PointIndex = std::size_t;
using ClusterId = int;

/// Assignment of every point to one of K aggregate states. Cluster ids are
/// 0-based: every entry lies in [0, K). Empty clusters are allowed.
struct Partition {
    std::vector<ClusterId> assign;
    int K = 1;

    std::size_t size() const noexcept { return assign.size(); }
    ClusterId operator[](PointIndex i) const { return assign[i]; }

    /// Throws std::invalid_argument if any entry is outside [0, K).
    void validate() const;

    bool operator==(const Partition&) const = default;
};

/// Every point in cluster 0.
Partition single_cluster(std::size_t n);

/// Point i in cluster i (K = n).
Partition identity_partition(std::size_t n);

}  // namespace mcagg
