#include "mcagg/partition.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace mcagg {

void Partition::validate() const {
    if (K < 1) throw std::invalid_argument("partition needs K >= 1");
    for (std::size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] < 0 || assign[i] >= K) {
            throw std::invalid_argument("point " + std::to_string(i) + " assigned to cluster " +
                                        std::to_string(assign[i]) + " outside [0, " +
                                        std::to_string(K) + ")");
        }
    }
}

Partition single_cluster(std::size_t n) {
    return Partition{std::vector<ClusterId>(n, 0), 1};
}

Partition identity_partition(std::size_t n) {
    Partition p{std::vector<ClusterId>(n), static_cast<int>(n)};
    std::iota(p.assign.begin(), p.assign.end(), 0);
    return p;
}

}  // namespace mcagg
