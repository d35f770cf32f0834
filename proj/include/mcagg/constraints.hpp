#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "mcagg/partition.hpp"

namespace mcagg {

using PointPair = std::pair<PointIndex, PointIndex>;  // stored with first < second

/// Must-link and cannot-link pairs over 0-based point indices.
class ConstraintSet {
public:
    /// Both throw InputError on a self-pair and ContradictoryConstraints when
    /// the pair is already present in the other set.
    void add_must(PointIndex a, PointIndex b);
    void add_cannot(PointIndex a, PointIndex b);

    const std::set<PointPair>& must() const noexcept { return must_; }
    const std::set<PointPair>& cannot() const noexcept { return cannot_; }
    std::size_t size() const noexcept { return must_.size() + cannot_.size(); }
    bool empty() const noexcept { return must_.empty() && cannot_.empty(); }

    /// Largest referenced index + 1 (0 when empty).
    std::size_t extent() const noexcept;

    bool operator==(const ConstraintSet&) const = default;

private:
    std::set<PointPair> must_;
    std::set<PointPair> cannot_;
};

/// Ablation switches applied when building the clique index.
struct PropagationOptions {
    /// false: a point's must-set holds only itself and its explicit partners.
    bool propagate_must = true;
    /// false: cannot-links are discarded entirely.
    bool use_cannot = true;
};

/// Must-link connected components ("cliques") and the cannot-link relation
/// lifted to clique level. Cliques are numbered in ascending order of their
/// smallest member, so clique ids double as the coloring order.
class CliqueIndex {
public:
    std::size_t num_points() const noexcept { return component_of_.size(); }
    std::size_t num_cliques() const noexcept { return members_.size(); }

    std::size_t component_of(PointIndex x) const { return component_of_.at(x); }
    const std::vector<PointIndex>& members(std::size_t clique) const { return members_.at(clique); }
    /// Sorted, symmetric, irreflexive.
    const std::vector<std::size_t>& cannot_adjacent(std::size_t clique) const {
        return cannot_adj_.at(clique);
    }

    /// Points that move together with x. The full clique under propagation,
    /// otherwise x plus its explicit must-link partners. Sorted.
    std::vector<PointIndex> func_must(PointIndex x) const;

    /// Union of the cliques cannot-adjacent to x's clique. Sorted.
    std::vector<PointIndex> func_cannot(PointIndex x) const;

    bool propagates_must() const noexcept { return options_.propagate_must; }
    const PropagationOptions& options() const noexcept { return options_; }

private:
    friend CliqueIndex propagate(const ConstraintSet&, std::size_t, const PropagationOptions&);

    std::vector<std::size_t> component_of_;
    std::vector<std::vector<PointIndex>> members_;
    std::vector<std::vector<std::size_t>> cannot_adj_;
    std::vector<std::vector<PointIndex>> explicit_must_;
    PropagationOptions options_;
};

/// Depth-first search over the must-link graph, then cannot-link lifting.
/// Throws ContradictoryConstraints naming the clique when a cannot-link pair
/// falls inside one clique, and InputError when an index is >= num_points.
CliqueIndex propagate(const ConstraintSet& constraints, std::size_t num_points,
                      const PropagationOptions& options = {});

/// Known class of a subset of points.
using LabelMap = std::map<PointIndex, int>;

/// Every pair of labelled points becomes a must-link (same class) or a
/// cannot-link (different class).
ConstraintSet from_labels(const LabelMap& labeled);

/// Replaces exactly round(fraction * m) labels, chosen without replacement,
/// by a uniformly drawn different class in [0, num_classes).
LabelMap corrupt_labels(const LabelMap& labeled, double fraction, int num_classes,
                        std::uint64_t seed);

enum class SideInfoMode { AllClasses, TwoClasses };

/// AllClasses: round(fraction * N) points drawn uniformly, labelled with the
/// truth. TwoClasses: a uniformly chosen pair of classes whose combined size
/// is at least 30% of N, then round(fraction * size) of their points.
LabelMap sample_side_info(const std::vector<int>& labels, double fraction, SideInfoMode mode,
                          std::uint64_t seed);

/// Class pairs (c1 < c2) eligible for SideInfoMode::TwoClasses.
std::vector<std::pair<int, int>> qualifying_class_pairs(const std::vector<int>& labels);

/// round(ratio * N) distinct pairs drawn uniformly from all N(N-1)/2 pairs,
/// each labelled must/cannot by the ground truth.
ConstraintSet sample_pairwise(const std::vector<int>& labels, double ratio, std::uint64_t seed);

struct ColoringResult {
    Partition partition;
    /// Cliques whose every color was blocked and fell back to the least
    /// blocked one.
    std::size_t fallbacks = 0;
    bool violated() const noexcept { return fallbacks > 0; }
};

/// Greedy initial partition. Cliques are visited in id order; an
/// unconstrained clique draws a uniform color, a constrained one takes the
/// smallest color unused by its already colored cannot-neighbours.
ColoringResult greedy_coloring(const CliqueIndex& index, int K, std::uint64_t seed);

struct ViolationCount {
    std::size_t must = 0;
    std::size_t cannot = 0;
    std::size_t total() const noexcept { return must + cannot; }
    bool operator==(const ViolationCount&) const = default;
};

ViolationCount violations(const Partition& g, const ConstraintSet& constraints);

/// Line format: `ML i j` or `CL i j`, 0-based, `#` starts a comment.
ConstraintSet read_constraints(std::istream& in);
ConstraintSet read_constraint_file(const std::filesystem::path& path);
void write_constraints(const ConstraintSet& constraints, std::ostream& out);
void write_constraint_file(const ConstraintSet& constraints, const std::filesystem::path& path);

}  // namespace mcagg
