#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcagg/matrix.hpp"
#include "mcagg/partition.hpp"

namespace mcagg {

/// A point cloud with optional ground-truth classes.
///
/// Class ids are dense and 0-based, assigned in order of first appearance
/// when read from CSV. `class_names[c]` keeps the original label text.
struct Dataset {
    Matrix points;                              // N x n
    std::optional<std::vector<int>> labels;     // length N, ids in [0, num_classes)
    std::vector<std::string> feature_names;     // empty or length n
    std::vector<std::string> class_names;
    std::string name;

    std::size_t num_points() const noexcept { return static_cast<std::size_t>(points.rows()); }
    std::size_t num_features() const noexcept { return static_cast<std::size_t>(points.cols()); }
    int num_classes() const;

    /// Ground truth as a Partition with K = num_classes(). Requires labels.
    Partition ground_truth() const;

    /// Throws InputError when N < 2, n < 1, any entry is non-finite, or a
    /// label lies outside [0, num_classes).
    void validate() const;
};

/// Reads a comma-separated file with a header row. Every column except
/// `label_column` must be numeric.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Writes points (and the label column "class" when labels are present).
void write_csv(const Dataset& data, const std::filesystem::path& path);
void write_csv(const Dataset& data, std::ostream& out);

/// Per-feature standardisation with the population standard deviation
/// (divide by N). Constant features are centred and left at zero.
Dataset zscore_normalize(const Dataset& data);

/// Projects centred points onto the leading `dims` eigenvectors of the
/// sample covariance. Columns come out in non-increasing variance order.
Dataset pca_reduce(const Dataset& data, std::size_t dims);

struct CirclesParams {
    std::size_t points_per_circle = 60;
    std::vector<double> radii{0.5, 7.0, 15.0};
    double noise_std = 0.3;
    std::uint64_t seed = 0;
};

/// Concentric rings: uniform angle, radius r, isotropic Gaussian noise.
/// Label of a point is the index of its ring.
Dataset generate_circles(const CirclesParams& params);

}  // namespace mcagg
