#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mcagg/matrix.hpp"
#include "mcagg/partition.hpp"

namespace mcagg {

/// Reversible chain induced by a symmetric similarity matrix.
///
/// `transition` is `weights` with every row normalised to one and
/// `stationary` is proportional to the row sums of `weights`, so detailed
/// balance mu_i P_ij = mu_j P_ji holds by construction.
struct TransitionModel {
    Matrix weights;     // W, symmetric, non-negative
    Matrix transition;  // P, row-stochastic
    Vector stationary;  // mu
    Vector row_sums;    // sum_j W_ij
    double scale = 1.0;        // mean squared kNN distance (or the override)
    double denominator = 1.0;  // kernel denominator actually used
    std::size_t k = 0;         // neighbours behind `scale`; 0 when overridden or W given

    std::size_t size() const noexcept { return static_cast<std::size_t>(weights.rows()); }
};

/// Mean over points of the mean squared distance to their k nearest
/// neighbours (self excluded). k above N-1 is clamped; `k_used` reports the
/// value applied. Throws DegenerateScale when the result is zero.
double knn_scale(const Matrix& points, std::size_t k, std::size_t* k_used = nullptr);

/// How the kNN scale s enters the Gaussian kernel exp(-d^2 / s^(1/power)).
/// power 1 divides by s directly; power 2 reads s as a squared bandwidth and
/// divides by its square root.
struct KernelOptions {
    std::size_t k = 20;
    std::optional<double> scale_override;
    int scale_power = 1;
};

TransitionModel build_transition(const Matrix& points, const KernelOptions& options);

/// Wraps an explicit symmetric weight matrix. Throws std::invalid_argument
/// if W is not square, not exactly symmetric, has a negative entry, or has
/// an all-zero row.
TransitionModel model_from_weights(Matrix weights);

/// Distribution of (Y1, Y2) = (g(X1), g(X2)) plus per-point cluster rows.
struct AggregateStats {
    Matrix joint;          // Q, K x K
    Vector row_marginal;   // sum over columns of Q
    Vector col_marginal;   // sum over rows of Q
    Matrix point_rows;     // N x K, Pr(Y2 = y | X1 = i)
    Vector cluster_mass;   // sum of mu_i over cluster members

    int num_clusters() const noexcept { return static_cast<int>(joint.rows()); }
};

AggregateStats aggregate_joint(const TransitionModel& model, const Partition& g);

/// All in nats.
struct CostTerms {
    double h_y2_given_y1 = 0.0;
    double h_y2_given_x1 = 0.0;
    double mutual_info = 0.0;  // I(Y1; Y2)
};

CostTerms cost_terms(const AggregateStats& stats, const TransitionModel& model);

/// (1 - 2 beta)(H(Y2|Y1) - H(Y2|X1)) - beta I(Y1;Y2)
double cost(const CostTerms& terms, double beta);
double cost(const AggregateStats& stats, const TransitionModel& model, double beta);

/// Cost of `g` evaluated from scratch.
double partition_cost(const TransitionModel& model, const Partition& g, double beta);

/// H(X2|X1) and I(X1;X2) of the unaggregated chain.
double chain_entropy_rate(const TransitionModel& model);
double chain_mutual_information(const TransitionModel& model);

/// cost(g with every point of `group` moved to `target`) - cost(g).
///
/// When all members share one cluster only the two affected rows and
/// columns of Q, the two cluster masses, and two point_rows columns are
/// touched. Groups spanning several clusters fall back to composing
/// single-source moves on a scratch copy.
double move_delta(const AggregateStats& stats, const TransitionModel& model, const Partition& g,
                  std::span<const PointIndex> group, ClusterId target, double beta);

/// move_delta for every target 0..K-1 at once; entry for the current
/// cluster of a single-source group is exactly zero.
std::vector<double> move_deltas(const AggregateStats& stats, const TransitionModel& model,
                                const Partition& g, std::span<const PointIndex> group,
                                double beta);

/// Moves `group` to `target`, updating `stats` and `g` incrementally.
void apply_move(AggregateStats& stats, const TransitionModel& model, Partition& g,
                std::span<const PointIndex> group, ClusterId target);

}  // namespace mcagg
