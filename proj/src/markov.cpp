#include "mcagg/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "mcagg/errors.hpp"
#include "mcagg/kernels.hpp"

namespace mcagg {

namespace {

inline double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

void fill_marginals(AggregateStats& stats) {
    stats.row_marginal = stats.joint.rowwise().sum();
    stats.col_marginal = stats.joint.colwise().sum().transpose();
}

// Everything about moving a single-source group that does not depend on the
// destination cluster.
struct GroupMove {
    ClusterId source = 0;
    double mass = 0.0;        // sum of mu over the group
    double self_flow = 0.0;   // w = sum_{i in S} mu_i s_i
    std::vector<double> s;    // s_i = sum_{j in S} P_ij
    std::vector<double> r;    // r_y = sum_{i in S} mu_i R(i,y)
    std::vector<double> u;    // u_y = sum_{i in y, i not in S} mu_i s_i
    double leave_source = 0.0;  // sum_i mu_i [xlogx(R_ia - s_i) - xlogx(R_ia)]
};

GroupMove prepare_move(const AggregateStats& stats, const TransitionModel& model,
                       const Partition& g, std::span<const PointIndex> group) {
    const std::size_t n = model.size();
    const int K = stats.num_clusters();
    GroupMove mv;
    mv.source = g[group.front()];
    mv.s.assign(n, 0.0);
    mv.r.assign(static_cast<std::size_t>(K), 0.0);
    mv.u.assign(static_cast<std::size_t>(K), 0.0);

    // W is exactly symmetric, so column j of P is row j of W over the row sums.
    for (PointIndex j : group) {
        const auto wrow = model.weights.row(static_cast<Eigen::Index>(j));
        for (std::size_t i = 0; i < n; ++i) mv.s[i] += wrow[static_cast<Eigen::Index>(i)];
    }
    for (std::size_t i = 0; i < n; ++i) mv.s[i] /= model.row_sums[static_cast<Eigen::Index>(i)];

    for (PointIndex i : group) {
        const double mu = model.stationary[static_cast<Eigen::Index>(i)];
        mv.mass += mu;
        mv.self_flow += mu * mv.s[i];
        for (int y = 0; y < K; ++y)
            mv.r[static_cast<std::size_t>(y)] += mu * stats.point_rows(static_cast<Eigen::Index>(i), y);
    }

    const auto a = static_cast<Eigen::Index>(mv.source);
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = model.stationary[static_cast<Eigen::Index>(i)];
        mv.u[static_cast<std::size_t>(g[i])] += mu * mv.s[i];
        const double ra = stats.point_rows(static_cast<Eigen::Index>(i), a);
        mv.leave_source += mu * (xlogx(ra - mv.s[i]) - xlogx(ra));
    }
    mv.u[static_cast<std::size_t>(mv.source)] -= mv.self_flow;
    return mv;
}

// Calls visit(row, col, new_value) for every entry of Q that changes when the
// prepared group moves to `target` (target != source).
template <typename Visit>
void for_each_joint_change(const AggregateStats& stats, const GroupMove& mv, ClusterId target,
                           Visit&& visit) {
    const int K = stats.num_clusters();
    const int a = mv.source;
    const int b = target;
    const auto& q = stats.joint;
    const auto r = [&](int y) { return mv.r[static_cast<std::size_t>(y)]; };
    const auto u = [&](int y) { return mv.u[static_cast<std::size_t>(y)]; };
    for (int y = 0; y < K; ++y) {
        if (y == a || y == b) continue;
        visit(a, y, q(a, y) - r(y));
        visit(b, y, q(b, y) + r(y));
        visit(y, a, q(y, a) - u(y));
        visit(y, b, q(y, b) + u(y));
    }
    visit(a, a, q(a, a) - r(a) - u(a));
    visit(a, b, q(a, b) - r(b) + u(a));
    visit(b, a, q(b, a) + r(a) - u(b) - mv.self_flow);
    visit(b, b, q(b, b) + r(b) + u(b) + mv.self_flow);
}

double single_source_delta(const AggregateStats& stats, const GroupMove& mv, ClusterId target,
                           double beta, double enter_target) {
    if (target == mv.source) return 0.0;
    double d_joint = 0.0;
    for_each_joint_change(stats, mv, target, [&](int y, int yp, double fresh) {
        d_joint += xlogx(stats.joint(y, yp)) - xlogx(fresh);
    });
    const double ma = stats.cluster_mass[mv.source];
    const double mb = stats.cluster_mass[target];
    const double d_mass = xlogx(ma) + xlogx(mb) - xlogx(ma - mv.mass) - xlogx(mb + mv.mass);
    const double d_cond = -(mv.leave_source + enter_target);
    return (1.0 - beta) * d_joint - d_mass - (1.0 - 2.0 * beta) * d_cond;
}

double enter_cost(const AggregateStats& stats, const TransitionModel& model, const GroupMove& mv,
                  ClusterId target) {
    double sum = 0.0;
    const auto b = static_cast<Eigen::Index>(target);
    for (std::size_t i = 0; i < mv.s.size(); ++i) {
        const double rb = stats.point_rows(static_cast<Eigen::Index>(i), b);
        sum += model.stationary[static_cast<Eigen::Index>(i)] * (xlogx(rb + mv.s[i]) - xlogx(rb));
    }
    return sum;
}

bool single_source(const Partition& g, std::span<const PointIndex> group) {
    return std::all_of(group.begin(), group.end(),
                       [&](PointIndex i) { return g[i] == g[group.front()]; });
}

void apply_single_source(AggregateStats& stats, const TransitionModel& model, Partition& g,
                         std::span<const PointIndex> group, ClusterId target) {
    const GroupMove mv = prepare_move(stats, model, g, group);
    if (target == mv.source) return;
    Matrix fresh = stats.joint;
    for_each_joint_change(stats, mv, target,
                          [&](int y, int yp, double value) { fresh(y, yp) = value; });
    stats.joint = std::move(fresh);
    for (std::size_t i = 0; i < mv.s.size(); ++i) {
        stats.point_rows(static_cast<Eigen::Index>(i), mv.source) -= mv.s[i];
        stats.point_rows(static_cast<Eigen::Index>(i), target) += mv.s[i];
    }
    stats.cluster_mass[mv.source] -= mv.mass;
    stats.cluster_mass[target] += mv.mass;
    fill_marginals(stats);
    for (PointIndex i : group) g.assign[i] = target;
}

// Splits a group by current cluster, in ascending cluster order.
std::vector<std::vector<PointIndex>> split_by_cluster(const Partition& g,
                                                      std::span<const PointIndex> group) {
    std::map<ClusterId, std::vector<PointIndex>> parts;
    for (PointIndex i : group) parts[g[i]].push_back(i);
    std::vector<std::vector<PointIndex>> out;
    for (auto& [c, members] : parts) out.push_back(std::move(members));
    return out;
}

double composed_delta(const AggregateStats& stats, const TransitionModel& model,
                      const Partition& g, std::span<const PointIndex> group, ClusterId target,
                      double beta) {
    AggregateStats scratch = stats;
    Partition moved = g;
    double total = 0.0;
    for (const auto& part : split_by_cluster(g, group)) {
        const GroupMove mv = prepare_move(scratch, model, moved, part);
        total += single_source_delta(scratch, mv, target, beta,
                                     target == mv.source ? 0.0 : enter_cost(scratch, model, mv, target));
        apply_single_source(scratch, model, moved, part, target);
    }
    return total;
}

void check_group(const TransitionModel& model, std::span<const PointIndex> group) {
    if (group.empty()) throw std::invalid_argument("move: empty group");
    for (PointIndex i : group)
        if (i >= model.size()) throw std::invalid_argument("move: point index out of range");
}

}  // namespace

double knn_scale(const Matrix& points, std::size_t k, std::size_t* k_used) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) throw InputError("knn_scale needs at least 2 points");
    if (k < 1) throw InputError("knn_scale needs k >= 1");
    k = std::min(k, n - 1);
    if (k_used) *k_used = k;
    const Vector per_point = kernels::omp::knn_mean_sq_distance(points, k);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < per_point.size(); ++i) sum += per_point[i];
    const double scale = sum / static_cast<double>(n);
    if (!(scale > 0.0))
        throw DegenerateScale("kNN scale is zero: every point coincides with its " +
                              std::to_string(k) + " nearest neighbours; supply a scale override");
    return scale;
}

TransitionModel build_transition(const Matrix& points, const KernelOptions& options) {
    if (options.scale_power != 1 && options.scale_power != 2)
        throw InputError("scale power must be 1 or 2");
    TransitionModel model;
    if (options.scale_override) {
        if (!(*options.scale_override > 0.0)) throw InputError("scale override must be positive");
        model.scale = *options.scale_override;
        model.k = 0;
    } else {
        model.scale = knn_scale(points, options.k, &model.k);
    }
    model.denominator = options.scale_power == 1 ? model.scale : std::sqrt(model.scale);
    model.weights = kernels::omp::gaussian_weights(points, model.denominator);
    model.row_sums = model.weights.rowwise().sum();
    model.stationary = model.row_sums / model.row_sums.sum();
    model.transition = kernels::omp::row_normalize(model.weights);
    return model;
}

TransitionModel model_from_weights(Matrix weights) {
    if (weights.rows() != weights.cols() || weights.rows() < 1)
        throw std::invalid_argument("weight matrix must be square and non-empty");
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            if (!(weights(i, j) >= 0.0)) throw std::invalid_argument("weights must be non-negative");
            if (weights(i, j) != weights(j, i)) throw std::invalid_argument("weights must be symmetric");
        }
    }
    TransitionModel model;
    model.weights = std::move(weights);
    model.row_sums = model.weights.rowwise().sum();
    for (Eigen::Index i = 0; i < model.row_sums.size(); ++i)
        if (!(model.row_sums[i] > 0.0)) throw std::invalid_argument("weight matrix has a zero row");
    model.stationary = model.row_sums / model.row_sums.sum();
    model.transition = kernels::omp::row_normalize(model.weights);
    return model;
}

AggregateStats aggregate_joint(const TransitionModel& model, const Partition& g) {
    if (g.size() != model.size())
        throw std::invalid_argument("partition size does not match the chain");
    g.validate();
    const int K = g.K;
    AggregateStats stats;
    stats.point_rows = kernels::omp::cluster_row_mass(model.transition, g.assign, K);
    stats.joint = Matrix::Zero(K, K);
    stats.cluster_mass = Vector::Zero(K);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double mu = model.stationary[ii];
        stats.joint.row(g[i]) += mu * stats.point_rows.row(ii);
        stats.cluster_mass[g[i]] += mu;
    }
    fill_marginals(stats);
    return stats;
}

CostTerms cost_terms(const AggregateStats& stats, const TransitionModel& model) {
    CostTerms t;
    const int K = stats.num_clusters();
    for (int y = 0; y < K; ++y) {
        for (int yp = 0; yp < K; ++yp) {
            const double q = stats.joint(y, yp);
            if (q <= 0.0) continue;
            const double lq = std::log(q);
            const double lr = std::log(stats.row_marginal[y]);
            t.h_y2_given_y1 -= q * (lq - lr);
            t.mutual_info += q * (lq - lr - std::log(stats.col_marginal[yp]));
        }
    }
    for (Eigen::Index i = 0; i < stats.point_rows.rows(); ++i) {
        double row = 0.0;
        for (int y = 0; y < K; ++y) row += xlogx(stats.point_rows(i, y));
        t.h_y2_given_x1 -= model.stationary[i] * row;
    }
    return t;
}

double cost(const CostTerms& terms, double beta) {
    return (1.0 - 2.0 * beta) * (terms.h_y2_given_y1 - terms.h_y2_given_x1) -
           beta * terms.mutual_info;
}

double cost(const AggregateStats& stats, const TransitionModel& model, double beta) {
    return cost(cost_terms(stats, model), beta);
}

double partition_cost(const TransitionModel& model, const Partition& g, double beta) {
    return cost(aggregate_joint(model, g), model, beta);
}

double chain_entropy_rate(const TransitionModel& model) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < model.transition.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < model.transition.cols(); ++j) row += xlogx(model.transition(i, j));
        h -= model.stationary[i] * row;
    }
    return h;
}

double chain_mutual_information(const TransitionModel& model) {
    double h_mu = 0.0;
    for (Eigen::Index i = 0; i < model.stationary.size(); ++i) h_mu -= xlogx(model.stationary[i]);
    return h_mu - chain_entropy_rate(model);
}

double move_delta(const AggregateStats& stats, const TransitionModel& model, const Partition& g,
                  std::span<const PointIndex> group, ClusterId target, double beta) {
    check_group(model, group);
    if (target < 0 || target >= stats.num_clusters())
        throw std::invalid_argument("move: target cluster out of range");
    if (!single_source(g, group)) return composed_delta(stats, model, g, group, target, beta);
    if (g[group.front()] == target) return 0.0;
    const GroupMove mv = prepare_move(stats, model, g, group);
    return single_source_delta(stats, mv, target, beta, enter_cost(stats, model, mv, target));
}

std::vector<double> move_deltas(const AggregateStats& stats, const TransitionModel& model,
                                const Partition& g, std::span<const PointIndex> group,
                                double beta) {
    check_group(model, group);
    const int K = stats.num_clusters();
    std::vector<double> out(static_cast<std::size_t>(K), 0.0);
    if (!single_source(g, group)) {
        for (int y = 0; y < K; ++y)
            out[static_cast<std::size_t>(y)] = composed_delta(stats, model, g, group, y, beta);
        return out;
    }
    const GroupMove mv = prepare_move(stats, model, g, group);

    // One pass over points for the "enter target" entropy of every cluster.
    std::vector<double> enter(static_cast<std::size_t>(K), 0.0);
    for (std::size_t i = 0; i < mv.s.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double mu = model.stationary[ii];
        for (int y = 0; y < K; ++y) {
            if (y == mv.source) continue;
            const double rb = stats.point_rows(ii, y);
            enter[static_cast<std::size_t>(y)] += mu * (xlogx(rb + mv.s[i]) - xlogx(rb));
        }
    }
    for (int y = 0; y < K; ++y)
        out[static_cast<std::size_t>(y)] =
            single_source_delta(stats, mv, y, beta, enter[static_cast<std::size_t>(y)]);
    return out;
}

void apply_move(AggregateStats& stats, const TransitionModel& model, Partition& g,
                std::span<const PointIndex> group, ClusterId target) {
    check_group(model, group);
    if (target < 0 || target >= stats.num_clusters())
        throw std::invalid_argument("move: target cluster out of range");
    for (const auto& part : split_by_cluster(g, group)) apply_single_source(stats, model, g, part, target);
}

}  // namespace mcagg
