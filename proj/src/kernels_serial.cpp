#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcagg/kernels.hpp"

namespace mcagg::kernels::serial {

Matrix squared_distances(const Matrix& points) {
    const Eigen::Index n = points.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (points.row(i) - points.row(j)).squaredNorm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

Matrix gaussian_weights(const Matrix& points, double denominator) {
    const Eigen::Index n = points.rows();
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = std::exp(-(points.row(i) - points.row(j)).squaredNorm() / denominator);
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    return w;
}

Vector knn_mean_sq_distance(const Matrix& points, std::size_t k) {
    const Eigen::Index n = points.rows();
    if (k < 1 || static_cast<Eigen::Index>(k) > n - 1)
        throw std::invalid_argument("knn_mean_sq_distance: k must lie in [1, N-1]");
    Vector out(n);
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        dist.clear();
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) dist.emplace_back((points.row(i) - points.row(j)).squaredNorm(), j);
        const auto kth = dist.begin() + static_cast<std::ptrdiff_t>(k);
        std::partial_sort(dist.begin(), kth, dist.end());
        double sum = 0.0;
        for (auto it = dist.begin(); it != kth; ++it) sum += it->first;
        out[i] = sum / static_cast<double>(k);
    }
    return out;
}

Matrix row_normalize(const Matrix& weights) {
    Matrix p(weights.rows(), weights.cols());
    for (Eigen::Index i = 0; i < weights.rows(); ++i) {
        const double total = weights.row(i).sum();
        p.row(i) = weights.row(i) / total;
    }
    return p;
}

Matrix cluster_row_mass(const Matrix& transition, std::span<const ClusterId> assign, int K) {
    const Eigen::Index n = transition.rows();
    Matrix r = Matrix::Zero(n, K);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) r(i, assign[static_cast<std::size_t>(j)]) += transition(i, j);
    return r;
}

}  // namespace mcagg::kernels::serial
