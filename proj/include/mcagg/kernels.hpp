#pragma once

#include <span>

#include "mcagg/matrix.hpp"
#include "mcagg/partition.hpp"

// Dense O(N^2) building blocks of the chain construction and aggregation.
//
// Every kernel exists twice: `serial` is the plain reference and `omp` the
// OpenMP version used by the library. Both produce bit-identical results; no
// kernel performs a cross-thread floating-point reduction.
namespace mcagg::kernels {

namespace serial {

/// D(i,j) = ||x_i - x_j||^2, exactly symmetric with a zero diagonal.
Matrix squared_distances(const Matrix& points);

/// W(i,j) = exp(-||x_i - x_j||^2 / denominator), exactly symmetric, W(i,i) = 1.
Matrix gaussian_weights(const Matrix& points, double denominator);

/// For each point, the mean squared distance to its k nearest other points.
Vector knn_mean_sq_distance(const Matrix& points, std::size_t k);

/// P(i,j) = W(i,j) / sum_j W(i,j).
Matrix row_normalize(const Matrix& weights);

/// R(i,y) = sum of P(i,j) over j with assign[j] == y.
Matrix cluster_row_mass(const Matrix& transition, std::span<const ClusterId> assign, int K);

}  // namespace serial

namespace omp {

Matrix squared_distances(const Matrix& points);
Matrix gaussian_weights(const Matrix& points, double denominator);
Vector knn_mean_sq_distance(const Matrix& points, std::size_t k);
Matrix row_normalize(const Matrix& weights);
Matrix cluster_row_mass(const Matrix& transition, std::span<const ClusterId> assign, int K);

}  // namespace omp

}  // namespace mcagg::kernels
