#pragma once

#include <Eigen/Core>

namespace mcagg {

/// Dense row-major storage used for point clouds and N x N chain matrices.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace mcagg
