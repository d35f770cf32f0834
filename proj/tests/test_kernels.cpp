#include <doctest.h>

#include <random>
#include <vector>

#include "mcagg/kernels.hpp"
#include "oracles.hpp"

using namespace mcagg;
namespace ks = mcagg::kernels::serial;
namespace ko = mcagg::kernels::omp;

TEST_CASE("omp kernels are bit-identical to the serial reference") {
    std::mt19937_64 rng(11);
    for (int n : {2, 7, 64, 203}) {
        const Matrix pts = oracle::random_points(rng, n, 3);
        CHECK(ks::squared_distances(pts) == ko::squared_distances(pts));
        const Matrix w = ks::gaussian_weights(pts, 1.7);
        CHECK(w == ko::gaussian_weights(pts, 1.7));
        CHECK(w == w.transpose());
        CHECK(w.diagonal().isOnes());
        const std::size_t k = std::min<std::size_t>(5, static_cast<std::size_t>(n - 1));
        CHECK(ks::knn_mean_sq_distance(pts, k) == ko::knn_mean_sq_distance(pts, k));
        const Matrix p = ks::row_normalize(w);
        CHECK(p == ko::row_normalize(w));
        const Partition g = oracle::random_partition(rng, static_cast<std::size_t>(n), 4);
        CHECK(ks::cluster_row_mass(p, g.assign, 4) == ko::cluster_row_mass(p, g.assign, 4));
    }
}

TEST_CASE("squared distances by hand") {
    Matrix pts(3, 2);
    pts << 0, 0, 3, 4, 0, 1;
    const Matrix d = ks::squared_distances(pts);
    CHECK(d(0, 1) == 25.0);
    CHECK(d(1, 2) == 18.0);
    CHECK(d(2, 0) == 1.0);
}
