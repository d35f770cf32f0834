#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mcagg/errors.hpp"
#include "mcagg/markov.hpp"
#include "oracles.hpp"

using namespace mcagg;

TEST_CASE("knn scale on 0, 1, 3") {
    Matrix x(3, 1);
    x << 0, 1, 3;
    CHECK(knn_scale(x, 1) == doctest::Approx(2.0));
    CHECK(knn_scale(x, 2) == doctest::Approx(14.0 / 3.0));
    std::size_t used = 0;
    CHECK(knn_scale(x, 50, &used) == doctest::Approx(14.0 / 3.0));
    CHECK(used == 2);
}

TEST_CASE("identical points have a degenerate scale") {
    Matrix x = Matrix::Constant(5, 2, 1.5);
    CHECK_THROWS_AS(knn_scale(x, 2), DegenerateScale);
    CHECK_THROWS_AS(build_transition(x, {}), DegenerateScale);
}

TEST_CASE("identical points with a scale override give uniform rows") {
    Matrix x = Matrix::Constant(4, 2, 1.5);
    KernelOptions o;
    o.scale_override = 1.0;
    const TransitionModel m = build_transition(x, o);
    CHECK((m.transition.array() - 0.25).abs().maxCoeff() < 1e-15);
}

TEST_CASE("two points at unit distance") {
    Matrix x(2, 1);
    x << 0, 1;
    KernelOptions o;
    o.scale_override = 1.0;
    const TransitionModel m = build_transition(x, o);
    CHECK(m.weights(0, 1) == doctest::Approx(std::exp(-1.0)));
    CHECK(m.weights(0, 0) == 1.0);
    CHECK(m.stationary(0) == doctest::Approx(0.5));
}

TEST_CASE("scale power two divides by the square root") {
    Matrix x(3, 1);
    x << 0, 1, 3;
    KernelOptions o;
    o.k = 1;
    o.scale_power = 2;
    const TransitionModel m = build_transition(x, o);
    CHECK(m.scale == doctest::Approx(2.0));
    CHECK(m.denominator == doctest::Approx(std::sqrt(2.0)));
    CHECK(m.weights(0, 1) == doctest::Approx(std::exp(-1.0 / std::sqrt(2.0))));
}

TEST_CASE("stationary distribution matches power iteration") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + trial * 3;
        const TransitionModel m = build_transition(oracle::random_points(rng, n, 2), {});
        const Vector v = oracle::power_stationary(m.transition, 10 * n + 200);
        CHECK((v - m.stationary).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((m.stationary.transpose() * m.transition - m.stationary.transpose())
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
}

TEST_CASE("model_from_weights rejects bad input") {
    Matrix a(2, 2);
    a << 1, 0.5, 0.4, 1;
    CHECK_THROWS_AS(model_from_weights(a), std::invalid_argument);
    a << 1, -1, -1, 1;
    CHECK_THROWS_AS(model_from_weights(a), std::invalid_argument);
    a << 0, 0, 0, 1;
    CHECK_THROWS_AS(model_from_weights(a), std::invalid_argument);
}

TEST_CASE("aggregated joint of a 2-state chain") {
    Matrix w(2, 2);
    w << 1, 1, 1, 3;
    const TransitionModel m = model_from_weights(w);
    const AggregateStats s = aggregate_joint(m, identity_partition(2));
    CHECK(s.joint(0, 0) == doctest::Approx(1.0 / 6));
    CHECK(s.joint(0, 1) == doctest::Approx(1.0 / 6));
    CHECK(s.joint(1, 0) == doctest::Approx(1.0 / 6));
    CHECK(s.joint(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("single cluster has zero cost terms") {
    std::mt19937_64 rng(2);
    const TransitionModel m = model_from_weights(oracle::random_weights(rng, 8));
    const CostTerms t = cost_terms(aggregate_joint(m, single_cluster(8)), m);
    CHECK(std::abs(t.h_y2_given_y1) < 1e-15);
    CHECK(std::abs(t.h_y2_given_x1) < 1e-15);
    CHECK(std::abs(t.mutual_info) < 1e-15);
    for (double beta : {0.0, 0.3, 1.0}) CHECK(std::abs(partition_cost(m, single_cluster(8), beta)) < 1e-15);
}

TEST_CASE("sticky two-state chain") {
    Matrix w(2, 2);
    w << 0.9, 0.1, 0.1, 0.9;
    const TransitionModel m = model_from_weights(w);
    const double expected = std::log(2.0) + 0.9 * std::log(0.9) + 0.1 * std::log(0.1);
    CHECK(chain_mutual_information(m) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.368).epsilon(1e-3));
    const CostTerms t = cost_terms(aggregate_joint(m, identity_partition(2)), m);
    CHECK(t.mutual_info == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cost terms agree with the direct oracle") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + trial % 10;
        const TransitionModel m = model_from_weights(oracle::random_weights(rng, n));
        const int K = 1 + trial % 4;
        const Partition g = oracle::random_partition(rng, static_cast<std::size_t>(n), K);
        const CostTerms t = cost_terms(aggregate_joint(m, g), m);
        const oracle::Terms o = oracle::terms(m, g);
        CHECK(std::abs(t.mutual_info - o.i_y1_y2) < 1e-12);
        CHECK(std::abs(t.h_y2_given_y1 - o.h_y2_y1) < 1e-12);
        CHECK(std::abs(t.h_y2_given_x1 - o.h_y2_x1) < 1e-12);
        CHECK(std::abs(cost(t, 0.5) + 0.5 * t.mutual_info) < 1e-12);
        // Data processing and the Y1/X2 symmetry of a reversible chain.
        CHECK(t.mutual_info <= chain_mutual_information(m) + 1e-10);
        CHECK(t.h_y2_given_y1 >= t.h_y2_given_x1 - 1e-10);
        CHECK(std::abs(o.i_y1_x2 - o.i_y2_x1) < 1e-10);
    }
}

TEST_CASE("identity partition at beta one is minus the chain information") {
    std::mt19937_64 rng(9);
    for (int n : {2, 5, 11}) {
        const TransitionModel m = model_from_weights(oracle::random_weights(rng, n));
        CHECK(std::abs(partition_cost(m, identity_partition(static_cast<std::size_t>(n)), 1.0) +
                       chain_mutual_information(m)) < 1e-10);
        CHECK(chain_entropy_rate(m) ==
              doctest::Approx(oracle::entropy(std::vector<double>(m.stationary.data(),
                                                                  m.stationary.data() + n)) -
                              chain_mutual_information(m)));
    }
}

TEST_CASE("move_delta matches full recomputation") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ub(0.0, 1.0);
    for (int trial = 0; trial < 1500; ++trial) {
        const int n = 2 + trial % 15;
        const int K = 1 + trial % 4;
        const TransitionModel m = model_from_weights(oracle::random_weights(rng, n));
        const Partition g = oracle::random_partition(rng, static_cast<std::size_t>(n), K);
        const AggregateStats s = aggregate_joint(m, g);
        const double beta = ub(rng);

        std::vector<PointIndex> group;
        if (trial % 3 == 0) {
            // Arbitrary subset, possibly spanning clusters.
            for (int i = 0; i < n; ++i)
                if (ub(rng) < 0.4) group.push_back(static_cast<PointIndex>(i));
            if (group.empty()) group.push_back(0);
        } else {
            const ClusterId from = g[static_cast<PointIndex>(trial % n)];
            for (int i = 0; i < n; ++i)
                if (g[static_cast<PointIndex>(i)] == from && ub(rng) < 0.7) group.push_back(static_cast<PointIndex>(i));
            if (group.empty()) group.push_back(static_cast<PointIndex>(trial % n));
        }
        const ClusterId target = static_cast<ClusterId>(trial % K);
        Partition moved = g;
        for (auto i : group) moved.assign[i] = target;
        const double full = partition_cost(m, moved, beta) - partition_cost(m, g, beta);
        CHECK(std::abs(move_delta(s, m, g, group, target, beta) - full) < 1e-9);

        const auto all = move_deltas(s, m, g, group, beta);
        CHECK(all.size() == static_cast<std::size_t>(K));
        CHECK(std::abs(all[static_cast<std::size_t>(target)] - full) < 1e-9);
    }
}

TEST_CASE("no-op and out-and-back moves") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 4 + trial % 8;
        const TransitionModel m = model_from_weights(oracle::random_weights(rng, n));
        Partition g = oracle::random_partition(rng, static_cast<std::size_t>(n), 3);
        AggregateStats s = aggregate_joint(m, g);
        const std::vector<PointIndex> group{static_cast<PointIndex>(trial % n)};
        const ClusterId home = g[group[0]];
        CHECK(move_delta(s, m, g, group, home, 0.4) == 0.0);
        CHECK(move_deltas(s, m, g, group, 0.4)[static_cast<std::size_t>(home)] == 0.0);

        const ClusterId away = (home + 1) % 3;
        const double there = move_delta(s, m, g, group, away, 0.4);
        apply_move(s, m, g, group, away);
        const double back = move_delta(s, m, g, group, home, 0.4);
        CHECK(std::abs(there + back) < 1e-12);

        // Incremental stats stay close to a fresh aggregation.
        const AggregateStats fresh = aggregate_joint(m, g);
        CHECK((s.joint - fresh.joint).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s.point_rows - fresh.point_rows).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((s.cluster_mass - fresh.cluster_mass).cwiseAbs().maxCoeff() < 1e-12);
    }
}
