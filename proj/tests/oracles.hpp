#pragma once
// Independent reference computations and random instance generators shared
// by the unit tests and the acceptance binary.

#include <cmath>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "mcagg/markov.hpp"
#include "mcagg/partition.hpp"

namespace oracle {

using mcagg::Matrix;
using mcagg::Partition;
using mcagg::TransitionModel;
using mcagg::Vector;

inline double xlogx(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

inline double entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) h -= xlogx(v);
    return h;
}

// Mutual information of a joint table given as nested vectors.
inline double mutual_information(const std::vector<std::vector<double>>& joint) {
    std::vector<double> rows(joint.size(), 0.0), cols(joint.empty() ? 0 : joint[0].size(), 0.0);
    for (std::size_t a = 0; a < joint.size(); ++a)
        for (std::size_t b = 0; b < joint[a].size(); ++b) {
            rows[a] += joint[a][b];
            cols[b] += joint[a][b];
        }
    double mi = 0.0;
    for (std::size_t a = 0; a < joint.size(); ++a)
        for (std::size_t b = 0; b < joint[a].size(); ++b) {
            const double p = joint[a][b];
            if (p > 0.0) mi += p * std::log(p / (rows[a] * cols[b]));
        }
    return mi;
}

// Joint of (g(X1), g(X2)) by direct summation over all state pairs.
inline std::vector<std::vector<double>> aggregated_joint(const TransitionModel& m,
                                                         const Partition& g) {
    std::vector<std::vector<double>> q(g.K, std::vector<double>(g.K, 0.0));
    const auto n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            q[g[i]][g[j]] += m.stationary(i) * m.transition(i, j);
    return q;
}

struct Terms {
    double h_y2_y1, h_y2_x1, i_y1_y2, i_y2_x1, i_y1_x2, i_x1_x2;
};

inline Terms terms(const TransitionModel& m, const Partition& g) {
    const auto n = m.size();
    const auto q = aggregated_joint(m, g);
    std::vector<double> py(g.K, 0.0);
    for (std::size_t i = 0; i < n; ++i) py[g[i]] += m.stationary(i);
    Terms t{};
    t.i_y1_y2 = mutual_information(q);
    t.h_y2_y1 = entropy(py) - t.i_y1_y2;

    // (X1, Y2) and (Y1, X2) joints.
    std::vector<std::vector<double>> x1y2(n, std::vector<double>(g.K, 0.0));
    std::vector<std::vector<double>> y1x2(g.K, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> x1x2(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double p = m.stationary(i) * m.transition(i, j);
            x1y2[i][g[j]] += p;
            y1x2[g[i]][j] += p;
            x1x2[i][j] = p;
        }
    t.i_y2_x1 = mutual_information(x1y2);
    t.i_y1_x2 = mutual_information(y1x2);
    t.i_x1_x2 = mutual_information(x1x2);
    t.h_y2_x1 = entropy(py) - t.i_y2_x1;
    return t;
}

inline double cost(const TransitionModel& m, const Partition& g, double beta) {
    const Terms t = terms(m, g);
    return (1.0 - 2.0 * beta) * (t.h_y2_y1 - t.h_y2_x1) - beta * t.i_y1_y2;
}

// Stationary distribution by power iteration on P^T.
inline Vector power_stationary(const Matrix& p, int steps) {
    const auto n = p.rows();
    Vector v = Vector::Constant(n, 1.0 / static_cast<double>(n));
    for (int s = 0; s < steps; ++s) {
        Vector next = p.transpose() * v;
        v = next / next.sum();
    }
    return v;
}

inline Matrix random_points(std::mt19937_64& rng, int n, int dims) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix x(n, dims);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < dims; ++d) x(i, d) = normal(rng);
    return x;
}

// Random symmetric positive weights with unit diagonal.
inline Matrix random_weights(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
        w(i, i) = 1.0;
        for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
    }
    return w;
}

inline Partition random_partition(std::mt19937_64& rng, std::size_t n, int K) {
    std::uniform_int_distribution<int> pick(0, K - 1);
    Partition g;
    g.K = K;
    g.assign.resize(n);
    for (auto& a : g.assign) a = pick(rng);
    return g;
}

// Block chain: weight 1 inside a block, `across` between blocks.
inline Matrix block_weights(const std::vector<int>& block_of, double across) {
    const auto n = static_cast<Eigen::Index>(block_of.size());
    Matrix w(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            w(i, j) = block_of[i] == block_of[j] ? 1.0 : across;
    return w;
}

// Enumerates all K^n assignments, calls f(partition).
template <class F>
void for_each_partition(std::size_t n, int K, F&& f) {
    Partition g;
    g.K = K;
    g.assign.assign(n, 0);
    while (true) {
        f(static_cast<const Partition&>(g));
        std::size_t i = 0;
        while (i < n && ++g.assign[i] == K) g.assign[i++] = 0;
        if (i == n) return;
    }
}

// NMI straight from a contingency table of counts.
inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ma, mb;
    const double n = static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ma[a[i]] += 1.0;
        mb[b[i]] += 1.0;
    }
    double ha = 0.0, hb = 0.0, mi = 0.0;
    for (auto& [k, c] : ma) ha -= xlogx(c / n);
    for (auto& [k, c] : mb) hb -= xlogx(c / n);
    if (ma.size() == 1 && mb.size() == 1) return 1.0;
    if (ma.size() == 1 || mb.size() == 1) return 0.0;
    for (auto& [k, c] : joint) mi += (c / n) * std::log((c / n) / ((ma[k.first] / n) * (mb[k.second] / n)));
    return 2.0 * mi / (ha + hb);
}

}  // namespace oracle
