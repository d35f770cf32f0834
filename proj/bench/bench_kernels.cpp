// Serial reference vs OpenMP kernels on random point clouds.
#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mcagg/kernels.hpp"
#include "mcagg/markov.hpp"
#include "mcagg/solver.hpp"

namespace {

using namespace mcagg;

Matrix random_points(Eigen::Index n, Eigen::Index dims) {
    std::mt19937_64 rng(42);
    std::normal_distribution<double> normal;
    Matrix m(n, dims);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

std::vector<ClusterId> random_assign(std::size_t n, int K) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, K - 1);
    std::vector<ClusterId> a(n);
    for (auto& v : a) v = pick(rng);
    return a;
}

template <Matrix (*Kernel)(const Matrix&, double)>
void BM_Weights(benchmark::State& state) {
    const Matrix pts = random_points(state.range(0), 4);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(pts, 2.0));
    state.SetComplexityN(state.range(0));
}

template <Vector (*Kernel)(const Matrix&, std::size_t)>
void BM_Knn(benchmark::State& state) {
    const Matrix pts = random_points(state.range(0), 4);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(pts, 20));
}

template <Matrix (*Kernel)(const Matrix&, std::span<const ClusterId>, int)>
void BM_RowMass(benchmark::State& state) {
    const Matrix p = kernels::serial::row_normalize(kernels::serial::gaussian_weights(
        random_points(state.range(0), 4), 2.0));
    const auto assign = random_assign(static_cast<std::size_t>(state.range(0)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(p, assign, 5));
}

void BM_Sweep(benchmark::State& state) {
    const TransitionModel model = build_transition(random_points(state.range(0), 4), {});
    const CliqueIndex index = propagate({}, model.size());
    SolverConfig cfg;
    cfg.K = 5;
    cfg.iter_max = 1;
    for (auto _ : state) benchmark::DoNotOptimize(optimize_sequential(model, index, 0.5, cfg));
}

}  // namespace

BENCHMARK(BM_Weights<kernels::serial::gaussian_weights>)->Name("weights/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Weights<kernels::omp::gaussian_weights>)->Name("weights/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_Knn<kernels::serial::knn_mean_sq_distance>)->Name("knn/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_Knn<kernels::omp::knn_mean_sq_distance>)->Name("knn/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_RowMass<kernels::serial::cluster_row_mass>)->Name("row_mass/serial")->Arg(256)->Arg(1024);
BENCHMARK(BM_RowMass<kernels::omp::cluster_row_mass>)->Name("row_mass/omp")->Arg(256)->Arg(1024);
BENCHMARK(BM_Sweep)->Name("sequential_sweep")->Arg(256)->Arg(512);

BENCHMARK_MAIN();
