#include "mcagg/solver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "mcagg/errors.hpp"

namespace mcagg {

void SolverConfig::validate() const {
    if (K < 1) throw InputError("K must be >= 1");
    if (!(beta_target >= 0.0 && beta_target <= 1.0)) throw InputError("beta target must lie in [0, 1]");
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("annealing step must lie in (0, 1]");
    if (iter_max < 1) throw InputError("iter_max must be >= 1");
}

namespace {

Partition checked_init(const Partition& init, const CliqueIndex& index, const SolverConfig& cfg) {
    if (init.size() != index.num_points())
        throw InvalidInitialization("initial partition has " + std::to_string(init.size()) +
                                    " entries, expected " + std::to_string(index.num_points()));
    if (init.K != cfg.K)
        throw InvalidInitialization("initial partition has K = " + std::to_string(init.K) +
                                    ", expected " + std::to_string(cfg.K));
    try {
        init.validate();
    } catch (const std::invalid_argument& e) {
        throw InvalidInitialization(e.what());
    }
    for (std::size_t c = 0; c < index.num_cliques(); ++c) {
        const auto& members = index.members(c);
        for (PointIndex p : members)
            if (init[p] != init[members.front()])
                throw InvalidInitialization("initial partition splits must-link clique " +
                                            std::to_string(c) + " (points " +
                                            std::to_string(members.front()) + " and " +
                                            std::to_string(p) + ")");
    }
    return init;
}

}  // namespace

SequentialResult optimize_sequential(const TransitionModel& model, const CliqueIndex& index,
                                     double beta, const SolverConfig& cfg,
                                     const std::optional<Partition>& init,
                                     const MoveObserver& observer) {
    cfg.validate();
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0, 1]");
    const std::size_t n = model.size();
    if (index.num_points() != n)
        throw InputError("constraint index covers " + std::to_string(index.num_points()) +
                         " points but the chain has " + std::to_string(n));

    SequentialResult result;
    if (init) {
        result.partition = checked_init(*init, index, cfg);
    } else {
        ColoringResult colored = greedy_coloring(index, cfg.K, cfg.seed);
        result.partition = std::move(colored.partition);
        result.init_fallbacks = colored.fallbacks;
    }
    Partition& g = result.partition;
    AggregateStats stats = aggregate_joint(model, g);

    std::vector<PointIndex> order(n);
    std::iota(order.begin(), order.end(), PointIndex{0});
    if (cfg.shuffle_order) {
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
        std::shuffle(order.begin(), order.end(), rng);
    }

    const bool skip_visited = index.propagates_must();
    std::vector<char> visited(n, 0);
    std::vector<std::size_t> occupancy(static_cast<std::size_t>(cfg.K));
    std::vector<char> allowed(static_cast<std::size_t>(cfg.K));

    for (int sweep = 0; sweep < cfg.iter_max; ++sweep) {
        std::size_t moved = 0;
        std::fill(visited.begin(), visited.end(), 0);
        for (PointIndex x : order) {
            if (skip_visited && visited[x]) continue;
            const std::vector<PointIndex> group = index.func_must(x);
            if (skip_visited)
                for (PointIndex p : group) visited[p] = 1;

            std::fill(occupancy.begin(), occupancy.end(), 0);
            for (PointIndex z : index.func_cannot(x)) ++occupancy[static_cast<std::size_t>(g[z])];
            const std::size_t least = *std::min_element(occupancy.begin(), occupancy.end());
            for (std::size_t y = 0; y < occupancy.size(); ++y) allowed[y] = occupancy[y] == least;

            const std::vector<double> deltas = move_deltas(stats, model, g, group, beta);
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t y = 0; y < deltas.size(); ++y)
                if (allowed[y]) best = std::min(best, deltas[y]);

            const ClusterId current = g[x];
            const bool single = std::all_of(group.begin(), group.end(),
                                            [&](PointIndex p) { return g[p] == current; });
            const bool current_allowed = single && allowed[static_cast<std::size_t>(current)];
            if (current_allowed && deltas[static_cast<std::size_t>(current)] <= best + kTieTolerance)
                continue;

            ClusterId target = 0;
            while (!(allowed[static_cast<std::size_t>(target)] &&
                     deltas[static_cast<std::size_t>(target)] <= best + kTieTolerance))
                ++target;
            if (observer)
                observer(MoveEvent{x, current, target, deltas[static_cast<std::size_t>(target)],
                                   current_allowed});
            apply_move(stats, model, g, group, target);
            ++moved;
        }
        result.iters = sweep + 1;
        result.moves += moved;
        // Resynchronise to keep incremental drift out of later decisions.
        stats = aggregate_joint(model, g);
        if (moved == 0) break;
    }
    result.cost = cost(stats, model, beta);
    return result;
}

std::vector<double> annealing_schedule(double beta_target, double delta) {
    if (!(beta_target >= 0.0 && beta_target <= 1.0)) throw InputError("beta target must lie in [0, 1]");
    if (!(delta > 0.0 && delta <= 1.0)) throw InputError("annealing step must lie in (0, 1]");
    std::vector<double> betas{1.0};
    for (int step = 1; betas.back() > beta_target; ++step) {
        const double beta = 1.0 - step * delta;
        betas.push_back(beta <= beta_target + 1e-12 ? beta_target : beta);
    }
    return betas;
}

AnnealedResult optimize_annealed(const TransitionModel& model, const CliqueIndex& index,
                                 const SolverConfig& cfg) {
    cfg.validate();
    AnnealedResult out;
    std::optional<Partition> warm;
    for (double beta : annealing_schedule(cfg.beta_target, cfg.delta)) {
        SequentialResult stage = optimize_sequential(model, index, beta, cfg, warm);
        if (!warm) out.init_fallbacks = stage.init_fallbacks;
        out.stages.push_back(StageRecord{beta, stage.cost, stage.iters});
        out.cost = stage.cost;
        warm = std::move(stage.partition);
    }
    out.partition = std::move(*warm);
    return out;
}

AnnealedResult optimize(const TransitionModel& model, const CliqueIndex& index,
                        const SolverConfig& cfg) {
    if (cfg.anneal) return optimize_annealed(model, index, cfg);
    SequentialResult seq = optimize_sequential(model, index, cfg.beta_target, cfg);
    AnnealedResult out;
    out.partition = std::move(seq.partition);
    out.cost = seq.cost;
    out.stages.push_back(StageRecord{cfg.beta_target, seq.cost, seq.iters});
    out.init_fallbacks = seq.init_fallbacks;
    return out;
}

}  // namespace mcagg
