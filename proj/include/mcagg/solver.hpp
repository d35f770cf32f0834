#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "mcagg/constraints.hpp"
#include "mcagg/markov.hpp"
#include "mcagg/partition.hpp"

namespace mcagg {

enum class TieBreak {
    /// Stay put when the current cluster is among the minimisers, otherwise
    /// take the smallest minimising id.
    KeepCurrent,
};

struct SolverConfig {
    int K = 2;
    double beta_target = 0.5;
    double delta = 0.05;  // annealing step
    int iter_max = 100;   // sweeps per sequential run
    std::uint64_t seed = 0;
    TieBreak tie_break = TieBreak::KeepCurrent;
    bool anneal = true;
    /// Visit points in a seeded random order instead of ascending index.
    bool shuffle_order = false;

    /// Throws InputError on K < 1, beta_target outside [0,1], delta outside
    /// (0,1] or iter_max < 1.
    void validate() const;
};

/// Candidates whose delta is within this of the best are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

struct MoveEvent {
    PointIndex pivot;
    ClusterId from;
    ClusterId to;
    double delta;
    bool current_allowed;  // whether staying put was a permitted option
};

using MoveObserver = std::function<void(const MoveEvent&)>;

struct SequentialResult {
    Partition partition;
    double cost = 0.0;
    int iters = 0;           // sweeps executed
    std::size_t moves = 0;   // accepted group moves
    std::size_t init_fallbacks = 0;  // from greedy coloring, when it ran
};

/// Constrained Hartigan-style descent on the aggregation cost at fixed beta.
///
/// Without `init`, starts from greedy_coloring(index, cfg.K, cfg.seed). Each
/// sweep visits every point once; the point's must-set moves as a unit to
/// the best cluster not used by its cannot-set (or, if every cluster is
/// blocked, the least blocked ones). Stops after a sweep without moves or
/// after cfg.iter_max sweeps. Throws InvalidInitialization when `init`
/// separates a must-link clique.
SequentialResult optimize_sequential(const TransitionModel& model, const CliqueIndex& index,
                                     double beta, const SolverConfig& cfg,
                                     const std::optional<Partition>& init = std::nullopt,
                                     const MoveObserver& observer = {});

struct StageRecord {
    double beta;
    double cost;
    int iters;
};

struct AnnealedResult {
    Partition partition;
    double cost = 0.0;
    std::vector<StageRecord> stages;
    std::size_t init_fallbacks = 0;
};

/// Betas visited by the annealing schedule: 1, 1 - delta, ..., beta_target.
std::vector<double> annealing_schedule(double beta_target, double delta);

/// Sequential descent at beta = 1 from the greedy coloring, then at each
/// smaller beta of the schedule starting from the previous stage's result.
AnnealedResult optimize_annealed(const TransitionModel& model, const CliqueIndex& index,
                                 const SolverConfig& cfg);

/// optimize_annealed when cfg.anneal, else a single sequential run at
/// cfg.beta_target (reported as a one-stage trace).
AnnealedResult optimize(const TransitionModel& model, const CliqueIndex& index,
                        const SolverConfig& cfg);

}  // namespace mcagg
