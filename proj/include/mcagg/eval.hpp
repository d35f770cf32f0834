#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcagg/constraints.hpp"
#include "mcagg/dataset.hpp"
#include "mcagg/markov.hpp"
#include "mcagg/solver.hpp"

namespace mcagg {

/// 2 I(A;B) / (H(A) + H(B)) under the uniform distribution over points.
/// Two constant labelings score 1, exactly one constant labeling scores 0.
/// Throws ShapeError on a length mismatch or empty input.
double nmi(const std::vector<int>& truth, const std::vector<int>& estimate);
double nmi(const Partition& truth, const Partition& estimate);

enum class SideInfoKind {
    AllClasses,  // partition-level labels from every class
    TwoClasses,  // partition-level labels from one qualifying class pair
    Pairwise,    // fraction = (|ML| + |CL|) / N sampled pairs
};

struct SideInfoSpec {
    SideInfoKind kind = SideInfoKind::AllClasses;
    double fraction = 0.0;
    double noise = 0.0;  // share of sampled labels replaced by wrong ones
};

struct ExperimentConfig {
    KernelOptions kernel;
    SideInfoSpec side_info;
    PropagationOptions propagation;
    SolverConfig solver;  // solver.K == 0 means "number of ground-truth classes"
    int runs = 10;
};

struct RunRecord {
    std::uint64_t seed = 0;
    double nmi = 0.0;
    double cost = 0.0;
    int iters = 0;  // total sweeps over all stages
    ViolationCount violated;
    std::size_t num_constraints = 0;
    std::size_t init_fallbacks = 0;
};

struct RunSummary {
    double nmi_mean = 0.0;
    double nmi_std = 0.0;  // population standard deviation over runs
    double cost_mean = 0.0;
    double violations_mean = 0.0;
    std::vector<RunRecord> per_run;
    ExperimentConfig config;
};

/// Seed of run r (1-based) under master seed s: s + r.
std::uint64_t run_seed(std::uint64_t master, int run);

/// Independent sub-stream of a run seed (side info, corruption, solver).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Side-information sampling for one run, converted to pairwise constraints.
ConstraintSet sample_constraints(const std::vector<int>& labels, int num_classes,
                                 const SideInfoSpec& spec, std::uint64_t seed);

struct RunOutcome {
    AnnealedResult result;
    RunRecord record;
};

/// One solver run on fixed constraints. `config.solver.K` must be resolved
/// (non-zero); the solver seed is derived from `seed`. NMI is filled in only
/// when `truth` is given.
RunOutcome execute_run(const TransitionModel& model, const ConstraintSet& constraints,
                       const ExperimentConfig& config, std::uint64_t seed,
                       const std::optional<Partition>& truth = std::nullopt);

/// Runs `config.runs` independent seeds (in parallel) on a labelled dataset.
RunSummary run_experiment(const Dataset& data, const ExperimentConfig& config);
RunSummary run_experiment(const Dataset& data, const TransitionModel& model,
                          const ExperimentConfig& config);

enum class SweepAxis { K_Neighbors, Beta, Fraction, Noise, NumConstraints };

SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
    double value;
    RunSummary summary;
};

/// One experiment per grid value with only `axis` changed. NumConstraints
/// switches side information to SideInfoKind::Pairwise.
std::vector<SweepRow> sweep(const Dataset& data, SweepAxis axis, const std::vector<double>& grid,
                            const ExperimentConfig& base);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunSummary& summary);
nlohmann::json to_json(SweepAxis axis, const std::vector<SweepRow>& rows);

/// Columns: axis,value,run,seed,nmi,nmi_std,cost,iters,must_violated,
/// cannot_violated. One row per (value, run), then an aggregate row with
/// run = "mean".
void write_sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace mcagg
