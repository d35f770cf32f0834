#include "mcagg/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <stdexcept>

#include "mcagg/errors.hpp"

namespace mcagg {

namespace {

// Summed in ascending count order so the result ignores label values.
double plug_in_entropy(const std::map<int, std::size_t>& counts, double n) {
    std::vector<std::size_t> sorted;
    sorted.reserve(counts.size());
    for (const auto& [label, c] : counts) sorted.push_back(c);
    std::sort(sorted.begin(), sorted.end());
    double h = 0.0;
    for (std::size_t c : sorted) {
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

const char* kind_name(SideInfoKind kind) {
    switch (kind) {
        case SideInfoKind::AllClasses: return "all_classes";
        case SideInfoKind::TwoClasses: return "two_classes";
        case SideInfoKind::Pairwise: return "pairwise";
    }
    return "all_classes";
}

SideInfoKind parse_kind(const std::string& s) {
    if (s == "all_classes") return SideInfoKind::AllClasses;
    if (s == "two_classes") return SideInfoKind::TwoClasses;
    if (s == "pairwise") return SideInfoKind::Pairwise;
    throw InputError("unknown side-information mode '" + s + "'");
}

void summarise(RunSummary& summary) {
    const auto runs = static_cast<double>(summary.per_run.size());
    double nmi_sum = 0.0;
    double cost_sum = 0.0;
    double viol_sum = 0.0;
    for (const auto& r : summary.per_run) {
        nmi_sum += r.nmi;
        cost_sum += r.cost;
        viol_sum += static_cast<double>(r.violated.total());
    }
    summary.nmi_mean = nmi_sum / runs;
    summary.cost_mean = cost_sum / runs;
    summary.violations_mean = viol_sum / runs;
    double var = 0.0;
    for (const auto& r : summary.per_run) var += (r.nmi - summary.nmi_mean) * (r.nmi - summary.nmi_mean);
    summary.nmi_std = std::sqrt(var / runs);
}

}  // namespace

double nmi(const std::vector<int>& truth, const std::vector<int>& estimate) {
    if (truth.size() != estimate.size())
        throw ShapeError("nmi: partitions have lengths " + std::to_string(truth.size()) + " and " +
                         std::to_string(estimate.size()));
    if (truth.empty()) throw ShapeError("nmi: empty partitions");
    const auto n = static_cast<double>(truth.size());
    std::map<int, std::size_t> ca;
    std::map<int, std::size_t> cb;
    std::map<std::pair<int, int>, std::size_t> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++ca[truth[i]];
        ++cb[estimate[i]];
        ++joint[{truth[i], estimate[i]}];
    }
    if (ca.size() == 1 && cb.size() == 1) return 1.0;
    if (ca.size() == 1 || cb.size() == 1) return 0.0;
    const double ha = plug_in_entropy(ca, n);
    const double hb = plug_in_entropy(cb, n);
    // Cell terms keyed by (count, smaller marginal, larger marginal) and summed
    // in that order: exact symmetry and relabeling invariance.
    std::vector<std::array<std::size_t, 3>> cells;
    cells.reserve(joint.size());
    for (const auto& [key, c] : joint) {
        const std::size_t a = ca[key.first];
        const std::size_t b = cb[key.second];
        cells.push_back({c, std::min(a, b), std::max(a, b)});
    }
    std::sort(cells.begin(), cells.end());
    double mi = 0.0;
    for (const auto& [c, a, b] : cells) {
        const double pab = static_cast<double>(c) / n;
        const double pa = static_cast<double>(a) / n;
        const double pb = static_cast<double>(b) / n;
        mi += pab * std::log(pab / (pa * pb));
    }
    return std::clamp(2.0 * mi / (ha + hb), 0.0, 1.0);
}

double nmi(const Partition& truth, const Partition& estimate) {
    return nmi(truth.assign, estimate.assign);
}

std::uint64_t run_seed(std::uint64_t master, int run) {
    return master + static_cast<std::uint64_t>(run);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser
    std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ConstraintSet sample_constraints(const std::vector<int>& labels, int num_classes,
                                 const SideInfoSpec& spec, std::uint64_t seed) {
    if (spec.kind == SideInfoKind::Pairwise) {
        if (spec.noise > 0.0) throw InputError("label noise is not defined for pairwise sampling");
        return sample_pairwise(labels, spec.fraction, derive_seed(seed, 0));
    }
    const SideInfoMode mode =
        spec.kind == SideInfoKind::AllClasses ? SideInfoMode::AllClasses : SideInfoMode::TwoClasses;
    LabelMap labeled = sample_side_info(labels, spec.fraction, mode, derive_seed(seed, 0));
    if (spec.noise > 0.0) labeled = corrupt_labels(labeled, spec.noise, num_classes, derive_seed(seed, 1));
    return from_labels(labeled);
}

RunOutcome execute_run(const TransitionModel& model, const ConstraintSet& constraints,
                       const ExperimentConfig& config, std::uint64_t seed,
                       const std::optional<Partition>& truth) {
    const CliqueIndex index = propagate(constraints, model.size(), config.propagation);
    SolverConfig cfg = config.solver;
    cfg.seed = derive_seed(seed, 1);
    RunOutcome out;
    out.result = optimize(model, index, cfg);
    RunRecord& rec = out.record;
    rec.seed = seed;
    if (truth) rec.nmi = nmi(*truth, out.result.partition);
    rec.cost = out.result.cost;
    for (const auto& st : out.result.stages) rec.iters += st.iters;
    rec.violated = violations(out.result.partition, constraints);
    rec.num_constraints = constraints.size();
    rec.init_fallbacks = out.result.init_fallbacks;
    return out;
}

RunSummary run_experiment(const Dataset& data, const ExperimentConfig& config) {
    data.validate();
    return run_experiment(data, build_transition(data.points, config.kernel), config);
}

RunSummary run_experiment(const Dataset& data, const TransitionModel& model,
                          const ExperimentConfig& config) {
    if (!data.labels) throw InputError("experiments need a dataset with ground-truth labels");
    if (config.runs < 1) throw InputError("runs must be >= 1");
    if (model.size() != data.num_points()) throw InputError("chain size does not match the dataset");
    const Partition truth = data.ground_truth();

    RunSummary summary;
    summary.config = config;
    if (summary.config.solver.K == 0) summary.config.solver.K = truth.K;
    summary.config.solver.validate();
    summary.per_run.resize(static_cast<std::size_t>(config.runs));

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(config.runs));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < config.runs; ++r) {
        try {
            const std::uint64_t seed = run_seed(config.solver.seed, r + 1);
            const ConstraintSet cs =
                sample_constraints(truth.assign, truth.K, config.side_info, derive_seed(seed, 0));
            summary.per_run[static_cast<std::size_t>(r)] =
                execute_run(model, cs, summary.config, seed, truth).record;
        } catch (...) {
            errors[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    summarise(summary);
    return summary;
}

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "k") return SweepAxis::K_Neighbors;
    if (name == "beta") return SweepAxis::Beta;
    if (name == "fraction") return SweepAxis::Fraction;
    if (name == "noise") return SweepAxis::Noise;
    if (name == "n_constraints") return SweepAxis::NumConstraints;
    throw InputError("unknown sweep axis '" + name + "' (k, beta, fraction, noise, n_constraints)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::K_Neighbors: return "k";
        case SweepAxis::Beta: return "beta";
        case SweepAxis::Fraction: return "fraction";
        case SweepAxis::Noise: return "noise";
        case SweepAxis::NumConstraints: return "n_constraints";
    }
    return "k";
}

std::vector<SweepRow> sweep(const Dataset& data, SweepAxis axis, const std::vector<double>& grid,
                            const ExperimentConfig& base) {
    if (grid.empty()) throw InputError("sweep grid is empty");
    data.validate();
    std::optional<TransitionModel> shared;
    if (axis != SweepAxis::K_Neighbors) shared = build_transition(data.points, base.kernel);

    std::vector<SweepRow> rows;
    for (double value : grid) {
        ExperimentConfig cfg = base;
        switch (axis) {
            case SweepAxis::K_Neighbors:
                if (!(value >= 1.0)) throw InputError("k grid values must be >= 1");
                cfg.kernel.k = static_cast<std::size_t>(std::llround(value));
                break;
            case SweepAxis::Beta: cfg.solver.beta_target = value; break;
            case SweepAxis::Fraction: cfg.side_info.fraction = value; break;
            case SweepAxis::Noise: cfg.side_info.noise = value; break;
            case SweepAxis::NumConstraints:
                cfg.side_info.kind = SideInfoKind::Pairwise;
                cfg.side_info.fraction = value;
                break;
        }
        rows.push_back(SweepRow{value, shared ? run_experiment(data, *shared, cfg)
                                              : run_experiment(data, cfg)});
    }
    return rows;
}

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["k"] = c.kernel.k;
    j["scale_override"] = c.kernel.scale_override ? nlohmann::json(*c.kernel.scale_override) : nlohmann::json();
    j["scale_power"] = c.kernel.scale_power;
    j["side_info"] = {{"mode", kind_name(c.side_info.kind)},
                      {"fraction", c.side_info.fraction},
                      {"noise", c.side_info.noise}};
    j["propagate_must"] = c.propagation.propagate_must;
    j["use_cannot"] = c.propagation.use_cannot;
    j["K"] = c.solver.K;
    j["beta_target"] = c.solver.beta_target;
    j["delta"] = c.solver.delta;
    j["iter_max"] = c.solver.iter_max;
    j["seed"] = c.solver.seed;
    j["anneal"] = c.solver.anneal;
    j["shuffle_order"] = c.solver.shuffle_order;
    j["tie_break"] = "keep_current";
    j["runs"] = c.runs;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        c.kernel.k = j.value("k", c.kernel.k);
        if (j.contains("scale_override") && !j["scale_override"].is_null())
            c.kernel.scale_override = j["scale_override"].get<double>();
        c.kernel.scale_power = j.value("scale_power", c.kernel.scale_power);
        if (j.contains("side_info")) {
            const auto& s = j["side_info"];
            c.side_info.kind = parse_kind(s.value("mode", std::string("all_classes")));
            c.side_info.fraction = s.value("fraction", 0.0);
            c.side_info.noise = s.value("noise", 0.0);
        }
        c.propagation.propagate_must = j.value("propagate_must", true);
        c.propagation.use_cannot = j.value("use_cannot", true);
        c.solver.K = j.value("K", c.solver.K);
        c.solver.beta_target = j.value("beta_target", c.solver.beta_target);
        c.solver.delta = j.value("delta", c.solver.delta);
        c.solver.iter_max = j.value("iter_max", c.solver.iter_max);
        c.solver.seed = j.value("seed", c.solver.seed);
        c.solver.anneal = j.value("anneal", c.solver.anneal);
        c.solver.shuffle_order = j.value("shuffle_order", c.solver.shuffle_order);
        c.runs = j.value("runs", c.runs);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("bad configuration block: ") + e.what());
    }
    return c;
}

nlohmann::json to_json(const RunSummary& s) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : s.per_run) {
        runs.push_back({{"seed", r.seed},
                        {"nmi", r.nmi},
                        {"cost", r.cost},
                        {"iters", r.iters},
                        {"must_violated", r.violated.must},
                        {"cannot_violated", r.violated.cannot},
                        {"num_constraints", r.num_constraints},
                        {"init_fallbacks", r.init_fallbacks}});
    }
    return {{"nmi_mean", s.nmi_mean},
            {"nmi_std", s.nmi_std},
            {"cost_mean", s.cost_mean},
            {"violations_mean", s.violations_mean},
            {"per_run", std::move(runs)},
            {"config", to_json(s.config)}};
}

nlohmann::json to_json(SweepAxis axis, const std::vector<SweepRow>& rows) {
    nlohmann::json out = {{"axis", to_string(axis)}, {"rows", nlohmann::json::array()}};
    for (const auto& row : rows) {
        nlohmann::json entry = to_json(row.summary);
        entry["value"] = row.value;
        out["rows"].push_back(std::move(entry));
    }
    return out;
}

void write_sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows, std::ostream& out) {
    const std::string name = to_string(axis);
    out << "axis,value,run,seed,nmi,nmi_std,cost,iters,must_violated,cannot_violated\n";
    const auto old_precision = out.precision(12);
    for (const auto& row : rows) {
        for (std::size_t r = 0; r < row.summary.per_run.size(); ++r) {
            const auto& rec = row.summary.per_run[r];
            out << name << ',' << row.value << ',' << r + 1 << ',' << rec.seed << ',' << rec.nmi
                << ",," << rec.cost << ',' << rec.iters << ',' << rec.violated.must << ','
                << rec.violated.cannot << '\n';
        }
        out << name << ',' << row.value << ",mean,," << row.summary.nmi_mean << ','
            << row.summary.nmi_std << ',' << row.summary.cost_mean << ",,,\n";
    }
    out.precision(old_precision);
}

}  // namespace mcagg
