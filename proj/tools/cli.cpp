#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "mcagg/constraints.hpp"
#include "mcagg/dataset.hpp"
#include "mcagg/errors.hpp"
#include "mcagg/eval.hpp"
#include "mcagg/markov.hpp"
#include "mcagg/solver.hpp"

namespace mcagg::cli {

namespace {

using nlohmann::json;

struct CliConfig {
    std::string data;
    std::string label_col;
    std::string constraints;
    bool normalize = false;
    std::size_t pca = 0;
    std::string mode = "all_classes";
    ExperimentConfig exp = [] {
        ExperimentConfig e;
        e.solver.K = 0;
        return e;
    }();
    double scale_override = 0.0;

    std::string out;
    std::string format;
    std::string dump_model;

    CirclesParams circles;
    std::string axis = "k";
    std::vector<double> grid;
};

SideInfoKind parse_mode(const std::string& mode) {
    if (mode == "all_classes") return SideInfoKind::AllClasses;
    if (mode == "two_classes") return SideInfoKind::TwoClasses;
    if (mode == "pairwise") return SideInfoKind::Pairwise;
    throw InputError("unknown side-information mode '" + mode + "'");
}

json config_json(const CliConfig& cfg) {
    json j = to_json(cfg.exp);
    j["data"] = cfg.data;
    j["label_col"] = cfg.label_col;
    j["constraints"] = cfg.constraints;
    j["normalize"] = cfg.normalize;
    j["pca"] = cfg.pca;
    return j;
}

void load_config_file(const std::string& path, CliConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("config " + path + " is not valid JSON: " + e.what());
    }
    // Accept either a bare config block or a full `cluster` result.
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    cfg.exp = experiment_config_from_json(j);
    if (cfg.exp.kernel.scale_override) cfg.scale_override = *cfg.exp.kernel.scale_override;
    cfg.mode = j.contains("side_info") ? j["side_info"].value("mode", cfg.mode) : cfg.mode;
    cfg.data = j.value("data", cfg.data);
    cfg.label_col = j.value("label_col", cfg.label_col);
    cfg.constraints = j.value("constraints", cfg.constraints);
    cfg.normalize = j.value("normalize", cfg.normalize);
    cfg.pca = j.value("pca", cfg.pca);
}

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return std::nullopt;
}

void add_data_options(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--data", cfg.data, "Input CSV (header row, comma separated)");
    sub->add_option("--label-col", cfg.label_col, "Name of the ground-truth label column");
    sub->add_flag("--normalize", cfg.normalize, "Z-score every feature before clustering");
    sub->add_option("--pca", cfg.pca, "Reduce to this many principal components (0 = off)");
}

void add_side_info_options(CLI::App* sub, CliConfig& cfg) {
    sub->add_option("--fraction", cfg.exp.side_info.fraction,
                    "Labelled fraction (or (|ML|+|CL|)/N for --mode pairwise)");
    sub->add_option("--mode", cfg.mode, "Side information: all_classes, two_classes, pairwise")
        ->check(CLI::IsMember({"all_classes", "two_classes", "pairwise"}));
    sub->add_option("--noise", cfg.exp.side_info.noise, "Share of sampled labels made wrong");
}

void add_solver_options(CLI::App* sub, CliConfig& cfg) {
    auto& e = cfg.exp;
    sub->add_option("--k", e.kernel.k, "Neighbours behind the kernel scale");
    sub->add_option("--scale-power", e.kernel.scale_power,
                    "1: divide by the mean squared kNN distance; 2: by its square root")
        ->check(CLI::IsMember({1, 2}));
    sub->add_option("--scale", cfg.scale_override, "Explicit kernel scale (overrides --k)");
    sub->add_option("--K", e.solver.K, "Number of clusters (default: number of classes)");
    sub->add_option("--beta-target,--beta", e.solver.beta_target, "Target beta in [0, 1]");
    sub->add_option("--delta", e.solver.delta, "Annealing step");
    sub->add_option("--iter-max", e.solver.iter_max, "Maximum sweeps per sequential run");
    sub->add_option("--seed", e.solver.seed, "Master seed");
    sub->add_option("--runs", e.runs, "Independent runs");
    sub->add_flag("--anneal,!--no-anneal", e.solver.anneal, "Beta annealing (default on)");
    sub->add_flag("--shuffle-order", e.solver.shuffle_order, "Visit points in seeded random order");
    sub->add_flag("!--no-propagate-must", e.propagation.propagate_must,
                  "Move only explicit must-link partners together");
    sub->add_flag("!--no-cannot", e.propagation.use_cannot, "Ignore all cannot-links");
    add_side_info_options(sub, cfg);
}

std::ostream& open_output(const CliConfig& cfg, std::ofstream& file, std::ostream& fallback) {
    if (cfg.out.empty()) return fallback;
    file.open(cfg.out);
    if (!file) throw InputError("cannot write " + cfg.out);
    return file;
}

Dataset load_dataset(const CliConfig& cfg) {
    if (cfg.data.empty()) throw InputError("--data is required");
    Dataset data = load_csv(cfg.data, cfg.label_col.empty() ? std::nullopt
                                                            : std::optional<std::string>(cfg.label_col));
    if (cfg.normalize) data = zscore_normalize(data);
    if (cfg.pca > 0) data = pca_reduce(data, cfg.pca);
    return data;
}

void finalize(CliConfig& cfg) {
    cfg.exp.side_info.kind = parse_mode(cfg.mode);
    if (cfg.scale_override > 0.0) cfg.exp.kernel.scale_override = cfg.scale_override;
    if (cfg.exp.runs < 1) throw InputError("--runs must be >= 1");
}

void dump_matrix(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << m(i, j);
        out << '\n';
    }
}

void dump_model(const TransitionModel& model, const std::string& prefix) {
    dump_matrix(model.weights, prefix + "_W.csv");
    dump_matrix(model.transition, prefix + "_P.csv");
    dump_matrix(model.stationary, prefix + "_mu.csv");
}

int cmd_cluster(CliConfig& cfg, std::ostream& out, std::ostream& err) {
    finalize(cfg);
    const Dataset data = load_dataset(cfg);
    std::optional<Partition> truth;
    if (data.labels) truth = data.ground_truth();
    if (cfg.exp.solver.K == 0) {
        if (!truth) throw InputError("--K is required when the dataset has no label column");
        cfg.exp.solver.K = truth->K;
    }
    cfg.exp.solver.validate();

    const TransitionModel model = build_transition(data.points, cfg.exp.kernel);
    if (!cfg.exp.kernel.scale_override && model.k < cfg.exp.kernel.k)
        err << "warning: k = " << cfg.exp.kernel.k << " exceeds N - 1; using k = " << model.k << '\n';
    if (!cfg.dump_model.empty()) dump_model(model, cfg.dump_model);

    std::optional<ConstraintSet> fixed;
    if (!cfg.constraints.empty()) {
        fixed = read_constraint_file(cfg.constraints);
        propagate(*fixed, data.num_points(), cfg.exp.propagation);  // reject contradictions up front
    }
    const bool sample = !fixed && (cfg.exp.side_info.fraction > 0.0);
    if (sample && !truth) throw InputError("sampling side information needs --label-col");

    const auto runs = static_cast<std::size_t>(cfg.exp.runs);
    std::vector<RunOutcome> outcomes(runs);
    std::vector<ConstraintSet> used(runs);
    std::vector<std::exception_ptr> errors(runs);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < runs; ++r) {
        try {
            const std::uint64_t seed = run_seed(cfg.exp.solver.seed, static_cast<int>(r) + 1);
            if (fixed) {
                used[r] = *fixed;
            } else if (sample) {
                used[r] = sample_constraints(truth->assign, truth->K, cfg.exp.side_info, derive_seed(seed, 0));
            }
            outcomes[r] = execute_run(model, used[r], cfg.exp, seed, truth);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs; ++r)
        if (outcomes[r].record.cost < outcomes[best].record.cost) best = r;
    const RunOutcome& win = outcomes[best];
    const CostTerms terms = cost_terms(aggregate_joint(model, win.result.partition), model);

    json result;
    result["assignments"] = win.result.partition.assign;
    result["K"] = win.result.partition.K;
    result["cost"] = win.result.cost;
    result["cost_terms"] = {{"h_y2_given_y1", terms.h_y2_given_y1},
                            {"h_y2_given_x1", terms.h_y2_given_x1},
                            {"mutual_information", terms.mutual_info}};
    result["violations"] = {{"must", win.record.violated.must}, {"cannot", win.record.violated.cannot}};
    result["num_constraints"] = win.record.num_constraints;
    result["init_fallbacks"] = win.record.init_fallbacks;
    result["best_run"] = best + 1;
    json trace = json::array();
    for (const auto& st : win.result.stages) trace.push_back({{"beta", st.beta}, {"cost", st.cost}, {"iters", st.iters}});
    result["stage_trace"] = std::move(trace);
    json per_run = json::array();
    double nmi_sum = 0.0;
    for (const auto& o : outcomes) {
        json rec = {{"seed", o.record.seed}, {"cost", o.record.cost}, {"iters", o.record.iters},
                    {"must_violated", o.record.violated.must},
                    {"cannot_violated", o.record.violated.cannot}};
        if (truth) rec["nmi"] = o.record.nmi;
        nmi_sum += o.record.nmi;
        per_run.push_back(std::move(rec));
    }
    result["runs"] = std::move(per_run);
    if (truth) {
        const double mean = nmi_sum / static_cast<double>(runs);
        double var = 0.0;
        for (const auto& o : outcomes) var += (o.record.nmi - mean) * (o.record.nmi - mean);
        result["nmi"] = win.record.nmi;
        result["nmi_mean"] = mean;
        result["nmi_std"] = std::sqrt(var / static_cast<double>(runs));
    }
    result["model"] = {{"scale", model.scale}, {"denominator", model.denominator}, {"k", model.k}};
    result["dataset"] = {{"name", data.name}, {"points", data.num_points()}, {"features", data.num_features()}};
    result["config"] = config_json(cfg);

    std::ofstream file;
    std::ostream& dest = open_output(cfg, file, out);
    if (cfg.format == "csv") {
        dest << "point,cluster\n";
        for (std::size_t i = 0; i < win.result.partition.size(); ++i)
            dest << i << ',' << win.result.partition[i] << '\n';
    } else {
        dest << result.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_generate(CliConfig& cfg, std::ostream& out) {
    const Dataset data = generate_circles(cfg.circles);
    std::ofstream file;
    write_csv(data, open_output(cfg, file, out));
    return kExitOk;
}

int cmd_sweep(CliConfig& cfg, std::ostream& out) {
    finalize(cfg);
    const Dataset data = load_dataset(cfg);
    if (!data.labels) throw InputError("sweep needs --label-col");
    if (cfg.grid.empty()) throw InputError("--grid needs at least one value");
    const SweepAxis axis = parse_sweep_axis(cfg.axis);
    const auto rows = sweep(data, axis, cfg.grid, cfg.exp);
    std::ofstream file;
    std::ostream& dest = open_output(cfg, file, out);
    if (cfg.format == "json") {
        json j = to_json(axis, rows);
        j["config"] = config_json(cfg);
        dest << j.dump(2) << '\n';
    } else {
        write_sweep_csv(axis, rows, dest);
    }
    return kExitOk;
}

int cmd_constraints(CliConfig& cfg, std::ostream& out) {
    finalize(cfg);
    const Dataset data = load_dataset(cfg);
    if (!data.labels) throw InputError("constraints needs --label-col");
    const ConstraintSet cs =
        sample_constraints(*data.labels, data.num_classes(), cfg.exp.side_info, cfg.exp.solver.seed);
    std::ofstream file;
    write_constraints(cs, open_output(cfg, file, out));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Semi-supervised clustering by constrained Markov chain aggregation", "mcagg"};
    app.require_subcommand(1);

    try {
        if (const auto path = find_config_arg(args)) load_config_file(*path, cfg);

        std::string config_path;
        auto* cluster = app.add_subcommand("cluster", "Cluster a dataset and emit a JSON result");
        add_data_options(cluster, cfg);
        add_solver_options(cluster, cfg);
        cluster->add_option("--constraints", cfg.constraints, "Constraint file (ML/CL lines)");
        cluster->add_option("--dump-model", cfg.dump_model, "Write <prefix>_W.csv, _P.csv, _mu.csv");
        cluster->add_option("--config", config_path, "JSON config block (or a previous result)");
        cluster->add_option("--out", cfg.out, "Output path (default stdout)");
        cluster->add_option("--format", cfg.format, "json (default) or csv assignments")
            ->check(CLI::IsMember({"json", "csv"}));

        auto* generate = app.add_subcommand("generate", "Write the concentric circles dataset as CSV");
        generate->add_option("--n-per-circle", cfg.circles.points_per_circle, "Points per ring");
        generate->add_option("--radii", cfg.circles.radii, "Ring radii")->delimiter(',');
        generate->add_option("--noise-std", cfg.circles.noise_std, "Per-axis Gaussian noise");
        generate->add_option("--seed", cfg.circles.seed, "Random seed");
        generate->add_option("--out", cfg.out, "Output path (default stdout)");

        auto* sweep_cmd = app.add_subcommand("sweep", "Repeat experiments over a parameter grid");
        add_data_options(sweep_cmd, cfg);
        add_solver_options(sweep_cmd, cfg);
        sweep_cmd->add_option("--axis", cfg.axis, "k, beta, fraction, noise or n_constraints")
            ->check(CLI::IsMember({"k", "beta", "fraction", "noise", "n_constraints"}));
        sweep_cmd->add_option("--grid", cfg.grid, "Comma-separated grid values")->delimiter(',');
        sweep_cmd->add_option("--config", config_path, "JSON config block");
        sweep_cmd->add_option("--out", cfg.out, "Output path (default stdout)");
        sweep_cmd->add_option("--format", cfg.format, "csv (default) or json")
            ->check(CLI::IsMember({"json", "csv"}));

        auto* constraints = app.add_subcommand("constraints", "Sample a constraint file from labels");
        add_data_options(constraints, cfg);
        add_side_info_options(constraints, cfg);
        constraints->add_option("--seed", cfg.exp.solver.seed, "Random seed");
        constraints->add_option("--out", cfg.out, "Output path (default stdout)");

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(std::move(reversed));
        } catch (const CLI::ParseError& e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? kExitOk : kExitInput;
        }

        if (cluster->parsed()) return cmd_cluster(cfg, out, err);
        if (generate->parsed()) return cmd_generate(cfg, out);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, out);
        if (constraints->parsed()) return cmd_constraints(cfg, out);
        return kExitInput;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace mcagg::cli
