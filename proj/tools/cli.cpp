#include "cli.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "evbranch/badmm.hpp"
#include "evbranch/core.hpp"
#include "evbranch/em.hpp"
#include "evbranch/eval.hpp"
#include "evbranch/io.hpp"
#include "evbranch/simulator.hpp"

namespace evbranch::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "evbranch 0.1.0";

/// Validation failures detected in the CLI layer (exit code 4).
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
    return fs::path(base.string() + suffix);
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ValidationFailure("--lambda-grid: cannot parse '" + item + "'");
        }
    }
    if (out.empty()) {
        throw ValidationFailure("--lambda-grid is empty");
    }
    return out;
}

/// Flag > config file > default: fill `value` from the config only when the flag is absent.
template <class T>
void from_config(const CLI::Option* opt, const json& config, const char* key, T& value) {
    if (opt->count() == 0 && config.contains(key)) {
        value = config.at(key).get<T>();
    }
}

json load_config(const std::string& path) {
    if (path.empty()) {
        return json::object();
    }
    try {
        json j = json::parse(io::read_text(path));
        if (!j.is_object()) {
            throw io::ParseError(path + ": config must be a JSON object");
        }
        return j;
    } catch (const json::exception& e) {
        throw io::ParseError(path + ": " + e.what());
    }
}

void write_manifest(const fs::path& path, const std::string& command, json inputs,
                    json outputs, std::uint64_t seed, json config) {
    json manifest = {{"tool", kToolVersion},
                     {"command", command},
                     {"inputs", std::move(inputs)},
                     {"outputs", std::move(outputs)},
                     {"seed", seed},
                     {"config", std::move(config)}};
    io::write_text(path, manifest.dump(2) + "\n");
}

void check_max_n(const Dataset& data, std::size_t max_n) {
    for (const auto& seq : data) {
        if (seq.size() > max_n) {
            throw ValidationFailure("sequence '" + seq.id() + "' has " + std::to_string(seq.size()) +
                                    " events, above --max-n " + std::to_string(max_n));
        }
    }
}

void apply_threads(int threads) {
    if (threads > 0) {
        set_threads(threads);
    }
}

// Shared BADMM flags for fit and infer.
struct BadmmFlags {
    double lambda = 1.0;
    double alpha = 0.5;
    double rho = 1.0;
    std::string reg = "nuclear";
    std::size_t iters = 2;
    double tol = 1e-6;
    double floor = 1e-12;
    std::vector<CLI::Option*> options;

    void add(CLI::App* app) {
        options.push_back(app->add_option("--lambda", lambda, "Regularizer weight (>= 0)"));
        options.push_back(app->add_option("--alpha", alpha, "Sparse vs low-rank trade-off in [0, 1]"));
        options.push_back(app->add_option("--rho", rho, "Augmented Lagrangian weight"));
        options.push_back(app->add_option("--reg", reg, "Structural regularizer")
                              ->check(CLI::IsMember({"nuclear", "group"})));
        options.push_back(app->add_option("--badmm-iters", iters, "BADMM iterations (unrolled layers)"));
        options.push_back(app->add_option("--badmm-tol", tol, "Stop when both primal residuals fall below"));
        options.push_back(app->add_option("--floor", floor, "Log-domain clamp for zero entries"));
    }

    bool any_given() const {
        for (const auto* o : options) {
            if (o->count() > 0) return true;
        }
        return false;
    }

    void resolve(const json& config) {
        const char* keys[] = {"lambda", "alpha", "rho", "reg", "badmm_iters", "badmm_tol", "floor"};
        from_config(options[0], config, keys[0], lambda);
        from_config(options[1], config, keys[1], alpha);
        from_config(options[2], config, keys[2], rho);
        from_config(options[3], config, keys[3], reg);
        from_config(options[4], config, keys[4], iters);
        from_config(options[5], config, keys[5], tol);
        from_config(options[6], config, keys[6], floor);
    }

    BadmmConfig config() const {
        BadmmConfig cfg;
        cfg.lambda = lambda;
        cfg.alpha = alpha;
        cfg.rho = rho;
        cfg.regularizer = parse_regularizer(reg);
        cfg.max_iters = iters;
        cfg.tol = tol;
        cfg.floor = floor;
        cfg.validate();
        return cfg;
    }
};

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string params;
    std::string out;
    std::string labels;
    std::size_t num_seqs = 1;
    double horizon = 100.0;
    std::uint64_t seed = 0;
    std::size_t max_events = 100'000;
    std::string method = "branching";
    int threads = 0;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    apply_threads(a.threads);
    const HawkesParams params = io::params_from_json([&] {
        try {
            return json::parse(io::read_text(a.params));
        } catch (const json::exception& e) {
            throw io::ParseError(a.params + ": " + e.what());
        }
    }());
    SimConfig cfg{a.horizon, a.seed, a.max_events};
    const SimMethod method = a.method == "thinning" ? SimMethod::thinning : SimMethod::branching;
    const SimulatedDataset data = simulate_dataset(params, cfg, a.num_seqs, method);

    const fs::path out_path = a.out;
    io::write_text(out_path, io::format_sequences(data.sequences));
    json outputs = json::array({out_path.string()});
    if (method == SimMethod::branching) {
        const fs::path labels_path = a.labels.empty() ? with_suffix(out_path, ".labels.jsonl")
                                                      : fs::path(a.labels);
        io::write_text(labels_path, io::format_labels(data.labels));
        outputs.push_back(labels_path.string());
    }
    write_manifest(with_suffix(out_path, ".manifest.json"), "simulate", {{"params", a.params}},
                   outputs, a.seed,
                   {{"params", io::params_to_json(params)},
                    {"num_seqs", a.num_seqs},
                    {"horizon", a.horizon},
                    {"max_events", a.max_events},
                    {"method", a.method},
                    {"branching_ratio", spectral_stability(params)}});
    std::size_t total = 0;
    for (const auto& s : data.sequences) total += s.size();
    out << "wrote " << data.sequences.size() << " sequences (" << total << " events) to "
        << out_path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------- shared data loading

struct LoadedData {
    Dataset data;
    std::size_t num_types = 0;
};

LoadedData load_dataset(const std::string& path, const std::string& types_path,
                        std::size_t explicit_types) {
    std::optional<io::TypeMap> types;
    if (!types_path.empty()) {
        types = io::read_type_map(types_path);
    }
    LoadedData out{io::read_sequences(path, types ? &*types : nullptr), 0};
    std::size_t needed = 0;
    for (const auto& s : out.data) {
        needed = std::max(needed, s.min_num_types());
    }
    if (types) {
        for (const auto& [label, idx] : *types) {
            needed = std::max(needed, idx + 1);
        }
    }
    if (explicit_types > 0) {
        if (explicit_types < needed) {
            throw ValidationFailure("--num-types " + std::to_string(explicit_types) +
                                    " is smaller than the largest type index in the data");
        }
        needed = explicit_types;
    }
    out.num_types = needed;
    return out;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
    std::string data;
    std::string types;
    std::string out;
    std::string config;
    std::string lambda_grid;
    std::string save_resp = "none";
    std::size_t num_types = 0;
    std::size_t em_iters = 100;
    double tol = 1e-5;
    double beta = 1.0;
    std::uint64_t seed = 0;
    int threads = 0;
    std::size_t max_n = 5000;
    BadmmFlags badmm;
    CLI::Option* em_iters_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* max_n_opt = nullptr;
    CLI::Option* grid_opt = nullptr;
    CLI::Option* save_opt = nullptr;
};

int cmd_fit(FitArgs& a, std::ostream& out) {
    const json config = load_config(a.config);
    from_config(a.em_iters_opt, config, "em_iters", a.em_iters);
    from_config(a.tol_opt, config, "tol", a.tol);
    from_config(a.beta_opt, config, "beta", a.beta);
    from_config(a.seed_opt, config, "seed", a.seed);
    from_config(a.threads_opt, config, "threads", a.threads);
    from_config(a.max_n_opt, config, "max_n", a.max_n);
    from_config(a.grid_opt, config, "lambda_grid", a.lambda_grid);
    from_config(a.save_opt, config, "save_resp", a.save_resp);
    a.badmm.resolve(config);
    apply_threads(a.threads);

    const LoadedData loaded = load_dataset(a.data, a.types, a.num_types);
    if (loaded.data.empty()) {
        throw ValidationFailure(a.data + ": dataset is empty");
    }
    check_max_n(loaded.data, a.max_n);

    const bool config_badmm = config.contains("lambda") || config.contains("lambda_grid") ||
                              config.contains("alpha") || config.contains("reg");
    const bool use_badmm = a.badmm.any_given() || !a.lambda_grid.empty() || config_badmm;

    EmConfig em;
    em.max_em_iters = a.em_iters;
    em.loglik_tol = a.tol;
    const io::MatrixLayout layout = a.save_resp == "dense"     ? io::MatrixLayout::dense
                                    : a.save_resp == "triplet" ? io::MatrixLayout::triplet
                                                               : io::MatrixLayout::none;
    const ExpKernel kernel(a.beta);

    std::vector<std::optional<double>> runs;
    if (!a.lambda_grid.empty()) {
        for (const double l : parse_grid(a.lambda_grid)) runs.emplace_back(l);
    } else if (use_badmm) {
        runs.emplace_back(a.badmm.lambda);
    } else {
        runs.emplace_back(std::nullopt);
    }

    json outputs = json::array();
    const fs::path base = a.out;
    for (const auto& lambda : runs) {
        EmConfig cfg = em;
        fs::path path = base;
        if (lambda) {
            BadmmConfig b = a.badmm.config();
            b.lambda = *lambda;
            b.validate();
            cfg.badmm = b;
            if (!a.lambda_grid.empty()) {
                path = base.parent_path() / (base.stem().string() + "_lambda" +
                                             format_number(*lambda) + base.extension().string());
            }
        }
        const FitResult result = fit(loaded.data, loaded.num_types, kernel, cfg);
        io::write_text(path, io::fit_result_to_json(result, loaded.data, cfg, layout).dump(2) + "\n");
        outputs.push_back(path.string());
        out << "fit " << path.string() << ": " << result.iterations_run
            << " EM iterations, log-likelihood " << result.loglik_history.back() << "\n";
        for (const auto& w : result.warnings) {
            out << "warning: " << w << "\n";
        }
    }

    json snapshot = io::em_config_to_json(em);
    snapshot["badmm"] = use_badmm ? io::badmm_config_to_json(a.badmm.config()) : json(nullptr);
    snapshot["beta"] = a.beta;
    snapshot["num_types"] = loaded.num_types;
    snapshot["lambda_grid"] = a.lambda_grid;
    snapshot["save_resp"] = a.save_resp;
    snapshot["max_n"] = a.max_n;
    write_manifest(with_suffix(base, ".manifest.json"), "fit",
                   {{"data", a.data}, {"types", a.types}, {"config", a.config}}, outputs, a.seed,
                   snapshot);
    return kOk;
}

// ---------------------------------------------------------------- infer

struct InferArgs {
    std::string matrix;
    std::string out_prefix;
    std::string config;
    std::size_t max_n = 5000;
    int threads = 0;
    BadmmFlags badmm;
    CLI::Option* max_n_opt = nullptr;
};

int cmd_infer(InferArgs& a, std::ostream& out) {
    const json config = load_config(a.config);
    from_config(a.max_n_opt, config, "max_n", a.max_n);
    a.badmm.resolve(config);
    apply_threads(a.threads);
    const BadmmConfig cfg = a.badmm.config();

    json raw;
    try {
        raw = json::parse(io::read_text(a.matrix));
    } catch (const json::exception& e) {
        throw io::ParseError(a.matrix + ": " + e.what());
    }
    Matrix m = io::matrix_from_json(raw);
    if (static_cast<std::size_t>(m.rows()) > a.max_n) {
        throw ValidationFailure("matrix has " + std::to_string(m.rows()) + " rows, above --max-n " +
                                std::to_string(a.max_n));
    }
    const TransitionMatrix B0(std::move(m));
    const BadmmState state = structure_matrix(B0, cfg, Exec::parallel);
    const StructureStats stats = structure_stats(state);

    const std::string prefix = a.out_prefix;
    const fs::path b_path = prefix + ".B.json";
    const fs::path x1_path = prefix + ".X1.json";
    const fs::path stats_path = prefix + ".stats.json";
    io::write_text(b_path, io::matrix_to_dense_json(state.B.entries()).dump() + "\n");
    io::write_text(x1_path, io::matrix_to_triplet_json(state.X1).dump() + "\n");

    json residuals = json::array();
    for (const auto& r : state.residual_history) {
        residuals.push_back({{"x1", r.x1}, {"x2", r.x2}});
    }
    json stats_j = {{"iterations", state.iterations},
                    {"residuals", residuals},
                    {"objective", state.objective_history},
                    {"support_size", stats.support_size},
                    {"numerical_rank", stats.numerical_rank},
                    {"x2_numerical_rank", numerical_rank(state.X2)}};
    io::write_text(stats_path, stats_j.dump(2) + "\n");
    write_manifest(prefix + ".manifest.json", "infer", {{"matrix", a.matrix}, {"config", a.config}},
                   {b_path.string(), x1_path.string(), stats_path.string()}, 0,
                   io::badmm_config_to_json(cfg));
    out << "structured " << B0.size() << "x" << B0.size() << " matrix in " << state.iterations
        << " iterations; support " << stats.support_size << ", rank " << stats.numerical_rank
        << "\n";
    return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    std::string fit;
    std::string data;
    std::string types;
    std::string labels;
    std::string out;
    int threads = 0;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
    apply_threads(a.threads);
    json raw;
    try {
        raw = json::parse(io::read_text(a.fit));
    } catch (const json::exception& e) {
        throw io::ParseError(a.fit + ": " + e.what());
    }
    const io::StoredFit stored = io::fit_result_from_json(raw);
    const std::size_t C = stored.params.num_types();
    const LoadedData loaded = load_dataset(a.data, a.types, 0);
    if (loaded.num_types > C) {
        throw ValidationFailure("dataset uses " + std::to_string(loaded.num_types) +
                                " types but the fit has " + std::to_string(C));
    }

    const MetricsReport metrics = next_type_accuracy(stored.params, loaded.data);
    json result = {{"metrics", io::metrics_to_json(metrics)}};
    std::optional<BranchReport> branch;
    if (!a.labels.empty()) {
        const auto labels = io::read_labels(a.labels);
        if (labels.size() != loaded.data.size()) {
            throw ValidationFailure("labels file has " + std::to_string(labels.size()) +
                                    " sequences, dataset has " + std::to_string(loaded.data.size()));
        }
        std::vector<TransitionMatrix> matrices;
        if (stored.responsibilities.size() == loaded.data.size()) {
            matrices = stored.responsibilities;
        } else {
            matrices = e_step(stored.params, loaded.data);
            if (stored.badmm) {
                for (auto& m : matrices) {
                    m = structure_matrix(m, *stored.badmm).B;
                }
            }
        }
        branch = parent_recovery(matrices, labels);
        result["branch"] = io::branch_report_to_json(*branch);
    }

    const fs::path base = a.out;
    const fs::path json_path = with_suffix(base, ".metrics.json");
    const fs::path tsv_path = with_suffix(base, ".metrics.tsv");
    io::write_text(json_path, result.dump(2) + "\n");
    io::write_text(tsv_path, io::metrics_tsv(metrics, branch));
    write_manifest(with_suffix(base, ".manifest.json"), "eval",
                   {{"fit", a.fit}, {"data", a.data}, {"types", a.types}, {"labels", a.labels}},
                   {json_path.string(), tsv_path.string()}, 0, json::object());
    out << "ELL " << metrics.ell << "  ACC " << metrics.acc;
    if (branch) {
        out << "  parent accuracy " << branch->parent_accuracy;
    }
    out << "\n";
    return kOk;
}

// ---------------------------------------------------------------- rank

struct RankArgs {
    std::string matrix;
    std::string types;
    std::string out;
};

std::vector<std::size_t> read_type_assignment(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw io::ParseError(path + ": " + e.what());
    }
    if (j.is_object() && j.contains("types")) {
        j = j.at("types");
    }
    if (!j.is_array()) {
        throw io::ParseError(path + ": type assignment must be an array of type indices");
    }
    std::vector<std::size_t> out;
    for (const auto& v : j) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw io::ParseError(path + ": type indices must be nonnegative integers");
        }
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

int cmd_rank(const RankArgs& a, std::ostream& out) {
    json raw;
    try {
        raw = json::parse(io::read_text(a.matrix));
    } catch (const json::exception& e) {
        throw io::ParseError(a.matrix + ": " + e.what());
    }
    const TransitionMatrix B(io::matrix_from_json(raw));
    const auto types = read_type_assignment(a.types);
    if (types.size() != B.size()) {
        throw ValidationFailure("type assignment has " + std::to_string(types.size()) +
                                " entries for a " + std::to_string(B.size()) + "-event matrix");
    }
    const auto ranking = influence_ranking(B, types);
    std::ostringstream table;
    table.precision(17);
    table << "rank\ttype\tscore\n";
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        table << (i + 1) << '\t' << ranking[i].first << '\t' << ranking[i].second << '\n';
    }
    io::write_text(a.out, table.str());
    write_manifest(with_suffix(a.out, ".manifest.json"), "rank",
                   {{"matrix", a.matrix}, {"types", a.types}}, {a.out}, 0, json::object());
    out << table.str();
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hawkes process EM with Bregman ADMM structuring of event-branch matrices",
                 "evbranch"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate multivariate Hawkes sequences");
    simulate->add_option("--params", sim.params, "Parameter file {mu, A, beta}")->required();
    simulate->add_option("--out", sim.out, "Output sequence file (JSON lines)")->required();
    simulate->add_option("--labels", sim.labels, "Branch label output (default <out>.labels.jsonl)");
    simulate->add_option("--num-seqs", sim.num_seqs, "Number of sequences");
    simulate->add_option("--horizon", sim.horizon, "Observation horizon T");
    simulate->add_option("--seed", sim.seed, "Dataset seed");
    simulate->add_option("--max-events", sim.max_events, "Per-sequence event cap");
    simulate->add_option("--method", sim.method, "Simulator")
        ->check(CLI::IsMember({"branching", "thinning"}));
    simulate->add_option("--threads", sim.threads, "Worker threads (0 = all cores)");

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Learn Hawkes parameters by EM (optionally BADMM E-step)");
    fit_cmd->add_option("--data", fa.data, "Sequence file (JSON lines)")->required();
    fit_cmd->add_option("--types", fa.types, "Type map {label: index}");
    fit_cmd->add_option("--out", fa.out, "Fit result file")->required();
    fit_cmd->add_option("--config", fa.config, "JSON config; flags take precedence");
    fit_cmd->add_option("--num-types", fa.num_types, "Number of event types (default: inferred)");
    fa.em_iters_opt = fit_cmd->add_option("--em-iters", fa.em_iters, "Maximum EM iterations");
    fa.tol_opt = fit_cmd->add_option("--tol", fa.tol, "Relative log-likelihood tolerance");
    fa.beta_opt = fit_cmd->add_option("--beta", fa.beta, "Kernel decay rate");
    fa.seed_opt = fit_cmd->add_option("--seed", fa.seed, "Seed recorded in the manifest");
    fa.threads_opt = fit_cmd->add_option("--threads", fa.threads, "Worker threads (0 = all cores)");
    fa.max_n_opt = fit_cmd->add_option("--max-n", fa.max_n, "Maximum events per sequence");
    fa.grid_opt = fit_cmd->add_option("--lambda-grid", fa.lambda_grid,
                                      "Comma-separated lambdas; one result file per value");
    fa.save_opt = fit_cmd->add_option("--save-resp", fa.save_resp, "Store responsibilities")
                      ->check(CLI::IsMember({"none", "dense", "triplet"}));
    fa.badmm.add(fit_cmd);

    InferArgs ia;
    auto* infer = app.add_subcommand("infer", "Structure a transition matrix with BADMM");
    infer->add_option("--matrix", ia.matrix, "Input matrix (dense or triplet JSON)")->required();
    infer->add_option("--out-prefix", ia.out_prefix, "Output prefix")->required();
    infer->add_option("--config", ia.config, "JSON config; flags take precedence");
    infer->add_option("--threads", ia.threads, "Worker threads (0 = all cores)");
    ia.max_n_opt = infer->add_option("--max-n", ia.max_n, "Maximum matrix size");
    ia.badmm.add(infer);

    EvalArgs ea;
    auto* eval_cmd = app.add_subcommand("eval", "Compute ELL, ACC and branch recovery");
    eval_cmd->add_option("--fit", ea.fit, "Fit result file")->required();
    eval_cmd->add_option("--data", ea.data, "Sequence file")->required();
    eval_cmd->add_option("--types", ea.types, "Type map {label: index}");
    eval_cmd->add_option("--labels", ea.labels, "Ground-truth branch labels");
    eval_cmd->add_option("--out", ea.out, "Output prefix")->required();
    eval_cmd->add_option("--threads", ea.threads, "Worker threads (0 = all cores)");

    RankArgs ra;
    auto* rank = app.add_subcommand("rank", "Rank event types by overall influence 1^T B S");
    rank->add_option("--matrix", ra.matrix, "Transition matrix file")->required();
    rank->add_option("--types", ra.types, "Type assignment: JSON array of type indices")->required();
    rank->add_option("--out", ra.out, "Ranking table (TSV)")->required();

    std::vector<std::string> argv_storage = args;
    if (argv_storage.empty()) {
        argv_storage.emplace_back("evbranch");
    }
    std::vector<char*> argv;
    for (auto& s : argv_storage) {
        argv.push_back(s.data());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*simulate) return cmd_simulate(sim, out);
        if (*fit_cmd) return cmd_fit(fa, out);
        if (*infer) return cmd_infer(ia, out);
        if (*eval_cmd) return cmd_eval(ea, out);
        if (*rank) return cmd_rank(ra, out);
    } catch (const UnstableParamsError& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const TruncationError& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const ZeroIntensityError& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return kDomain;
    } catch (const io::IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const InvariantError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ValidationFailure& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace evbranch::cli
