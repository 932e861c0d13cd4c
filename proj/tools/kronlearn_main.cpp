// kronlearn command line: generate synthetic product-graph datasets, learn
// factor graphs from them, evaluate against ground truth, and run full
// sample-size/replicate experiment sweeps.
//
// Exit codes: 0 success, 2 validation error, 3 solver failure, 4 I/O error.

#include "kronlearn/experiment.hpp"
#include "kronlearn/graphrep.hpp"
#include "kronlearn/io.hpp"
#include "kronlearn/metrics.hpp"
#include "kronlearn/solver.hpp"
#include "kronlearn/synth.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace kronlearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct CommonGenArgs {
    std::string config_path;
    std::string out_dir;
    std::string model1, model2, kind;
    int p1 = 0, p2 = 0;
    int n = -1;
    std::uint64_t base_seed = 0;
    bool have_seed = false;
    int replicate = 0;
    bool force = false;
};

ExperimentConfig load_experiment_config(const CommonGenArgs& args) {
    ExperimentConfig config;
    if (!args.config_path.empty()) {
        config = experiment_config_from_json(io::read_json_file(args.config_path));
    }
    if (!args.model1.empty()) config.model1 = GraphModel::parse(args.model1);
    if (!args.model2.empty()) config.model2 = GraphModel::parse(args.model2);
    if (!args.kind.empty()) config.kind = product_kind_from_string(args.kind);
    if (args.p1 > 0) config.p1 = args.p1;
    if (args.p2 > 0) config.p2 = args.p2;
    if (args.have_seed) config.base_seed = args.base_seed;
    if (!args.out_dir.empty()) config.out_dir = args.out_dir;
    config.solver.kind = config.kind;
    return config;
}

void add_generate_flags(CLI::App* cmd, CommonGenArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config JSON");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--model1", args.model1, "factor-1 model, e.g. er(0.3) ba(2,2) ws(2,0.1) grid(4,5)");
    cmd->add_option("--model2", args.model2, "factor-2 model");
    cmd->add_option("--p1", args.p1, "factor-1 node count");
    cmd->add_option("--p2", args.p2, "factor-2 node count");
    cmd->add_option("--kind", args.kind, "product kind: kronecker | strong");
    cmd->add_option("--seed", args.base_seed, "base seed")->each([&](const std::string&) {
        args.have_seed = true;
    });
    cmd->add_option("--replicate", args.replicate, "replicate index r (uses seed base_seed + r)");
    cmd->add_flag("--force", args.force, "overwrite existing outputs");
}

int cmd_generate(const CommonGenArgs& args) {
    ExperimentConfig config = load_experiment_config(args);
    config.validate();
    int n = args.n >= 0 ? args.n : config.n_grid.back();
    if (args.n < 0 && args.config_path.empty()) n = 100;

    const fs::path dir = config.out_dir.empty() ? "." : config.out_dir;
    fs::create_directories(dir);
    const std::string manifest_path = (dir / "manifest.json").string();
    io::refuse_overwrite(manifest_path, args.force);

    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(args.replicate);
    GeneratedRun run = generate_run(config.model1, config.model2, config.p1, config.p2,
                                    config.kind, n, seed);

    io::write_graph((dir / "factor1.csv").string(), run.w1_true);
    io::write_graph((dir / "factor2.csv").string(), run.w2_true);
    io::write_graph((dir / "product.csv").string(),
                    compose_product(run.w1_true, run.w2_true, config.kind));
    io::write_dataset((dir / "dataset.csv").string(), run.dataset,
                      config.model1.to_string(), config.model2.to_string());

    json manifest;
    manifest["model1"] = config.model1.to_string();
    manifest["model2"] = config.model2.to_string();
    manifest["p1"] = config.p1;
    manifest["p2"] = config.p2;
    manifest["kind"] = to_string(config.kind);
    manifest["n"] = n;
    manifest["base_seed"] = config.base_seed;
    manifest["replicate"] = args.replicate;
    manifest["seed"] = seed;
    manifest["files"] = {"factor1.csv", "factor2.csv", "product.csv", "dataset.csv"};
    io::write_json_file(manifest_path, manifest);

    std::cout << "wrote " << (dir / "dataset.csv").string() << " (n=" << n
              << ", p=" << config.p1 * config.p2 << ", seed=" << seed << ")\n";
    return kExitOk;
}

struct LearnArgs {
    std::string dataset_path;
    std::string out_dir;
    std::string config_path;
    std::string kind;
    std::optional<double> alpha1, alpha2, eta0, backtrack, tol_inner, tol_outer;
    std::optional<int> max_inner, max_outer;
    bool force = false;
};

int cmd_learn(const LearnArgs& args) {
    io::DatasetMeta meta;
    const Dataset ds = io::read_dataset(args.dataset_path, &meta);
    if (ds.n < 1) throw ValidationError("learn: dataset is empty");

    SolverConfig config;
    if (!args.config_path.empty()) {
        config = io::solver_config_from_json(io::read_json_file(args.config_path));
    } else {
        config.kind = meta.kind;
    }
    // flags override config-file values
    if (args.kind.size()) config.kind = product_kind_from_string(args.kind);
    if (args.alpha1) config.alpha1 = *args.alpha1;
    if (args.alpha2) config.alpha2 = *args.alpha2;
    if (args.eta0) config.eta0 = *args.eta0;
    if (args.backtrack) config.backtrack = *args.backtrack;
    if (args.tol_inner) config.tol_inner = *args.tol_inner;
    if (args.tol_outer) config.tol_outer = *args.tol_outer;
    if (args.max_inner) config.max_inner = *args.max_inner;
    if (args.max_outer) config.max_outer = *args.max_outer;
    if (config.kind != meta.kind) {
        throw ValidationError("learn: solver kind '" + to_string(config.kind) +
                              "' does not match dataset sidecar kind '" + to_string(meta.kind) +
                              "'");
    }

    const Moments moments = Moments::from_dataset(ds);
    if (!args.alpha1 && !args.alpha2 && args.config_path.empty()) {
        config.alpha1 = config.alpha2 = default_alpha(moments);
    }
    config.validate();

    ProductSpec spec = ds.spec;
    spec.kind = config.kind;
    const SolverState state = ksgl_solve(moments, spec, config);

    const fs::path dir = args.out_dir.empty() ? "." : args.out_dir;
    fs::create_directories(dir);
    io::refuse_overwrite((dir / "state.json").string(), args.force);
    io::write_graph((dir / "learned_w1.csv").string(), state.w1);
    io::write_graph((dir / "learned_w2.csv").string(), state.w2);
    io::write_graph((dir / "learned_product.csv").string(),
                    compose_product(state.w1, state.w2, config.kind));
    json state_json = io::solver_state_to_json(state);
    state_json["config"] = io::solver_config_to_json(config);
    io::write_json_file((dir / "state.json").string(), state_json);

    if (state.termination_reason == TerminationReason::LineSearchFailure) {
        std::cerr << "solver line search failed: " << state.message << "\n";
        return kExitSolver;
    }
    std::cout << "converged=" << (state.converged ? "true" : "false")
              << " sweeps=" << state.outer_sweeps
              << " objective=" << state.objective_trace.back() << "\n";
    return kExitOk;
}

struct EvalArgs {
    std::string learned_w1, learned_w2, truth_w1, truth_w2;
    std::string kind = "kronecker";
    std::string out_path;
    int n = 0;
    std::uint64_t seed = 0;
    bool header = false;
};

int cmd_eval(const EvalArgs& args) {
    const WeightVector w1_hat = io::read_graph(args.learned_w1);
    const WeightVector w2_hat = io::read_graph(args.learned_w2);
    const WeightVector w1_true = io::read_graph(args.truth_w1);
    const WeightVector w2_true = io::read_graph(args.truth_w2);
    const ProductKind kind = product_kind_from_string(args.kind);
    const EvalReport report =
        evaluate(w1_hat, w2_hat, w1_true, w2_true, kind, args.n, args.seed);

    RunOutcome outcome;
    outcome.seed = args.seed;
    outcome.n = args.n;
    outcome.kind = kind;
    outcome.ok = true;
    outcome.report = report;

    if (args.out_path.empty()) {
        if (args.header) std::cout << results_csv_header() << "\n";
        std::cout << results_csv_row(outcome) << "\n";
    } else {
        const bool fresh = !io::file_exists(args.out_path);
        std::ofstream out(args.out_path, std::ios::app);
        if (!out) throw IoError("cannot open '" + args.out_path + "' for appending");
        if (fresh) out << results_csv_header() << '\n';
        out << results_csv_row(outcome) << '\n';
    }
    return kExitOk;
}

struct ExperimentArgs {
    CommonGenArgs common;
    int replicates = 0;
    int threads = 0;
    bool small = false;
    std::string n_grid;
    std::string alpha_grid;
    std::optional<double> alpha1, alpha2;
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(std::stoi(token));
    }
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
    }
    return values;
}

void run_and_write_experiment(const ExperimentConfig& config, int threads,
                              const fs::path& dir, const std::string& suffix) {
    const std::vector<RunOutcome> outcomes = run_experiment(config, threads);
    write_results_csv((dir / ("results" + suffix + ".csv")).string(), outcomes);
    const std::vector<AggregateRow> agg = aggregate_results(outcomes);
    write_aggregate_csv((dir / ("aggregate" + suffix + ".csv")).string(), agg);
    write_rate_fit_csv((dir / ("rate_fit" + suffix + ".csv")).string(), metric_slopes(agg));
    int failures = 0;
    for (const RunOutcome& o : outcomes) {
        if (!o.ok) ++failures;
    }
    std::cout << "results" << suffix << ".csv: " << outcomes.size() << " runs, " << failures
              << " failed\n";
}

int cmd_experiment(const ExperimentArgs& args) {
    ExperimentConfig config = load_experiment_config(args.common);
    if (args.small) {
        // quick preset: 7 x 6 factors, n capped at 2560
        if (args.common.p1 <= 0) config.p1 = 7;
        if (args.common.p2 <= 0) config.p2 = 6;
        config.n_grid.clear();
        for (int r = 0; r <= 8; ++r) config.n_grid.push_back(10 << r);
    }
    if (args.replicates > 0) config.replicates = args.replicates;
    if (!args.n_grid.empty()) config.n_grid = parse_int_list(args.n_grid);
    if (args.alpha1 || args.alpha2) {
        config.alpha_auto = false;
        if (args.alpha1) config.solver.alpha1 = *args.alpha1;
        if (args.alpha2) config.solver.alpha2 = *args.alpha2;
    }
    config.validate();

    const fs::path dir = config.out_dir.empty() ? "." : config.out_dir;
    fs::create_directories(dir);
    const std::string manifest_path = (dir / "manifest.json").string();
    io::refuse_overwrite(manifest_path, args.common.force);

    const int threads = resolve_threads(args.threads);

    json manifest = experiment_config_to_json(config);
    manifest["threads"] = threads;

    if (args.alpha_grid.empty()) {
        run_and_write_experiment(config, threads, dir, "");
    } else {
        const std::vector<double> alphas = parse_double_list(args.alpha_grid);
        if (alphas.empty()) throw ValidationError("--alpha-grid: no values parsed");
        manifest["alpha_grid"] = alphas;
        for (double a : alphas) {
            ExperimentConfig sweep = config;
            sweep.alpha_auto = false;
            sweep.solver.alpha1 = sweep.solver.alpha2 = a;
            run_and_write_experiment(sweep, threads, dir, "_alpha" + io::format_double(a));
        }
    }
    io::write_json_file(manifest_path, manifest);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kronlearn: product-graph Laplacian learning from smooth signals"};
    app.require_subcommand(1);

    CommonGenArgs gen_args;
    CLI::App* generate = app.add_subcommand("generate", "write factor/product graphs and a sampled dataset");
    add_generate_flags(generate, gen_args);
    generate->add_option("--n", gen_args.n, "sample count (default: largest config grid entry)");

    LearnArgs learn_args;
    CLI::App* learn = app.add_subcommand("learn", "fit factor graphs to a dataset");
    learn->add_option("--dataset", learn_args.dataset_path, "dataset CSV (sidecar JSON expected next to it)")->required();
    learn->add_option("--out", learn_args.out_dir, "output directory");
    learn->add_option("--config", learn_args.config_path, "solver config JSON");
    learn->add_option("--kind", learn_args.kind, "product kind override");
    learn->add_option("--alpha1", learn_args.alpha1, "l1 penalty on factor 1");
    learn->add_option("--alpha2", learn_args.alpha2, "l1 penalty on factor 2");
    learn->add_option("--eta0", learn_args.eta0, "initial step size");
    learn->add_option("--backtrack", learn_args.backtrack, "line-search shrink factor");
    learn->add_option("--tol-inner", learn_args.tol_inner, "inner-loop relative tolerance");
    learn->add_option("--tol-outer", learn_args.tol_outer, "outer-loop relative tolerance");
    learn->add_option("--max-inner", learn_args.max_inner, "inner iteration cap");
    learn->add_option("--max-outer", learn_args.max_outer, "outer sweep cap");
    learn->add_flag("--force", learn_args.force, "overwrite existing outputs");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "evaluate learned graphs against ground truth");
    eval->add_option("--learned-w1", eval_args.learned_w1)->required();
    eval->add_option("--learned-w2", eval_args.learned_w2)->required();
    eval->add_option("--truth-w1", eval_args.truth_w1)->required();
    eval->add_option("--truth-w2", eval_args.truth_w2)->required();
    eval->add_option("--kind", eval_args.kind, "product kind");
    eval->add_option("--n", eval_args.n, "sample count recorded in the row");
    eval->add_option("--seed", eval_args.seed, "seed recorded in the row");
    eval->add_option("--out", eval_args.out_path, "append the row to this CSV instead of stdout");
    eval->add_flag("--header", eval_args.header, "print the CSV header line first");

    ExperimentArgs exp_args;
    CLI::App* experiment = app.add_subcommand("experiment", "run the full n-grid x replicates protocol");
    add_generate_flags(experiment, exp_args.common);
    experiment->add_option("--replicates", exp_args.replicates, "replicates per n");
    experiment->add_option("--n-grid", exp_args.n_grid, "comma-separated sample counts");
    experiment->add_flag("--small", exp_args.small, "desk-scale preset: p1=7, p2=6, n up to 2560");
    experiment->add_option("--threads", exp_args.threads, "worker cap (also capped by KRONLEARN_THREADS)");
    experiment->add_option("--alpha-grid", exp_args.alpha_grid, "comma-separated alpha sweep; one result set per value");
    experiment->add_option("--alpha1", exp_args.alpha1, "fixed l1 penalty on factor 1");
    experiment->add_option("--alpha2", exp_args.alpha2, "fixed l1 penalty on factor 2");

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return cmd_generate(gen_args);
        if (learn->parsed()) return cmd_learn(learn_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (experiment->parsed()) return cmd_experiment(exp_args);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DisconnectedProductError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const LineSearchFailureError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
