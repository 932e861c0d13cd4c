#include "kronlearn/experiment.hpp"

#include "kronlearn/graphrep.hpp"
#include "kronlearn/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace kronlearn {

namespace {

constexpr int kProductRetries = 1000;

double metric(const EvalReport& r, int idx) {
    switch (idx) {
        case 0: return r.rel_err_product;
        case 1: return r.rel_err_factor1;
        case 2: return r.rel_err_factor2;
        case 3: return r.pr_auc_product;
        case 4: return r.pr_auc_factor1;
        default: return r.pr_auc_factor2;
    }
}

}  // namespace

const char* const kMetricNames[kMetricCount] = {
    "rel_err_product", "rel_err_f1", "rel_err_f2",
    "pr_auc_product",  "pr_auc_f1",  "pr_auc_f2",
};

std::vector<int> ExperimentConfig::default_n_grid() {
    std::vector<int> grid;
    for (int r = 0; r <= 10; ++r) grid.push_back(10 << r);
    return grid;
}

void ExperimentConfig::validate() const {
    model1.validate(p1);
    model2.validate(p2);
    if (n_grid.empty()) throw ValidationError("experiment: n_grid must not be empty");
    int prev = 0;
    for (int n : n_grid) {
        if (n <= prev) throw ValidationError("experiment: n_grid must be strictly increasing and positive");
        prev = n;
    }
    if (replicates < 1) throw ValidationError("experiment: replicates must be >= 1");
    solver.validate();
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& config) {
    nlohmann::json j;
    j["model1"] = config.model1.to_string();
    j["model2"] = config.model2.to_string();
    j["p1"] = config.p1;
    j["p2"] = config.p2;
    j["kind"] = to_string(config.kind);
    j["n_grid"] = config.n_grid;
    j["replicates"] = config.replicates;
    j["base_seed"] = config.base_seed;
    j["solver"] = io::solver_config_to_json(config.solver);
    j["alpha_auto"] = config.alpha_auto;
    j["out_dir"] = config.out_dir;
    return j;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("model1")) c.model1 = GraphModel::parse(j["model1"].get<std::string>());
        if (j.contains("model2")) c.model2 = GraphModel::parse(j["model2"].get<std::string>());
        if (j.contains("p1")) c.p1 = j["p1"].get<int>();
        if (j.contains("p2")) c.p2 = j["p2"].get<int>();
        if (j.contains("kind")) c.kind = product_kind_from_string(j["kind"].get<std::string>());
        if (j.contains("n_grid")) c.n_grid = j["n_grid"].get<std::vector<int>>();
        if (j.contains("replicates")) c.replicates = j["replicates"].get<int>();
        if (j.contains("base_seed")) c.base_seed = j["base_seed"].get<std::uint64_t>();
        if (j.contains("solver")) c.solver = io::solver_config_from_json(j["solver"]);
        if (j.contains("alpha_auto")) c.alpha_auto = j["alpha_auto"].get<bool>();
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment config: ") + e.what());
    }
    c.solver.kind = c.kind;
    c.validate();
    return c;
}

GeneratedRun generate_run(const GraphModel& model1, const GraphModel& model2, int p1,
                          int p2, ProductKind kind, int n, std::uint64_t seed) {
    RandomStream topo1(seed, Stream::FactorTopology1);
    RandomStream weights1(seed, Stream::FactorWeights1);
    RandomStream topo2(seed, Stream::FactorTopology2);
    RandomStream weights2(seed, Stream::FactorWeights2);

    GeneratedRun run;
    bool connected = false;
    for (int attempt = 0; attempt < kProductRetries && !connected; ++attempt) {
        run.w1_true = generate_factor(model1, p1, topo1, weights1);
        run.w2_true = generate_factor(model2, p2, topo2, weights2);
        connected = is_connected(compose_product(run.w1_true, run.w2_true, kind));
    }
    if (!connected) {
        throw DisconnectedProductError(
            "generate_run: the composed product graph stayed disconnected over " +
            std::to_string(kProductRetries) + " draws (" + model1.to_string() + " x " +
            model2.to_string() + ", " + to_string(kind) +
            "); a Kronecker product of two bipartite factors is always disconnected");
    }
    ProductSpec spec;
    spec.p1 = p1;
    spec.p2 = p2;
    spec.kind = kind;
    const SymMatrix lap = product_laplacian(run.w1_true, run.w2_true, kind);
    RandomStream signals(seed, Stream::Signals);
    run.dataset = sample_igmrf(lap, spec, n, signals, seed);
    return run;
}

RunOutcome run_single(const ExperimentConfig& config, int n, std::uint64_t seed) {
    RunOutcome outcome;
    outcome.seed = seed;
    outcome.n = n;
    outcome.kind = config.kind;
    try {
        GeneratedRun run = generate_run(config.model1, config.model2, config.p1, config.p2,
                                        config.kind, n, seed);
        const Moments moments = Moments::from_dataset(run.dataset);
        SolverConfig solver = config.solver;
        solver.kind = config.kind;
        if (config.alpha_auto) {
            solver.alpha1 = solver.alpha2 = default_alpha(moments);
        }
        ProductSpec spec;
        spec.p1 = config.p1;
        spec.p2 = config.p2;
        spec.kind = config.kind;
        const SolverState state = ksgl_solve(moments, spec, solver);
        if (state.termination_reason == TerminationReason::LineSearchFailure) {
            outcome.error = "solver: " + state.message;
            return outcome;
        }
        outcome.report =
            evaluate(state.w1, state.w2, run.w1_true, run.w2_true, config.kind, n, seed);
        outcome.ok = true;
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

std::vector<RunOutcome> run_experiment(const ExperimentConfig& config, int threads) {
    config.validate();
    struct Task {
        int n;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (int n : config.n_grid) {
        for (int r = 0; r < config.replicates; ++r) {
            tasks.push_back({n, config.base_seed + static_cast<std::uint64_t>(r)});
        }
    }
    std::vector<RunOutcome> outcomes(tasks.size());
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (workers == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            outcomes[t] = run_single(config, tasks[t].n, tasks[t].seed);
        }
        return outcomes;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) break;
            outcomes[t] = run_single(config, tasks[t].n, tasks[t].seed);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
    return outcomes;
}

int resolve_threads(int requested) {
    int threads = requested > 0 ? requested
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("KRONLEARN_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) threads = std::min(threads, cap);
    }
    return threads;
}

std::string results_csv_header() {
    return "seed,n,kind,rel_err_product,rel_err_f1,rel_err_f2,pr_auc_product,pr_auc_f1,"
           "pr_auc_f2";
}

std::string results_csv_row(const RunOutcome& outcome) {
    std::string row = std::to_string(outcome.seed) + ',' + std::to_string(outcome.n) + ',' +
                      to_string(outcome.kind);
    for (int k = 0; k < kMetricCount; ++k) {
        row += ',';
        row += outcome.ok ? io::format_double(metric(outcome.report, k)) : "nan";
    }
    return row;
}

void write_results_csv(const std::string& path, const std::vector<RunOutcome>& outcomes) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << results_csv_header() << '\n';
    for (const RunOutcome& o : outcomes) out << results_csv_row(o) << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<AggregateRow> aggregate_results(const std::vector<RunOutcome>& outcomes) {
    std::vector<AggregateRow> rows;
    std::vector<int> order;  // n values in first-appearance order
    for (const RunOutcome& o : outcomes) {
        if (std::find(order.begin(), order.end(), o.n) == order.end()) order.push_back(o.n);
    }
    for (int n : order) {
        AggregateRow row;
        row.n = n;
        for (const RunOutcome& o : outcomes) {
            if (o.n == n && o.ok) ++row.ok_count;
        }
        for (int k = 0; k < kMetricCount; ++k) {
            if (row.ok_count == 0) {
                row.mean[k] = row.stddev[k] = std::nan("");
                continue;
            }
            double sum = 0.0;
            for (const RunOutcome& o : outcomes) {
                if (o.n == n && o.ok) sum += metric(o.report, k);
            }
            const double mean = sum / row.ok_count;
            double sq = 0.0;
            for (const RunOutcome& o : outcomes) {
                if (o.n == n && o.ok) {
                    const double d = metric(o.report, k) - mean;
                    sq += d * d;
                }
            }
            row.mean[k] = mean;
            row.stddev[k] = std::sqrt(sq / row.ok_count);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "n,ok_count";
    for (int k = 0; k < kMetricCount; ++k) {
        out << ',' << kMetricNames[k] << "_mean," << kMetricNames[k] << "_std";
    }
    out << '\n';
    for (const AggregateRow& row : rows) {
        out << row.n << ',' << row.ok_count;
        for (int k = 0; k < kMetricCount; ++k) {
            out << ',' << io::format_double(row.mean[k]) << ','
                << io::format_double(row.stddev[k]);
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::array<double, kMetricCount> metric_slopes(const std::vector<AggregateRow>& rows) {
    std::array<double, kMetricCount> slopes{};
    for (int k = 0; k < kMetricCount; ++k) {
        std::vector<double> ns, errs;
        for (const AggregateRow& row : rows) {
            if (row.ok_count > 0 && std::isfinite(row.mean[k]) && row.mean[k] > 0.0) {
                ns.push_back(row.n);
                errs.push_back(row.mean[k]);
            }
        }
        slopes[k] = ns.size() >= 3 ? fit_rate(ns, errs) : std::nan("");
    }
    return slopes;
}

void write_rate_fit_csv(const std::string& path,
                        const std::array<double, kMetricCount>& slopes) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "metric,slope\n";
    for (int k = 0; k < kMetricCount; ++k) {
        out << kMetricNames[k] << ',' << io::format_double(slopes[k]) << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace kronlearn
