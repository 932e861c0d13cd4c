#pragma once

#include "kronlearn/metrics.hpp"
#include "kronlearn/solver.hpp"
#include "kronlearn/synth.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <string>
#include <vector>

namespace kronlearn {

// Batch protocol: for every (n, replicate) draw factor graphs, sample
// signals, solve, evaluate. Replicate r uses seed base_seed + r; all
// randomness of a run derives from that seed through named streams, so a
// replicate's graphs are shared across the n grid and its datasets are
// sample-prefix nested.
struct ExperimentConfig {
    GraphModel model1 = GraphModel::erdos_renyi(0.3);
    GraphModel model2 = GraphModel::erdos_renyi(0.3);
    int p1 = 20;
    int p2 = 25;
    ProductKind kind = ProductKind::Kronecker;
    std::vector<int> n_grid = default_n_grid();
    int replicates = 50;
    std::uint64_t base_seed = 1;
    SolverConfig solver;
    bool alpha_auto = true;  // per-run alpha1 = alpha2 = default_alpha(moments)
    std::string out_dir = ".";

    // n = 10 * 2^r, r = 0..10
    static std::vector<int> default_n_grid();
    void validate() const;
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct GeneratedRun {
    WeightVector w1_true;
    WeightVector w2_true;
    Dataset dataset;
};

// Draws connected factors (and redraws both when the composed product graph
// is disconnected, e.g. a bipartite-times-bipartite Kronecker draw), then
// samples n IGMRF signals from the product Laplacian.
GeneratedRun generate_run(const GraphModel& model1, const GraphModel& model2, int p1,
                          int p2, ProductKind kind, int n, std::uint64_t seed);

struct RunOutcome {
    std::uint64_t seed = 0;
    int n = 0;
    ProductKind kind = ProductKind::Kronecker;
    bool ok = false;
    EvalReport report;
    std::string error;
};

RunOutcome run_single(const ExperimentConfig& config, int n, std::uint64_t seed);

// Runs the full (n_grid x replicates) matrix. Replicates execute on up to
// `threads` workers (<= 1 forces serial); the returned order is always
// n-major then replicate, independent of scheduling.
std::vector<RunOutcome> run_experiment(const ExperimentConfig& config, int threads);

// Worker count: `requested` if positive else hardware concurrency, then
// capped by the KRONLEARN_THREADS env var when set.
int resolve_threads(int requested);

inline constexpr int kMetricCount = 6;
extern const char* const kMetricNames[kMetricCount];

std::string results_csv_header();
std::string results_csv_row(const RunOutcome& outcome);
void write_results_csv(const std::string& path, const std::vector<RunOutcome>& outcomes);

struct AggregateRow {
    int n = 0;
    int ok_count = 0;
    std::array<double, kMetricCount> mean{};
    std::array<double, kMetricCount> stddev{};  // population std; 0 for one replicate
};

std::vector<AggregateRow> aggregate_results(const std::vector<RunOutcome>& outcomes);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);

// Log-log OLS slope of each mean metric against n; NaN when fewer than
// 3 usable points.
std::array<double, kMetricCount> metric_slopes(const std::vector<AggregateRow>& rows);
void write_rate_fit_csv(const std::string& path,
                        const std::array<double, kMetricCount>& slopes);

}  // namespace kronlearn
