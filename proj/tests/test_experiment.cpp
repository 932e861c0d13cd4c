#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kronlearn/experiment.hpp"
#include "kronlearn/graphrep.hpp"
#include "kronlearn/synth.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace kronlearn;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.model1 = GraphModel::erdos_renyi(0.5);
    cfg.model2 = GraphModel::erdos_renyi(0.5);
    cfg.p1 = 4;
    cfg.p2 = 3;
    cfg.kind = ProductKind::Kronecker;
    cfg.n_grid = {20, 40};
    cfg.replicates = 3;
    cfg.base_seed = 2024;
    cfg.solver.kind = cfg.kind;
    cfg.solver.max_inner = 200;
    cfg.solver.max_outer = 20;
    return cfg;
}

std::string results_to_string(const std::vector<RunOutcome>& outcomes) {
    std::ostringstream out;
    out << results_csv_header() << '\n';
    for (const auto& o : outcomes) out << results_csv_row(o) << '\n';
    return out.str();
}

}  // namespace

TEST_CASE("default n grid is 10 * 2^r for r = 0..10") {
    const auto grid = ExperimentConfig::default_n_grid();
    REQUIRE(grid.size() == 11);
    CHECK(grid.front() == 10);
    CHECK(grid.back() == 10240);
    for (std::size_t r = 1; r < grid.size(); ++r) CHECK(grid[r] == 2 * grid[r - 1]);
}

TEST_CASE("config validation rejects bad grids and replicate counts") {
    ExperimentConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.n_grid = {20, 20};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = small_config();
    cfg.n_grid = {0, 10};
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = small_config();
    cfg.replicates = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("generate_run: deterministic, connected, reproducible") {
    const GraphModel er = GraphModel::erdos_renyi(0.4);
    const GeneratedRun a = generate_run(er, er, 5, 4, ProductKind::Kronecker, 30, 11);
    const GeneratedRun b = generate_run(er, er, 5, 4, ProductKind::Kronecker, 30, 11);
    CHECK(a.w1_true.w == b.w1_true.w);
    CHECK(a.w2_true.w == b.w2_true.w);
    CHECK(a.dataset.samples == b.dataset.samples);
    CHECK(is_connected(compose_product(a.w1_true, a.w2_true, ProductKind::Kronecker)));
}

TEST_CASE("generate_run: kronecker of two bipartite factors fails loudly") {
    const GraphModel g22 = GraphModel::grid(2, 2);
    CHECK_THROWS_AS(generate_run(g22, g22, 4, 4, ProductKind::Kronecker, 10, 3),
                    DisconnectedProductError);
    // the strong product of the same grids is fine
    CHECK_NOTHROW(generate_run(g22, g22, 4, 4, ProductKind::Strong, 10, 3));
}

TEST_CASE("generate_run: desk-scale grid factors give a p=500 strong product") {
    const GeneratedRun run = generate_run(GraphModel::grid(4, 5), GraphModel::grid(5, 5), 20,
                                          25, ProductKind::Strong, 50, 1);
    CHECK(run.dataset.spec.p() == 500);
    CHECK(run.dataset.samples.rows() == 50);
    CHECK(is_connected(compose_product(run.w1_true, run.w2_true, ProductKind::Strong)));
}

TEST_CASE("run_single: produces a sane report") {
    ExperimentConfig cfg = small_config();
    const RunOutcome o = run_single(cfg, 200, cfg.base_seed);
    REQUIRE(o.ok);
    CHECK(o.n == 200);
    CHECK(o.report.pr_auc_product >= 0.0);
    CHECK(o.report.pr_auc_product <= 1.0);
    CHECK(o.report.rel_err_product >= 0.0);
}

TEST_CASE("run_experiment: deterministic results CSV, serial vs parallel") {
    const ExperimentConfig cfg = small_config();
    const auto first = run_experiment(cfg, 2);
    const auto second = run_experiment(cfg, 1);
    CHECK(results_to_string(first) == results_to_string(second));
    CHECK(first.size() == cfg.n_grid.size() * static_cast<std::size_t>(cfg.replicates));
    // task order is n-major, replicate-minor with seeds base_seed + r
    CHECK(first[0].n == 20);
    CHECK(first[0].seed == cfg.base_seed);
    CHECK(first[2].seed == cfg.base_seed + 2);
    CHECK(first[3].n == 40);
}

TEST_CASE("aggregate_results: recomputed independently, replicates=1 gives zero std") {
    const ExperimentConfig cfg = small_config();
    const auto outcomes = run_experiment(cfg, 2);
    const auto rows = aggregate_results(outcomes);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.ok_count == cfg.replicates);
        // independent recompute of mean/std for metric 0 (rel_err_product)
        std::vector<double> vals;
        for (const auto& o : outcomes) {
            if (o.n == row.n && o.ok) vals.push_back(o.report.rel_err_product);
        }
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= vals.size();
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        const double stddev = std::sqrt(var / vals.size());
        CHECK(std::abs(row.mean[0] - mean) <= 1e-12);
        CHECK(std::abs(row.stddev[0] - stddev) <= 1e-12);
    }

    ExperimentConfig one = cfg;
    one.replicates = 1;
    one.n_grid = {30};
    const auto single = run_experiment(one, 1);
    const auto single_rows = aggregate_results(single);
    REQUIRE(single_rows.size() == 1);
    for (int k = 0; k < kMetricCount; ++k) CHECK(single_rows[0].stddev[k] == 0.0);
}

TEST_CASE("failed runs are marked and the sweep continues") {
    ExperimentConfig cfg = small_config();
    cfg.model1 = GraphModel::grid(2, 2);
    cfg.model2 = GraphModel::grid(3, 1);
    cfg.p1 = 4;
    cfg.p2 = 3;
    cfg.kind = ProductKind::Kronecker;  // bipartite x bipartite: every run fails
    cfg.n_grid = {10};
    cfg.replicates = 2;
    const auto outcomes = run_experiment(cfg, 1);
    REQUIRE(outcomes.size() == 2);
    for (const auto& o : outcomes) {
        CHECK_FALSE(o.ok);
        CHECK_FALSE(o.error.empty());
        const std::string row = results_csv_row(o);
        CHECK(row.find("nan") != std::string::npos);
    }
    const auto rows = aggregate_results(outcomes);
    CHECK(rows[0].ok_count == 0);
}

TEST_CASE("metric_slopes: recovers a planted power law") {
    std::vector<AggregateRow> rows;
    for (int n : {10, 20, 40, 80}) {
        AggregateRow row;
        row.n = n;
        row.ok_count = 5;
        for (int k = 0; k < kMetricCount; ++k) row.mean[k] = 4.2 / std::sqrt(n);
        rows.push_back(row);
    }
    const auto slopes = metric_slopes(rows);
    for (int k = 0; k < kMetricCount; ++k) {
        CHECK(slopes[k] == doctest::Approx(-0.5).epsilon(1e-12));
    }
}

TEST_CASE("resolve_threads: env cap applies") {
    ::setenv("KRONLEARN_THREADS", "1", 1);
    CHECK(resolve_threads(8) == 1);
    ::setenv("KRONLEARN_THREADS", "4", 1);
    CHECK(resolve_threads(2) == 2);
    ::unsetenv("KRONLEARN_THREADS");
    CHECK(resolve_threads(3) == 3);
}
