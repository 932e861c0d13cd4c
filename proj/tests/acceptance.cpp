// Acceptance suite: eight end-to-end criteria, one pass/fail line each.
// Exit status 0 iff every criterion passes.

#include "kronlearn/experiment.hpp"
#include "kronlearn/graphrep.hpp"
#include "kronlearn/metrics.hpp"
#include "kronlearn/solver.hpp"
#include "kronlearn/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace kronlearn;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int id, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[64];
    std::snprintf(buf, sizeof(buf), "; %.1fs", secs);
    report(id, name, pass, detail + buf);
}

WeightVector random_weights(int p, RandomStream& rng, double density, double lo, double hi) {
    WeightVector wv = WeightVector::zeros(p);
    for (Eigen::Index m = 0; m < wv.w.size(); ++m) {
        if (rng.uniform01() < density) wv.w[m] = rng.uniform(lo, hi);
    }
    return wv;
}

SymMatrix population_covariance(const WeightVector& w1, const WeightVector& w2,
                                ProductKind kind) {
    const Eigen::MatrixXd lap = product_laplacian(w1, w2, kind).dense();
    const int p = static_cast<int>(lap.rows());
    Eigen::MatrixXd lj = lap;
    lj.array() += 1.0 / p;
    return SymMatrix::symmetrized(lj.llt().solve(Eigen::MatrixXd::Identity(p, p)));
}

std::pair<WeightVector, WeightVector> seeded_er_factors(int p1, int p2, std::uint64_t seed,
                                                        ProductKind kind) {
    RandomStream t1(seed, Stream::FactorTopology1), w1s(seed, Stream::FactorWeights1);
    RandomStream t2(seed, Stream::FactorTopology2), w2s(seed, Stream::FactorWeights2);
    const GraphModel model = GraphModel::erdos_renyi(0.3);
    WeightVector w1 = generate_factor(model, p1, t1, w1s);
    WeightVector w2 = generate_factor(model, p2, t2, w2s);
    while (!is_connected(compose_product(w1, w2, kind))) {
        w1 = generate_factor(model, p1, t1, w1s);
        w2 = generate_factor(model, p2, t2, w2s);
    }
    return {w1, w2};
}

// ---- criterion 1 ---------------------------------------------------------

std::pair<bool, std::string> criterion_operator_algebra() {
    RandomStream rng(1001);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 2 + rng.uniform_int(7);
        const WeightVector w = random_weights(p, rng, 0.8, 0.0, 2.0);
        Eigen::MatrixXd q(p, p);
        for (int j = 0; j < p; ++j) {
            for (int i = 0; i < p; ++i) q(i, j) = rng.uniform(-1.0, 1.0);
        }
        const Eigen::MatrixXd q_sym = 0.5 * (q + q.transpose());

        const Eigen::MatrixXd lw = laplacian_from_weights(w).dense();
        double lhs = 0.0;
        for (int j = 0; j < p; ++j) {
            for (int i = 0; i < p; ++i) lhs += lw(i, j) * q(i, j);
        }
        const double rhs = w.w.dot(lap_adjoint(q));
        const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
        worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / scale);

        const Eigen::MatrixXd aw = adjacency_from_weights(w).dense();
        double lhs_a = 0.0;
        for (int j = 0; j < p; ++j) {
            for (int i = 0; i < p; ++i) lhs_a += aw(i, j) * q_sym(i, j);
        }
        const double rhs_a = 2.0 * w.w.dot(adj_adjoint(q_sym));
        const double scale_a = std::max({std::abs(lhs_a), std::abs(rhs_a), 1e-30});
        worst_rel = std::max(worst_rel, std::abs(lhs_a - rhs_a) / scale_a);
    }
    if (worst_rel > 1e-10) {
        return {false, "adjoint identity relative deviation " + std::to_string(worst_rel)};
    }

    // compose_product vs brute-force pairwise construction, exhaustive sizes
    double worst_abs = 0.0;
    for (int p1 = 2; p1 <= 4; ++p1) {
        for (int p2 = 2; p2 <= 4; ++p2) {
            for (ProductKind kind : {ProductKind::Kronecker, ProductKind::Strong}) {
                for (int rep = 0; rep < 3; ++rep) {
                    const WeightVector w1 = random_weights(p1, rng, 0.7, 0.0, 2.0);
                    const WeightVector w2 = random_weights(p2, rng, 0.7, 0.0, 2.0);
                    const WeightVector prod = compose_product(w1, w2, kind);
                    const Eigen::MatrixXd a1 = adjacency_from_weights(w1).dense();
                    const Eigen::MatrixXd a2 = adjacency_from_weights(w2).dense();
                    const int p = p1 * p2;
                    for (int alpha = 1; alpha <= p; ++alpha) {
                        for (int beta = 1; beta < alpha; ++beta) {
                            const int i1 = (alpha - 1) / p2, i2 = (alpha - 1) % p2;
                            const int j1 = (beta - 1) / p2, j2 = (beta - 1) % p2;
                            double expect = a1(i1, j1) * a2(i2, j2);
                            if (kind == ProductKind::Strong) {
                                if (i2 == j2) expect += a1(i1, j1);
                                if (i1 == j1) expect += a2(i2, j2);
                            }
                            worst_abs = std::max(
                                worst_abs,
                                std::abs(prod.w[pair_index(alpha, beta, p) - 1] - expect));
                        }
                    }
                }
            }
        }
    }
    if (worst_abs > 1e-14) {
        return {false, "compose_product deviates from brute force by " +
                           std::to_string(worst_abs)};
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "adjoint rel dev %.2e, compose abs dev %.2e", worst_rel,
                  worst_abs);
    return {true, buf};
}

// ---- criterion 2 ---------------------------------------------------------

std::pair<bool, std::string> criterion_gradient_oracle() {
    RandomStream rng(2002);
    const double h = 1e-6;
    double worst = 0.0;
    int states = 0;
    while (states < 50) {
        const int p1 = 3 + rng.uniform_int(3);
        const int p2 = 3 + rng.uniform_int(3);
        const ProductKind kind =
            states % 2 == 0 ? ProductKind::Kronecker : ProductKind::Strong;
        auto [wt1, wt2] = seeded_er_factors(p1, p2, 5000 + states, kind);
        const Moments mom = Moments::from_covariance(population_covariance(wt1, wt2, kind));
        SolverConfig cfg;
        cfg.kind = kind;
        cfg.alpha1 = 0.03;
        cfg.alpha2 = 0.01;
        const WeightVector w1 = random_weights(p1, rng, 1.0, 0.3, 1.5);
        const WeightVector w2 = random_weights(p2, rng, 1.0, 0.3, 1.5);

        const Eigen::VectorXd g1 = gradient_w1(w1, w2, mom, cfg);
        Eigen::VectorXd fd1(g1.size());
        for (Eigen::Index m = 0; m < g1.size(); ++m) {
            WeightVector up = w1, dn = w1;
            up.w[m] += h;
            dn.w[m] -= h;
            fd1[m] = (objective(up, w2, mom, cfg) - objective(dn, w2, mom, cfg)) / (2.0 * h);
        }
        worst = std::max(worst, (g1 - fd1).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, fd1.lpNorm<Eigen::Infinity>()));

        const Eigen::VectorXd g2 = gradient_w2(w1, w2, mom, cfg);
        Eigen::VectorXd fd2(g2.size());
        for (Eigen::Index m = 0; m < g2.size(); ++m) {
            WeightVector up = w2, dn = w2;
            up.w[m] += h;
            dn.w[m] -= h;
            fd2[m] = (objective(w1, up, mom, cfg) - objective(w1, dn, mom, cfg)) / (2.0 * h);
        }
        worst = std::max(worst, (g2 - fd2).lpNorm<Eigen::Infinity>() /
                                    std::max(1.0, fd2.lpNorm<Eigen::Infinity>()));
        ++states;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "worst relative FD mismatch %.2e over 50 states", worst);
    return {worst <= 1e-5, buf};
}

// ---- criterion 3 ---------------------------------------------------------

std::pair<bool, std::string> criterion_descent_feasibility() {
    struct Setup {
        GraphModel m1, m2;
        int p1, p2;
        ProductKind kind;
        int n;
    };
    const std::vector<Setup> matrix = {
        {GraphModel::erdos_renyi(0.4), GraphModel::erdos_renyi(0.4), 4, 4,
         ProductKind::Kronecker, 100},
        {GraphModel::erdos_renyi(0.4), GraphModel::erdos_renyi(0.4), 4, 4,
         ProductKind::Strong, 100},
        {GraphModel::barabasi_albert(2, 2), GraphModel::watts_strogatz(2, 0.1), 5, 6,
         ProductKind::Kronecker, 200},
        {GraphModel::barabasi_albert(2, 2), GraphModel::watts_strogatz(2, 0.1), 5, 6,
         ProductKind::Strong, 200},
        {GraphModel::grid(2, 3), GraphModel::erdos_renyi(0.5), 6, 5, ProductKind::Strong,
         150},
    };
    int runs = 0;
    for (std::size_t s = 0; s < matrix.size(); ++s) {
        const Setup& setup = matrix[s];
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const GeneratedRun run = generate_run(setup.m1, setup.m2, setup.p1, setup.p2,
                                                  setup.kind, setup.n, 90000 + 100 * s + seed);
            const Moments mom = Moments::from_dataset(run.dataset);
            SolverConfig cfg;
            cfg.kind = setup.kind;
            cfg.alpha1 = cfg.alpha2 = default_alpha(mom);
            ProductSpec spec{setup.p1, setup.p2, setup.kind};
            const SolverState state = ksgl_solve(mom, spec, cfg);
            if (state.termination_reason == TerminationReason::LineSearchFailure) {
                return {false, "line search failure on setup " + std::to_string(s)};
            }
            for (std::size_t k = 1; k < state.objective_trace.size(); ++k) {
                if (state.objective_trace[k] > state.objective_trace[k - 1]) {
                    return {false, "objective increased at step " + std::to_string(k)};
                }
            }
            if (state.w1.w.minCoeff() < 0.0 || state.w2.w.minCoeff() < 0.0) {
                return {false, "negative weight in final state"};
            }
            // final iterate keeps L + J positive definite
            Eigen::MatrixXd lj = product_laplacian(state.w1, state.w2, setup.kind).dense();
            lj.array() += 1.0 / spec.p();
            if (Eigen::LLT<Eigen::MatrixXd>(lj).info() != Eigen::Success) {
                return {false, "final iterate lost positive definiteness"};
            }
            ++runs;
        }
    }
    return {true, std::to_string(runs) + " seeded runs, all traces non-increasing and feasible"};
}

// ---- criterion 4 ---------------------------------------------------------

std::pair<bool, std::string> criterion_population_limit() {
    auto [w1_true, w2_true] = seeded_er_factors(7, 6, 4242, ProductKind::Kronecker);
    const Moments mom =
        Moments::from_covariance(population_covariance(w1_true, w2_true, ProductKind::Kronecker));
    SolverConfig cfg;
    cfg.kind = ProductKind::Kronecker;
    cfg.alpha1 = cfg.alpha2 = 1e-4;
    ProductSpec spec{7, 6, ProductKind::Kronecker};
    const SolverState state = ksgl_solve(mom, spec, cfg);
    const EvalReport rep =
        evaluate(state.w1, state.w2, w1_true, w2_true, ProductKind::Kronecker, 0, 4242);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "product rel-err %.4f (<= 0.05), product PR-AUC %.3f (= 1)",
                  rep.rel_err_product, rep.pr_auc_product);
    return {rep.rel_err_product <= 0.05 && rep.pr_auc_product == 1.0, buf};
}

// ---- criteria 5-7 share the experiment harness ---------------------------

ExperimentConfig rate_config() {
    ExperimentConfig cfg;
    cfg.model1 = GraphModel::erdos_renyi(0.3);
    cfg.model2 = GraphModel::erdos_renyi(0.3);
    cfg.p1 = 10;
    cfg.p2 = 12;
    cfg.kind = ProductKind::Kronecker;
    cfg.n_grid.clear();
    for (int r = 0; r <= 8; ++r) cfg.n_grid.push_back(10 << r);
    cfg.replicates = 10;
    cfg.base_seed = 71000;
    cfg.alpha_auto = false;
    cfg.solver.alpha1 = cfg.solver.alpha2 = 1e-4;
    cfg.solver.eta0 = 0.2;
    cfg.solver.kind = cfg.kind;
    return cfg;
}

std::pair<bool, std::string> criterion_rate() {
    const ExperimentConfig cfg = rate_config();
    const auto outcomes = run_experiment(cfg, resolve_threads(0));
    int failures = 0;
    for (const auto& o : outcomes) {
        if (!o.ok) ++failures;
    }
    const auto rows = aggregate_results(outcomes);
    const auto slopes = metric_slopes(rows);
    std::ostringstream detail;
    detail << "slope of mean product rel-err vs n: " << slopes[0] << " (want [-0.65, -0.35])";
    if (failures > 0) detail << ", " << failures << " failed runs";
    return {failures == 0 && slopes[0] >= -0.65 && slopes[0] <= -0.35, detail.str()};
}

std::pair<bool, std::string> criterion_edge_recovery() {
    const double alpha_grid[3] = {1e-4, 1e-3, 1e-2};
    double best_prod = -1.0, best_f1 = -1.0, best_f2 = -1.0, best_alpha = 0.0;
    for (double alpha : alpha_grid) {
        ExperimentConfig cfg = rate_config();
        cfg.n_grid = {2560};
        cfg.solver.alpha1 = cfg.solver.alpha2 = alpha;
        const auto outcomes = run_experiment(cfg, resolve_threads(0));
        const auto rows = aggregate_results(outcomes);
        if (rows.empty() || rows[0].ok_count == 0) continue;
        if (rows[0].mean[3] > best_prod) {
            best_prod = rows[0].mean[3];
            best_f1 = rows[0].mean[4];
            best_f2 = rows[0].mean[5];
            best_alpha = alpha;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "best alpha %.0e: mean PR-AUC product %.4f, f1 %.4f, f2 %.4f (all >= 0.95)",
                  best_alpha, best_prod, best_f1, best_f2);
    return {best_prod >= 0.95 && best_f1 >= 0.95 && best_f2 >= 0.95, buf};
}

std::pair<bool, std::string> criterion_strong_product() {
    ExperimentConfig cfg;
    cfg.model1 = GraphModel::erdos_renyi(0.3);
    cfg.model2 = GraphModel::erdos_renyi(0.3);
    cfg.p1 = 7;
    cfg.p2 = 6;
    cfg.kind = ProductKind::Strong;
    cfg.solver.kind = cfg.kind;
    cfg.n_grid.clear();
    for (int r = 4; r <= 8; ++r) cfg.n_grid.push_back(10 << r);
    cfg.replicates = 10;
    cfg.base_seed = 72000;
    cfg.alpha_auto = false;
    cfg.solver.alpha1 = cfg.solver.alpha2 = 1e-3;
    cfg.solver.eta0 = 0.2;
    const auto outcomes = run_experiment(cfg, resolve_threads(0));
    int failures = 0;
    for (const auto& o : outcomes) {
        if (!o.ok) ++failures;
    }
    const auto rows = aggregate_results(outcomes);
    bool monotone = failures == 0 && rows.size() == cfg.n_grid.size();
    for (std::size_t k = 1; k < rows.size() && monotone; ++k) {
        if (!(rows[k].mean[1] < rows[k - 1].mean[1]) ||
            !(rows[k].mean[2] < rows[k - 1].mean[2])) {
            monotone = false;
        }
    }
    const double prauc_final = rows.empty() ? 0.0 : rows.back().mean[3];
    std::ostringstream detail;
    detail << "product PR-AUC at n=2560: " << prauc_final << " (>= 0.9); factor rel-err means";
    for (const auto& row : rows) detail << " (" << row.mean[1] << "," << row.mean[2] << ")";
    detail << (monotone ? " strictly decreasing" : " NOT decreasing");
    if (failures > 0) detail << ", " << failures << " failed runs";
    return {failures == 0 && prauc_final >= 0.9 && monotone, detail.str()};
}

// ---- criterion 8 ---------------------------------------------------------

std::pair<bool, std::string> criterion_determinism() {
    ExperimentConfig cfg;
    cfg.model1 = GraphModel::erdos_renyi(0.5);
    cfg.model2 = GraphModel::erdos_renyi(0.5);
    cfg.p1 = 4;
    cfg.p2 = 4;
    cfg.kind = ProductKind::Kronecker;
    cfg.solver.kind = cfg.kind;
    cfg.n_grid = {10, 20};
    cfg.replicates = 3;
    cfg.base_seed = 31337;
    auto render = [&]() {
        const auto outcomes = run_experiment(cfg, resolve_threads(0));
        std::ostringstream out;
        out << results_csv_header() << '\n';
        for (const auto& o : outcomes) out << results_csv_row(o) << '\n';
        return out.str();
    };
    const std::string first = render();
    const std::string second = render();
    const bool same = first == second;
    return {same, same ? "two executions produced identical raw-results CSV content"
                       : "CSV content differs between executions"};
}

}  // namespace

int main() {
    run_criterion(1, "operator algebra property suite", criterion_operator_algebra);
    run_criterion(2, "gradient finite-difference oracle", criterion_gradient_oracle);
    run_criterion(3, "descent and feasibility", criterion_descent_feasibility);
    run_criterion(4, "population-limit recovery", criterion_population_limit);
    run_criterion(5, "rel-err rate vs n", criterion_rate);
    run_criterion(6, "edge recovery at large n", criterion_edge_recovery);
    run_criterion(7, "strong product recovery", criterion_strong_product);
    run_criterion(8, "experiment determinism", criterion_determinism);
    if (g_failures == 0) {
        std::printf("all 8 criteria passed\n");
        return 0;
    }
    std::printf("%d criteria FAILED\n", g_failures);
    return 1;
}
