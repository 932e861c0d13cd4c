#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kronlearn/graphrep.hpp"
#include "kronlearn/metrics.hpp"
#include "kronlearn/rng.hpp"

#include <cmath>

using namespace kronlearn;

TEST_CASE("rel_err: exact match, scaling, and normalization") {
    WeightVector w(3, Eigen::Vector3d(1.0, 0.5, 2.0));
    const SymMatrix l = laplacian_from_weights(w);
    CHECK(rel_err(l, l, false) == 0.0);
    CHECK(rel_err(l, l, true) == 0.0);

    WeightVector w2x(3, Eigen::Vector3d(2.0, 1.0, 4.0));
    const SymMatrix l2 = laplacian_from_weights(w2x);
    CHECK(rel_err(l2, l, true) <= 1e-14);          // scale-invariant when normalized
    WeightVector wh(3, Eigen::Vector3d(0.5, 0.25, 1.0));
    CHECK(rel_err(laplacian_from_weights(wh), l, false) == doctest::Approx(0.5).epsilon(1e-12));

    const SymMatrix zero(3);
    CHECK_THROWS_AS(rel_err(zero, l, true), ValidationError);
}

TEST_CASE("rel_err: symmetric under simultaneous scaling in normalized mode") {
    RandomStream rng(40);
    WeightVector a = WeightVector::zeros(4);
    WeightVector b = WeightVector::zeros(4);
    for (Eigen::Index m = 0; m < a.w.size(); ++m) {
        a.w[m] = rng.uniform(0.1, 1.0);
        b.w[m] = rng.uniform(0.1, 1.0);
    }
    const double base =
        rel_err(laplacian_from_weights(a), laplacian_from_weights(b), true);
    WeightVector a3 = a, b7 = b;
    a3.w *= 3.0;
    b7.w *= 7.0;
    const double scaled =
        rel_err(laplacian_from_weights(a3), laplacian_from_weights(b7), true);
    CHECK(base == doctest::Approx(scaled).epsilon(1e-12));
}

TEST_CASE("pr_auc: perfect separation scores 1") {
    Eigen::VectorXd truth(6), learned(6);
    truth << 1.0, 0.0, 2.0, 0.0, 0.0, 0.5;
    learned << 0.2, 0.0, 0.9, 0.0, 0.0, 0.1;
    CHECK(pr_auc(learned, truth) == 1.0);
}

TEST_CASE("pr_auc: all-equal scores give the prevalence") {
    Eigen::VectorXd truth(8);
    truth << 1, 0, 0, 1, 0, 0, 0, 1;  // 3 positives of 8
    const Eigen::VectorXd learned = Eigen::VectorXd::Constant(8, 0.4);
    CHECK(pr_auc(learned, truth) == doctest::Approx(3.0 / 8.0).epsilon(1e-14));
}

TEST_CASE("pr_auc: reversed ranking with one positive of three") {
    Eigen::VectorXd truth(3), learned(3);
    truth << 1.0, 0.0, 0.0;
    learned << 0.1, 0.5, 0.9;  // the positive is ranked last
    CHECK(pr_auc(learned, truth) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("pr_auc: rejects all-negative ground truth") {
    CHECK_THROWS_AS(pr_auc(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(3)),
                    ValidationError);
}

TEST_CASE("pr_auc: invariant under strictly monotone transforms") {
    RandomStream rng(41);
    Eigen::VectorXd truth(20), learned(20);
    for (int i = 0; i < 20; ++i) {
        truth[i] = rng.uniform01() < 0.3 ? 1.0 : 0.0;
        learned[i] = rng.uniform(0.0, 2.0);
    }
    if (truth.maxCoeff() == 0.0) truth[0] = 1.0;
    const double base = pr_auc(learned, truth);
    Eigen::VectorXd warped = learned;
    for (int i = 0; i < 20; ++i) warped[i] = std::exp(3.0 * learned[i]) + 1.0;
    CHECK(pr_auc(warped, truth) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("fit_rate: synthetic power laws") {
    std::vector<double> ns{10, 20, 40, 80, 160};
    std::vector<double> sqrt_law, flat, inv_law;
    for (double n : ns) {
        sqrt_law.push_back(3.0 / std::sqrt(n));
        flat.push_back(0.7);
        inv_law.push_back(5.0 / n);
    }
    CHECK(fit_rate(ns, sqrt_law) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit_rate(ns, flat) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit_rate(ns, inv_law) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("fit_rate: invariant to scaling the errors") {
    std::vector<double> ns{16, 32, 64, 128};
    std::vector<double> errs{0.9, 0.62, 0.48, 0.31};
    std::vector<double> scaled = errs;
    for (double& e : scaled) e *= 42.0;
    CHECK(fit_rate(ns, errs) == doctest::Approx(fit_rate(ns, scaled)).epsilon(1e-12));
}

TEST_CASE("fit_rate: input validation") {
    CHECK_THROWS_AS(fit_rate({10, 20}, {1.0, 0.5}), ValidationError);
    CHECK_THROWS_AS(fit_rate({10, 20, 30}, {1.0, -0.5, 0.2}), ValidationError);
    CHECK_THROWS_AS(fit_rate({10, 20, 30}, {1.0, 0.5}), ValidationError);
}

TEST_CASE("evaluate: self-evaluation is perfect") {
    RandomStream rng(42);
    WeightVector w1 = WeightVector::zeros(4);
    WeightVector w2 = WeightVector::zeros(3);
    for (Eigen::Index m = 0; m < w1.w.size(); ++m) {
        w1.w[m] = rng.uniform01() < 0.6 ? rng.uniform(0.1, 2.0) : 0.0;
    }
    for (Eigen::Index m = 0; m < w2.w.size(); ++m) {
        w2.w[m] = rng.uniform01() < 0.6 ? rng.uniform(0.1, 2.0) : 0.0;
    }
    if (w1.w.maxCoeff() == 0.0) w1.w[0] = 1.0;
    if (w2.w.maxCoeff() == 0.0) w2.w[0] = 1.0;
    const EvalReport r = evaluate(w1, w2, w1, w2, ProductKind::Strong, 128, 9);
    CHECK(r.rel_err_product == 0.0);
    CHECK(r.rel_err_factor1 == 0.0);
    CHECK(r.pr_auc_product == 1.0);
    CHECK(r.pr_auc_factor1 == 1.0);
    CHECK(r.pr_auc_factor2 == 1.0);
    CHECK(r.n == 128);
    CHECK(r.seed == 9);
}

TEST_CASE("evaluate: factor scale ambiguity cancels in normalized factor errors") {
    RandomStream rng(43);
    WeightVector w1 = WeightVector::constant(4, 1.0);
    WeightVector w2 = WeightVector::constant(3, 0.5);
    WeightVector w1_scaled = w1, w2_scaled = w2;
    w1_scaled.w *= 5.0;
    w2_scaled.w /= 5.0;
    const EvalReport r =
        evaluate(w1_scaled, w2_scaled, w1, w2, ProductKind::Kronecker, 10, 1);
    CHECK(r.rel_err_product <= 1e-12);
    CHECK(r.rel_err_factor1 <= 1e-12);
    CHECK(r.rel_err_factor2 <= 1e-12);
}
