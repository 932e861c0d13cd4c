#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kronlearn/kernels.hpp"
#include "kronlearn/rng.hpp"

#include <cmath>
#include <vector>

using namespace kronlearn;

namespace {

std::vector<double> random_vec(std::size_t n, RandomStream& rng, double lo = -1.0,
                               double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

}  // namespace

TEST_CASE("active variant is selected and named") {
    const auto& k = kernels::active();
    CHECK(k.name != nullptr);
    MESSAGE("active kernels: ", k.name);
}

TEST_CASE("dot: active matches scalar reference") {
    RandomStream rng(11);
    const auto& ref = kernels::scalar();
    const auto& act = kernels::active();
    for (std::size_t n : {0, 1, 3, 4, 7, 8, 15, 64, 257, 4096}) {
        auto a = random_vec(n, rng);
        auto b = random_vec(n, rng);
        const double d_ref = ref.dot(a.data(), b.data(), n);
        const double d_act = act.dot(a.data(), b.data(), n);
        double abs_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(a[i] * b[i]);
        CHECK(std::abs(d_ref - d_act) <= 1e-13 * (abs_sum + 1.0));
    }
}

TEST_CASE("pairwise_sq_dists: matches formula and scalar reference") {
    RandomStream rng(12);
    const auto& ref = kernels::scalar();
    const auto& act = kernels::active();
    for (std::size_t p : {2, 3, 5, 8, 33}) {
        // symmetric cov
        std::vector<double> cov(p * p);
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i <= j; ++i) {
                const double v = rng.uniform(-2.0, 2.0);
                cov[i + j * p] = v;
                cov[j + i * p] = v;
            }
        }
        std::vector<double> diag(p);
        for (std::size_t i = 0; i < p; ++i) diag[i] = cov[i + i * p];
        std::vector<double> d_ref(p * p), d_act(p * p);
        ref.pairwise_sq_dists(cov.data(), diag.data(), d_ref.data(), p);
        act.pairwise_sq_dists(cov.data(), diag.data(), d_act.data(), p);
        for (std::size_t j = 0; j < p; ++j) {
            for (std::size_t i = 0; i < p; ++i) {
                const double expect =
                    i == j ? 0.0 : diag[i] - 2.0 * cov[i + j * p] + diag[j];
                CHECK(d_ref[i + j * p] == doctest::Approx(expect).epsilon(1e-14));
                CHECK(std::abs(d_ref[i + j * p] - d_act[i + j * p]) <= 1e-13);
            }
        }
    }
}

TEST_CASE("block_weighted_sum: matches scalar reference on embedded blocks") {
    RandomStream rng(13);
    const auto& ref = kernels::scalar();
    const auto& act = kernels::active();
    for (std::size_t m : {1, 2, 3, 4, 5, 9, 16, 30}) {
        const std::size_t ld = m + 7;
        auto big = random_vec(ld * m, rng);
        auto w = random_vec(m * m, rng);
        const double s_ref = ref.block_weighted_sum(big.data(), ld, w.data(), m);
        const double s_act = act.block_weighted_sum(big.data(), ld, w.data(), m);
        double abs_sum = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            for (std::size_t a = 0; a < m; ++a) abs_sum += std::abs(w[a + b * m] * big[a + b * ld]);
        }
        CHECK(std::abs(s_ref - s_act) <= 1e-13 * (abs_sum + 1.0));
    }
}

TEST_CASE("nonneg_step: clamps at zero exactly and reports max change") {
    const auto& ref = kernels::scalar();
    std::vector<double> w{0.1, 0.5, 0.0, 2.0};
    std::vector<double> g{100.0, -1.0, 0.0, 10.0};
    std::vector<double> out(4);
    const double change = ref.nonneg_step(w.data(), g.data(), 1e-2, out.data(), 4);
    CHECK(out[0] == 0.0);  // 0.1 - 1.0 clamps
    CHECK(out[1] == doctest::Approx(0.51));
    CHECK(out[2] == 0.0);
    CHECK(out[3] == doctest::Approx(1.9));
    CHECK(change == doctest::Approx(0.1));
}

TEST_CASE("nonneg_step: active matches scalar reference") {
    RandomStream rng(14);
    const auto& ref = kernels::scalar();
    const auto& act = kernels::active();
    for (std::size_t n : {1, 2, 4, 5, 17, 100}) {
        auto w = random_vec(n, rng, 0.0, 1.0);
        auto g = random_vec(n, rng, -3.0, 3.0);
        std::vector<double> o_ref(n), o_act(n);
        const double eta = 0.37;
        const double c_ref = ref.nonneg_step(w.data(), g.data(), eta, o_ref.data(), n);
        const double c_act = act.nonneg_step(w.data(), g.data(), eta, o_act.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            // FMA vs separate multiply-subtract may differ in the last ulp
            CHECK(std::abs(o_ref[i] - o_act[i]) <= 1e-15 * (std::abs(w[i]) + eta * std::abs(g[i])) + 1e-300);
        }
        CHECK(std::abs(c_ref - c_act) <= 1e-14);
    }
}
