#include "kronlearn/kernels.hpp"

#include "kernels_detail.hpp"
#include "kronlearn/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace kronlearn::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void pairwise_sq_dists_scalar(const double* cov, const double* diag, double* dist,
                              std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        const double dj = diag[j];
        const double* cov_col = cov + j * p;
        double* dist_col = dist + j * p;
        for (std::size_t i = 0; i < p; ++i) {
            dist_col[i] = diag[i] - 2.0 * cov_col[i] + dj;
        }
        dist_col[j] = 0.0;
    }
}

double block_weighted_sum_scalar(const double* block, std::size_t ld,
                                 const double* weights, std::size_t m) {
    double acc = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
        const double* blk_col = block + b * ld;
        const double* w_col = weights + b * m;
        for (std::size_t a = 0; a < m; ++a) acc += w_col[a] * blk_col[a];
    }
    return acc;
}

double nonneg_step_scalar(const double* w, const double* grad, double eta, double* out,
                          std::size_t n) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::max(0.0, w[i] - eta * grad[i]);
        out[i] = v;
        max_change = std::max(max_change, std::abs(v - w[i]));
    }
    return max_change;
}

const Kernels kScalar = {
    "scalar", dot_scalar, pairwise_sq_dists_scalar, block_weighted_sum_scalar,
    nonneg_step_scalar,
};

#if defined(__x86_64__) || defined(__i386__)
bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const Kernels& pick() {
    if (const char* env = std::getenv("KRONLEARN_SIMD")) {
        const std::string want = env;
        if (want == "scalar") return kScalar;
#if defined(__x86_64__) || defined(__i386__)
        if (want == "avx2") {
            if (!avx2_available()) throw ValidationError("KRONLEARN_SIMD=avx2 but the CPU lacks AVX2/FMA");
            return detail_avx2();
        }
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
        if (want == "neon") return detail_neon();
#endif
        throw ValidationError(std::string("KRONLEARN_SIMD=") + want +
                              " is not available in this build");
    }
#if defined(__x86_64__) || defined(__i386__)
    if (avx2_available()) return detail_avx2();
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
    return detail_neon();
#endif
    return kScalar;
}

}  // namespace

const Kernels& scalar() { return kScalar; }

const Kernels& active() {
    static const Kernels& chosen = pick();
    return chosen;
}

}  // namespace kronlearn::kernels
