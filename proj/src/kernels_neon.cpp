// NEON kernel variants for aarch64. float64x2 lanes, same contracts as the
// scalar reference.

#include "kernels_detail.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace kronlearn::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void pairwise_sq_dists_neon(const double* cov, const double* diag, double* dist,
                            std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        const float64x2_t dj = vdupq_n_f64(diag[j]);
        const float64x2_t minus_two = vdupq_n_f64(-2.0);
        const double* cov_col = cov + j * p;
        double* dist_col = dist + j * p;
        std::size_t i = 0;
        for (; i + 2 <= p; i += 2) {
            float64x2_t di = vld1q_f64(diag + i);
            float64x2_t c = vld1q_f64(cov_col + i);
            vst1q_f64(dist_col + i, vfmaq_f64(vaddq_f64(di, dj), minus_two, c));
        }
        for (; i < p; ++i) dist_col[i] = diag[i] - 2.0 * cov_col[i] + diag[j];
        dist_col[j] = 0.0;
    }
}

double block_weighted_sum_neon(const double* block, std::size_t ld,
                               const double* weights, std::size_t m) {
    float64x2_t acc_v = vdupq_n_f64(0.0);
    double acc_tail = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
        const double* blk_col = block + b * ld;
        const double* w_col = weights + b * m;
        std::size_t a = 0;
        for (; a + 2 <= m; a += 2) {
            acc_v = vfmaq_f64(acc_v, vld1q_f64(w_col + a), vld1q_f64(blk_col + a));
        }
        for (; a < m; ++a) acc_tail += w_col[a] * blk_col[a];
    }
    return vaddvq_f64(acc_v) + acc_tail;
}

double nonneg_step_neon(const double* w, const double* grad, double eta, double* out,
                        std::size_t n) {
    const float64x2_t eta_v = vdupq_n_f64(eta);
    const float64x2_t zero = vdupq_n_f64(0.0);
    float64x2_t max_v = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t wi = vld1q_f64(w + i);
        float64x2_t gi = vld1q_f64(grad + i);
        float64x2_t v = vmaxq_f64(zero, vfmsq_f64(wi, eta_v, gi));
        vst1q_f64(out + i, v);
        max_v = vmaxq_f64(max_v, vabdq_f64(v, wi));
    }
    double max_change = vmaxvq_f64(max_v);
    for (; i < n; ++i) {
        const double v = std::max(0.0, w[i] - eta * grad[i]);
        out[i] = v;
        max_change = std::max(max_change, std::abs(v - w[i]));
    }
    return max_change;
}

const Kernels kNeon = {
    "neon", dot_neon, pairwise_sq_dists_neon, block_weighted_sum_neon, nonneg_step_neon,
};

}  // namespace

const Kernels& detail_neon() { return kNeon; }

}  // namespace kronlearn::kernels

#endif  // arm
