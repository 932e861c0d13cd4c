// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers must gate on runtime CPU support (see kernels.cpp).

#include "kernels_detail.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace kronlearn::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void pairwise_sq_dists_avx2(const double* cov, const double* diag, double* dist,
                            std::size_t p) {
    for (std::size_t j = 0; j < p; ++j) {
        const __m256d dj = _mm256_set1_pd(diag[j]);
        const __m256d minus_two = _mm256_set1_pd(-2.0);
        const double* cov_col = cov + j * p;
        double* dist_col = dist + j * p;
        std::size_t i = 0;
        for (; i + 4 <= p; i += 4) {
            __m256d di = _mm256_loadu_pd(diag + i);
            __m256d c = _mm256_loadu_pd(cov_col + i);
            __m256d r = _mm256_fmadd_pd(minus_two, c, _mm256_add_pd(di, dj));
            _mm256_storeu_pd(dist_col + i, r);
        }
        for (; i < p; ++i) dist_col[i] = diag[i] - 2.0 * cov_col[i] + diag[j];
        dist_col[j] = 0.0;
    }
}

double block_weighted_sum_avx2(const double* block, std::size_t ld,
                               const double* weights, std::size_t m) {
    __m256d acc_v = _mm256_setzero_pd();
    double acc_tail = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
        const double* blk_col = block + b * ld;
        const double* w_col = weights + b * m;
        std::size_t a = 0;
        for (; a + 4 <= m; a += 4) {
            acc_v = _mm256_fmadd_pd(_mm256_loadu_pd(w_col + a),
                                    _mm256_loadu_pd(blk_col + a), acc_v);
        }
        for (; a < m; ++a) acc_tail += w_col[a] * blk_col[a];
    }
    return hsum(acc_v) + acc_tail;
}

double nonneg_step_avx2(const double* w, const double* grad, double eta, double* out,
                        std::size_t n) {
    const __m256d eta_v = _mm256_set1_pd(eta);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d max_v = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wi = _mm256_loadu_pd(w + i);
        __m256d gi = _mm256_loadu_pd(grad + i);
        __m256d v = _mm256_max_pd(zero, _mm256_fnmadd_pd(eta_v, gi, wi));
        _mm256_storeu_pd(out + i, v);
        __m256d change = _mm256_and_pd(abs_mask, _mm256_sub_pd(v, wi));
        max_v = _mm256_max_pd(max_v, change);
    }
    __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(max_v), _mm256_extractf128_pd(max_v, 1));
    double max_change = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
    for (; i < n; ++i) {
        const double v = std::max(0.0, w[i] - eta * grad[i]);
        out[i] = v;
        max_change = std::max(max_change, std::abs(v - w[i]));
    }
    return max_change;
}

const Kernels kAvx2 = {
    "avx2", dot_avx2, pairwise_sq_dists_avx2, block_weighted_sum_avx2, nonneg_step_avx2,
};

}  // namespace

const Kernels& detail_avx2() { return kAvx2; }

}  // namespace kronlearn::kernels

#endif  // x86
