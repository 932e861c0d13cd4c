#pragma once

#include <cstddef>

namespace kronlearn::kernels {

// Hot arithmetic loops of the solver, provided as plain-C-style kernels so an
// architecture-specific variant can be swapped in at runtime. All matrices
// are dense column-major. Every variant must compute the same quantities as
// the scalar reference up to floating-point reassociation.
struct Kernels {
    const char* name;

    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // dist[i + j*p] = diag[i] - 2*cov[i + j*p] + diag[j], zero diagonal.
    // diag must hold cov[i + i*p] (pre-extracted, contiguous).
    void (*pairwise_sq_dists)(const double* cov, const double* diag, double* dist,
                              std::size_t p);

    // sum_{a,b < m} weights[a + b*m] * block[a + b*ld]; ld >= m.
    double (*block_weighted_sum)(const double* block, std::size_t ld,
                                 const double* weights, std::size_t m);

    // out[i] = max(0, w[i] - eta*grad[i]); returns max_i |out[i] - w[i]|.
    double (*nonneg_step)(const double* w, const double* grad, double eta, double* out,
                          std::size_t n);
};

// Portable reference implementation.
const Kernels& scalar();

// Best variant supported by this CPU. Selected once on first use; the env var
// KRONLEARN_SIMD (scalar|avx2|neon) forces a specific variant and throws if it
// is not available on this machine.
const Kernels& active();

}  // namespace kronlearn::kernels
