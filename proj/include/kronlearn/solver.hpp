#pragma once

#include "kronlearn/synth.hpp"
#include "kronlearn/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kronlearn {

// Penalized-MLE solver configuration. Serialized as JSON with exactly these
// field names.
struct SolverConfig {
    double alpha1 = 0.0;       // l1 penalty on factor-1 weights
    double alpha2 = 0.0;       // l1 penalty on factor-2 weights
    double eta0 = 1e-2;        // initial step size of every inner iteration
    double backtrack = 0.5;    // step shrink factor
    double tol_inner = 1e-6;   // relative-change stop for inner loops
    double tol_outer = 1e-5;   // relative-change stop for outer sweeps
    int max_inner = 1000;
    int max_outer = 50;
    ProductKind kind = ProductKind::Kronecker;

    void validate() const;
};

enum class TerminationReason { Tolerance, MaxIterations, LineSearchFailure };

std::string to_string(TerminationReason reason);

struct SolverState {
    WeightVector w1;
    WeightVector w2;
    std::vector<double> objective_trace;  // non-increasing across accepted steps
    int outer_sweeps = 0;
    bool converged = false;
    TerminationReason termination_reason = TerminationReason::MaxIterations;
    std::string message;
};

// Second-moment inputs of the solver: the sample covariance S and the matrix
// of pairwise squared signal distances K with K_ij = S_ii - 2 S_ij + S_jj.
struct Moments {
    SymMatrix s;
    SymMatrix k;

    static Moments from_dataset(const Dataset& ds);
    static Moments from_covariance(SymMatrix s);
};

enum class Factor { One, Two };

// S = (1/n) sum_k x_k x_k^T, no mean subtraction. Rejects n = 0.
SymMatrix sample_covariance(const Dataset& ds);

// K_ij = S_ii - 2 S_ij + S_jj; zero diagonal, nonnegative for PSD S.
SymMatrix distance_matrix(const SymMatrix& s);

// Laplacian of compose_product(w1, w2, kind).
SymMatrix product_laplacian(const WeightVector& w1, const WeightVector& w2,
                            ProductKind kind);

// <L, S> - logdet(L + J) + alpha1*sum(w1) + alpha2*sum(w2) where L is the
// product Laplacian at (w1, w2) and J = (1/p) 11^T. The data term is
// evaluated as sum_m w_prod[m] * K_m. Throws DisconnectedProductError when
// L + J is not positive definite.
double objective(const WeightVector& w1, const WeightVector& w2, const Moments& moments,
                 const SolverConfig& config);

// Full gradient of the objective with respect to w1 (resp. w2): entry m of
// the factor pair (i,j) is <W_other_eff, [K - dist((L+J)^{-1})]_block(i,j)> +
// alpha, with W_other_eff = W_other for the Kronecker kind and W_other + I
// for the strong kind.
Eigen::VectorXd gradient_w1(const WeightVector& w1, const WeightVector& w2,
                            const Moments& moments, const SolverConfig& config);
Eigen::VectorXd gradient_w2(const WeightVector& w1, const WeightVector& w2,
                            const Moments& moments, const SolverConfig& config);

// One projected-gradient inner loop on the target factor, holding the other
// fixed: repeats w <- max(0, w - eta*grad) with backtracking from eta0 until
// the relative change drops below tol_inner or max_inner is hit. Updates
// state.w1/w2 and appends accepted objective values to the trace. Returns the
// number of accepted iterations. Throws LineSearchFailureError after 60
// halvings without a feasible non-increase.
int pgd_inner(Factor target, SolverState& state, const Moments& moments,
              const SolverConfig& config);

// Alternating solve per the algorithm: w1 sweeps then w2 sweeps, starting
// from w1 = (1/p1) 1, w2 = (1/p2) 1 unless explicit initial weights are
// given. Line-search failures terminate the solve and are reported through
// termination_reason/message rather than thrown.
SolverState ksgl_solve(const Moments& moments, const ProductSpec& spec,
                       const SolverConfig& config,
                       const std::optional<WeightVector>& w1_init = std::nullopt,
                       const std::optional<WeightVector>& w2_init = std::nullopt);

SolverState ksgl_solve(const Dataset& ds, const SolverConfig& config);

// Default l1 penalty: 0.01 * median of the positive entries of K.
double default_alpha(const Moments& moments);

}  // namespace kronlearn
