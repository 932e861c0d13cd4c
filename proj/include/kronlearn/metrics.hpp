#pragma once

#include "kronlearn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kronlearn {

// Relative Frobenius error ||A - B||_F / ||B||_F of two Laplacians. With
// `normalize` set, both are first rescaled to p*L/Tr(L), which removes the
// scale ambiguity of learned factor graphs; rejects zero-trace inputs in
// that mode.
double rel_err(const SymMatrix& l_hat, const SymMatrix& l_true, bool normalize);

// Area under the precision-recall curve for edge prediction: pairs are
// ranked by learned weight descending, positives are the pairs with
// w_true > 0. Equal scores form a single operating point and the area uses
// the average-precision convention sum_k (R_k - R_{k-1}) P_k. Returns 1.0
// iff some threshold puts all positives above all negatives. Rejects
// all-negative ground truth.
double pr_auc(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true);

// Ordinary least-squares slope of log(err) against log(n). Needs >= 3
// points, all positive.
double fit_rate(const std::vector<double>& ns, const std::vector<double>& errs);

// One evaluated run. Factor errors are trace-normalized, the product error
// is not (the product Laplacian has no scale ambiguity).
struct EvalReport {
    std::uint64_t seed = 0;
    int n = 0;
    double rel_err_product = 0.0;
    double rel_err_factor1 = 0.0;
    double rel_err_factor2 = 0.0;
    double pr_auc_product = 0.0;
    double pr_auc_factor1 = 0.0;
    double pr_auc_factor2 = 0.0;
};

EvalReport evaluate(const WeightVector& w1_hat, const WeightVector& w2_hat,
                    const WeightVector& w1_true, const WeightVector& w2_true,
                    ProductKind kind, int n, std::uint64_t seed);

}  // namespace kronlearn
