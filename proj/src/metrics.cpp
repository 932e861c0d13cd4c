#include "kronlearn/metrics.hpp"

#include "kronlearn/graphrep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kronlearn {

double rel_err(const SymMatrix& l_hat, const SymMatrix& l_true, bool normalize) {
    if (l_hat.p() != l_true.p()) throw ValidationError("rel_err: dimension mismatch");
    const int p = l_hat.p();
    Eigen::MatrixXd a = l_hat.dense();
    Eigen::MatrixXd b = l_true.dense();
    if (normalize) {
        const double tr_a = a.trace();
        const double tr_b = b.trace();
        if (!(tr_a > 0.0) || !(tr_b > 0.0)) {
            throw ValidationError("rel_err: trace normalization needs Tr(L) > 0");
        }
        a *= p / tr_a;
        b *= p / tr_b;
    }
    const double denom = b.norm();
    if (denom == 0.0) throw ValidationError("rel_err: reference Laplacian is zero");
    return (a - b).norm() / denom;
}

double pr_auc(const Eigen::VectorXd& w_hat, const Eigen::VectorXd& w_true) {
    if (w_hat.size() != w_true.size()) throw ValidationError("pr_auc: length mismatch");
    const Eigen::Index n = w_hat.size();
    std::int64_t total_pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w_true[i] > 0.0) ++total_pos;
    }
    if (total_pos == 0) {
        throw ValidationError("pr_auc: ground truth has no positive edges (recall undefined)");
    }
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return w_hat[a] > w_hat[b]; });

    // walk tie groups of the learned scores; one operating point per group
    double area = 0.0;
    double recall_prev = 0.0;
    std::int64_t tp = 0, taken = 0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j < n && w_hat[order[j]] == w_hat[order[i]]) {
            if (w_true[order[j]] > 0.0) ++tp;
            ++taken;
            ++j;
        }
        const double precision = static_cast<double>(tp) / static_cast<double>(taken);
        const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
        area += (recall - recall_prev) * precision;
        recall_prev = recall;
        i = j;
    }
    return area;
}

double fit_rate(const std::vector<double>& ns, const std::vector<double>& errs) {
    if (ns.size() != errs.size()) throw ValidationError("fit_rate: length mismatch");
    if (ns.size() < 3) throw ValidationError("fit_rate: need at least 3 points");
    const std::size_t n = ns.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(ns[i] > 0.0) || !(errs[i] > 0.0)) {
            throw ValidationError("fit_rate: all inputs must be positive");
        }
        const double x = std::log(ns[i]);
        const double y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("fit_rate: sample counts are all equal");
    return (n * sxy - sx * sy) / denom;
}

EvalReport evaluate(const WeightVector& w1_hat, const WeightVector& w2_hat,
                    const WeightVector& w1_true, const WeightVector& w2_true,
                    ProductKind kind, int n, std::uint64_t seed) {
    if (w1_hat.p != w1_true.p || w2_hat.p != w2_true.p) {
        throw ValidationError("evaluate: learned/true factor sizes differ");
    }
    EvalReport r;
    r.seed = seed;
    r.n = n;
    const WeightVector prod_hat = compose_product(w1_hat, w2_hat, kind);
    const WeightVector prod_true = compose_product(w1_true, w2_true, kind);
    r.rel_err_product = rel_err(laplacian_from_weights(prod_hat),
                                laplacian_from_weights(prod_true), false);
    r.rel_err_factor1 = rel_err(laplacian_from_weights(w1_hat),
                                laplacian_from_weights(w1_true), true);
    r.rel_err_factor2 = rel_err(laplacian_from_weights(w2_hat),
                                laplacian_from_weights(w2_true), true);
    r.pr_auc_product = pr_auc(prod_hat.w, prod_true.w);
    r.pr_auc_factor1 = pr_auc(w1_hat.w, w1_true.w);
    r.pr_auc_factor2 = pr_auc(w2_hat.w, w2_true.w);
    return r;
}

}  // namespace kronlearn
