#include "kronlearn/solver.hpp"

#include "kronlearn/graphrep.hpp"
#include "kronlearn/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace kronlearn {

namespace {

constexpr int kMaxHalvings = 60;
constexpr double kRelChangeFloor = 1e-12;

// Guard against LLT "succeeding" on an essentially singular L + J through
// tiny positive pivots: a structurally disconnected product yields a zero
// eigenvalue that rounding can turn into a pivot of order sqrt(eps)*scale.
bool llt_feasible(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success) return false;
    const auto& diag = llt.matrixLLT().diagonal();
    const double dmin = diag.minCoeff();
    const double dmax = diag.maxCoeff();
    return dmin > 0.0 && dmin > 3e-8 * dmax;
}

double logdet_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

// Solver core. Holds the fixed problem data plus the current iterate and all
// scratch buffers, so the inner loop runs allocation-free.
class Engine {
public:
    Engine(const ProductSpec& spec, const Moments& moments, const SolverConfig& config)
        : spec_(spec),
          cfg_(config),
          kern_(kernels::active()),
          k_dense_(moments.k.dense()),
          k_half_(adj_adjoint(moments.k.dense())),
          p_(spec.p()) {
        if (moments.k.p() != p_ || moments.s.p() != p_) {
            throw ValidationError("solver: moment matrices are " +
                                  std::to_string(moments.k.p()) + "x" +
                                  std::to_string(moments.k.p()) + " but p1*p2 = " +
                                  std::to_string(p_));
        }
        const int n_prod = static_cast<int>(num_pairs(p_));
        w_prod_.resize(n_prod);
        w_prod_trial_.resize(n_prod);
        lj_.resize(p_, p_);
        lj_trial_.resize(p_, p_);
        cinv_.resize(p_, p_);
        cdiag_.resize(p_);
        dist_c_.resize(p_, p_);
        diff_.resize(p_, p_);
        diff_comm_.resize(p_, p_);
        // product-node permutation swapping the factor roles
        perm_.resize(p_);
        for (int r = 0; r < p_; ++r) {
            perm_[r] = (r % spec_.p2) * spec_.p1 + r / spec_.p2;
        }
    }

    // Installs an iterate and evaluates the objective there.
    void set_state(const WeightVector& w1, const WeightVector& w2) {
        if (w1.p != spec_.p1 || w2.p != spec_.p2) {
            throw ValidationError("solver: weight vector sizes do not match the ProductSpec");
        }
        w1_ = w1.w;
        w2_ = w2.w;
        w1_eff_ = adjacency_from_weights(w1).dense();
        w2_eff_ = adjacency_from_weights(w2).dense();
        if (cfg_.kind == ProductKind::Strong) {
            w1_eff_.diagonal().array() += 1.0;
            w2_eff_.diagonal().array() += 1.0;
        }
        detail::compose_product_weights(w1_eff_, w2_eff_, spec_.p1, spec_.p2, w_prod_.data());
        detail::laplacian_plus_j(w_prod_.data(), p_, lj_);
        llt_.compute(lj_);
        if (!llt_feasible(llt_)) {
            throw DisconnectedProductError(
                "objective: product Laplacian plus J is not positive definite "
                "(disconnected product graph)");
        }
        llt_current_ = true;
        f_cur_ = data_term(w_prod_, w1_, w2_) - logdet_from_llt(llt_);
    }

    double current_objective() const { return f_cur_; }
    const Eigen::VectorXd& w(Factor f) const { return f == Factor::One ? w1_ : w2_; }

    // Gradient with respect to the target factor at the current iterate.
    Eigen::VectorXd gradient(Factor target) {
        if (!llt_current_) {
            llt_.compute(lj_);
            if (!llt_feasible(llt_)) {
                throw DisconnectedProductError("gradient: iterate is infeasible");
            }
            llt_current_ = true;
        }
        cinv_ = llt_.solve(Eigen::MatrixXd::Identity(p_, p_));
        cdiag_ = cinv_.diagonal();
        kern_.pairwise_sq_dists(cinv_.data(), cdiag_.data(), dist_c_.data(), p_);
        diff_ = k_dense_ - dist_c_;

        const bool first = target == Factor::One;
        const int pf = first ? spec_.p1 : spec_.p2;    // factor being updated
        const int po = first ? spec_.p2 : spec_.p1;    // the other factor
        const double alpha = first ? cfg_.alpha1 : cfg_.alpha2;
        const Eigen::MatrixXd& other_eff = first ? w2_eff_ : w1_eff_;

        const double* blocks = diff_.data();
        if (!first) {
            // permute so factor-2 blocks become contiguous p1 x p1 tiles
            for (int c = 0; c < p_; ++c) {
                const double* src = diff_.data() + static_cast<std::ptrdiff_t>(c) * p_;
                double* dst = diff_comm_.data() + static_cast<std::ptrdiff_t>(perm_[c]) * p_;
                for (int r = 0; r < p_; ++r) dst[perm_[r]] = src[r];
            }
            blocks = diff_comm_.data();
        }

        Eigen::VectorXd grad(num_pairs(pf));
        std::int64_t m = 0;
        for (int j = 0; j < pf; ++j) {
            for (int i = j + 1; i < pf; ++i, ++m) {
                const double* blk =
                    blocks + static_cast<std::ptrdiff_t>(j) * po * p_ + static_cast<std::ptrdiff_t>(i) * po;
                grad[m] = kern_.block_weighted_sum(blk, p_, other_eff.data(), po) + alpha;
            }
        }
        return grad;
    }

    // One inner projected-gradient loop on the target factor. Appends
    // accepted objective values to `trace`; returns accepted iterations.
    // Converged means both a sub-tolerance step AND a stationary point of the
    // convex sub-problem: max_i |min(w_i, grad_i)| <= 10 * tol_inner.
    int run_inner(Factor target, std::vector<double>& trace) {
        Eigen::VectorXd& w_cur = target == Factor::One ? w1_ : w2_;
        const Eigen::Index n = w_cur.size();
        Eigen::VectorXd grad(n), trial(n);
        int iters = 0;
        double last_rel = std::numeric_limits<double>::infinity();
        for (int it = 0; it < cfg_.max_inner; ++it) {
            grad = gradient(target);
            if (last_rel < cfg_.tol_inner &&
                kkt_residual(w_cur, grad) <= 10.0 * cfg_.tol_inner) {
                break;
            }
            double eta = cfg_.eta0;
            bool accepted = false;
            double f_new = 0.0, change = 0.0;
            for (int h = 0; h <= kMaxHalvings; ++h) {
                change = kern_.nonneg_step(w_cur.data(), grad.data(), eta, trial.data(), n);
                if (eval_trial(target, trial, &f_new) && f_new <= f_cur_) {
                    accepted = true;
                    break;
                }
                eta *= cfg_.backtrack;
            }
            if (!accepted) {
                throw LineSearchFailureError(
                    "no feasible non-increasing step after " + std::to_string(kMaxHalvings) +
                    " halvings (factor " + (target == Factor::One ? std::string("1") : "2") +
                    ", inner iteration " + std::to_string(it + 1) + ")");
            }
            const double scale = std::max(w_cur.lpNorm<Eigen::Infinity>(), kRelChangeFloor);
            commit_trial(target, trial, f_new);
            trace.push_back(f_cur_);
            ++iters;
            last_rel = change / scale;
        }
        return iters;
    }

    static double kkt_residual(const Eigen::VectorXd& w, const Eigen::VectorXd& grad) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            worst = std::max(worst, std::abs(std::min(w[i], grad[i])));
        }
        return worst;
    }

private:
    double data_term(const Eigen::VectorXd& w_prod, const Eigen::VectorXd& w1,
                     const Eigen::VectorXd& w2) const {
        return kern_.dot(w_prod.data(), k_half_.data(), w_prod.size()) +
               cfg_.alpha1 * w1.sum() + cfg_.alpha2 * w2.sum();
    }

    // Objective at a trial target-factor weight vector; false if infeasible.
    bool eval_trial(Factor target, const Eigen::VectorXd& trial, double* f_out) {
        const bool first = target == Factor::One;
        Eigen::MatrixXd& eff = first ? w1_eff_trial_ : w2_eff_trial_;
        eff = Eigen::MatrixXd::Zero(first ? spec_.p1 : spec_.p2, first ? spec_.p1 : spec_.p2);
        std::int64_t m = 0;
        const int pf = first ? spec_.p1 : spec_.p2;
        for (int j = 0; j < pf; ++j) {
            for (int i = j + 1; i < pf; ++i, ++m) {
                eff(i, j) = trial[m];
                eff(j, i) = trial[m];
            }
        }
        if (cfg_.kind == ProductKind::Strong) eff.diagonal().array() += 1.0;
        if (first) {
            detail::compose_product_weights(eff, w2_eff_, spec_.p1, spec_.p2,
                                            w_prod_trial_.data());
        } else {
            detail::compose_product_weights(w1_eff_, eff, spec_.p1, spec_.p2,
                                            w_prod_trial_.data());
        }
        detail::laplacian_plus_j(w_prod_trial_.data(), p_, lj_trial_);
        llt_trial_.compute(lj_trial_);
        if (!llt_feasible(llt_trial_)) return false;
        *f_out = first ? data_term(w_prod_trial_, trial, w2_)
                       : data_term(w_prod_trial_, w1_, trial);
        *f_out -= logdet_from_llt(llt_trial_);
        return *f_out == *f_out;  // reject NaN
    }

    void commit_trial(Factor target, const Eigen::VectorXd& trial, double f_new) {
        if (target == Factor::One) {
            w1_ = trial;
            w1_eff_.swap(w1_eff_trial_);
        } else {
            w2_ = trial;
            w2_eff_.swap(w2_eff_trial_);
        }
        w_prod_.swap(w_prod_trial_);
        lj_.swap(lj_trial_);
        std::swap(llt_, llt_trial_);  // llt_trial_ factored the accepted matrix
        llt_current_ = true;
        f_cur_ = f_new;
    }

    ProductSpec spec_;
    SolverConfig cfg_;
    const kernels::Kernels& kern_;
    Eigen::MatrixXd k_dense_;
    Eigen::VectorXd k_half_;
    int p_;

    Eigen::VectorXd w1_, w2_;
    Eigen::MatrixXd w1_eff_, w2_eff_;
    Eigen::MatrixXd w1_eff_trial_, w2_eff_trial_;
    Eigen::VectorXd w_prod_, w_prod_trial_;
    Eigen::MatrixXd lj_, lj_trial_;
    Eigen::LLT<Eigen::MatrixXd> llt_, llt_trial_;
    bool llt_current_ = false;
    double f_cur_ = 0.0;

    Eigen::MatrixXd cinv_, dist_c_, diff_, diff_comm_;
    Eigen::VectorXd cdiag_;
    std::vector<int> perm_;
};

ProductSpec spec_for(const WeightVector& w1, const WeightVector& w2,
                     const SolverConfig& config) {
    ProductSpec spec;
    spec.p1 = w1.p;
    spec.p2 = w2.p;
    spec.kind = config.kind;
    return spec;
}

double rel_change(const Eigen::VectorXd& now, const Eigen::VectorXd& before) {
    const double scale = std::max(before.lpNorm<Eigen::Infinity>(), kRelChangeFloor);
    return (now - before).lpNorm<Eigen::Infinity>() / scale;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) {
        throw ValidationError("SolverConfig: penalties must be >= 0");
    }
    if (!(eta0 > 0.0)) throw ValidationError("SolverConfig: eta0 must be > 0");
    if (!(backtrack > 0.0 && backtrack < 1.0)) {
        throw ValidationError("SolverConfig: backtrack must be in (0, 1)");
    }
    if (!(tol_inner > 0.0) || !(tol_outer > 0.0)) {
        throw ValidationError("SolverConfig: tolerances must be > 0");
    }
    if (max_inner < 1 || max_outer < 1) {
        throw ValidationError("SolverConfig: iteration caps must be >= 1");
    }
}

std::string to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::Tolerance: return "tolerance";
        case TerminationReason::MaxIterations: return "max_iterations";
        case TerminationReason::LineSearchFailure: return "line_search_failure";
    }
    return "unknown";
}

Moments Moments::from_dataset(const Dataset& ds) {
    return from_covariance(sample_covariance(ds));
}

Moments Moments::from_covariance(SymMatrix s) {
    Moments m;
    m.k = distance_matrix(s);
    m.s = std::move(s);
    return m;
}

SymMatrix sample_covariance(const Dataset& ds) {
    ds.validate();
    if (ds.n < 1) throw ValidationError("sample_covariance: dataset is empty");
    const int p = ds.spec.p();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(p, p);
    s.selfadjointView<Eigen::Lower>().rankUpdate(ds.samples.transpose(), 1.0 / ds.n);
    return SymMatrix::from_lower(s);
}

SymMatrix distance_matrix(const SymMatrix& s) {
    const int p = s.p();
    Eigen::VectorXd diag = s.dense().diagonal();
    Eigen::MatrixXd k(p, p);
    kernels::active().pairwise_sq_dists(s.dense().data(), diag.data(), k.data(),
                                        static_cast<std::size_t>(p));
    return SymMatrix::from_lower(k);
}

SymMatrix product_laplacian(const WeightVector& w1, const WeightVector& w2,
                            ProductKind kind) {
    return laplacian_from_weights(compose_product(w1, w2, kind));
}

double objective(const WeightVector& w1, const WeightVector& w2, const Moments& moments,
                 const SolverConfig& config) {
    config.validate();
    Engine eng(spec_for(w1, w2, config), moments, config);
    eng.set_state(w1, w2);
    return eng.current_objective();
}

Eigen::VectorXd gradient_w1(const WeightVector& w1, const WeightVector& w2,
                            const Moments& moments, const SolverConfig& config) {
    config.validate();
    Engine eng(spec_for(w1, w2, config), moments, config);
    eng.set_state(w1, w2);
    return eng.gradient(Factor::One);
}

Eigen::VectorXd gradient_w2(const WeightVector& w1, const WeightVector& w2,
                            const Moments& moments, const SolverConfig& config) {
    config.validate();
    Engine eng(spec_for(w1, w2, config), moments, config);
    eng.set_state(w1, w2);
    return eng.gradient(Factor::Two);
}

int pgd_inner(Factor target, SolverState& state, const Moments& moments,
              const SolverConfig& config) {
    config.validate();
    Engine eng(spec_for(state.w1, state.w2, config), moments, config);
    eng.set_state(state.w1, state.w2);
    if (state.objective_trace.empty()) {
        state.objective_trace.push_back(eng.current_objective());
    }
    const int iters = eng.run_inner(target, state.objective_trace);
    state.w1 = WeightVector(state.w1.p, eng.w(Factor::One));
    state.w2 = WeightVector(state.w2.p, eng.w(Factor::Two));
    return iters;
}

SolverState ksgl_solve(const Moments& moments, const ProductSpec& spec,
                       const SolverConfig& config,
                       const std::optional<WeightVector>& w1_init,
                       const std::optional<WeightVector>& w2_init) {
    config.validate();
    spec.validate();

    SolverState state;
    state.w1 = w1_init ? *w1_init : WeightVector::constant(spec.p1, 1.0 / spec.p1);
    state.w2 = w2_init ? *w2_init : WeightVector::constant(spec.p2, 1.0 / spec.p2);
    if (state.w1.p != spec.p1 || state.w2.p != spec.p2) {
        throw ValidationError("ksgl_solve: initial weights do not match the ProductSpec");
    }

    Engine eng(spec, moments, config);
    eng.set_state(state.w1, state.w2);
    state.objective_trace.push_back(eng.current_objective());

    bool failed = false;
    for (int sweep = 0; sweep < config.max_outer && !failed; ++sweep) {
        const Eigen::VectorXd w1_before = eng.w(Factor::One);
        const Eigen::VectorXd w2_before = eng.w(Factor::Two);
        try {
            eng.run_inner(Factor::One, state.objective_trace);
            eng.run_inner(Factor::Two, state.objective_trace);
        } catch (const LineSearchFailureError& e) {
            failed = true;
            state.termination_reason = TerminationReason::LineSearchFailure;
            state.message = "outer sweep " + std::to_string(sweep + 1) + ": " + e.what();
        }
        state.outer_sweeps = sweep + 1;
        if (failed) break;
        const double change = std::max(rel_change(eng.w(Factor::One), w1_before),
                                       rel_change(eng.w(Factor::Two), w2_before));
        if (change < config.tol_outer) {
            state.converged = true;
            state.termination_reason = TerminationReason::Tolerance;
            break;
        }
    }
    if (!failed && !state.converged) {
        state.termination_reason = TerminationReason::MaxIterations;
    }
    state.w1 = WeightVector(spec.p1, eng.w(Factor::One));
    state.w2 = WeightVector(spec.p2, eng.w(Factor::Two));
    return state;
}

SolverState ksgl_solve(const Dataset& ds, const SolverConfig& config) {
    ProductSpec spec = ds.spec;
    spec.kind = config.kind;
    return ksgl_solve(Moments::from_dataset(ds), spec, config);
}

double default_alpha(const Moments& moments) {
    Eigen::VectorXd k_half = adj_adjoint(moments.k.dense());
    std::vector<double> positive;
    positive.reserve(k_half.size());
    for (Eigen::Index i = 0; i < k_half.size(); ++i) {
        if (k_half[i] > 0.0) positive.push_back(k_half[i]);
    }
    if (positive.empty()) return 0.0;
    std::sort(positive.begin(), positive.end());
    const std::size_t n = positive.size();
    const double median = n % 2 == 1 ? positive[n / 2]
                                     : 0.5 * (positive[n / 2 - 1] + positive[n / 2]);
    return 0.01 * median;
}

}  // namespace kronlearn
