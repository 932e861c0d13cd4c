#include "kronlearn/graphrep.hpp"

namespace kronlearn {

namespace {

void check_pair(int i, int j, int p) {
    if (p < 2) throw ValidationError("pair_index: p must be >= 2");
    if (j < 1 || i > p || i <= j) {
        throw ValidationError("pair_index: need 1 <= j < i <= p, got i=" + std::to_string(i) +
                              ", j=" + std::to_string(j) + ", p=" + std::to_string(p));
    }
}

void check_square(const Eigen::MatrixXd& q) {
    if (q.rows() != q.cols()) throw ValidationError("adjoint operators need a square matrix");
    if (q.rows() < 2) throw ValidationError("adjoint operators need p >= 2");
}

}  // namespace

std::int64_t pair_index(int i, int j, int p) {
    check_pair(i, j, p);
    const std::int64_t jj = j;
    return (i - j) + (jj - 1) * (2 * static_cast<std::int64_t>(p) - jj) / 2;
}

std::pair<int, int> pair_nodes(std::int64_t m, int p) {
    if (m < 1 || m > num_pairs(p)) {
        throw ValidationError("pair_nodes: index " + std::to_string(m) + " out of range for p=" +
                              std::to_string(p));
    }
    std::int64_t offset = 0;
    for (int j = 1; j < p; ++j) {
        const int col_len = p - j;
        if (m <= offset + col_len) return {static_cast<int>(m - offset) + j, j};
        offset += col_len;
    }
    throw ValidationError("pair_nodes: unreachable");
}

SymMatrix adjacency_from_weights(const WeightVector& wv) {
    wv.validate();
    const int p = wv.p;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            out(i, j) = wv.w[m];
            out(j, i) = wv.w[m];
        }
    }
    return SymMatrix::from_lower(out);
}

SymMatrix laplacian_from_weights(const WeightVector& wv) {
    wv.validate();
    const int p = wv.p;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(p);
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            const double v = wv.w[m];
            out(i, j) = -v;
            out(j, i) = -v;
            deg[i] += v;
            deg[j] += v;
        }
    }
    out.diagonal() = deg;
    return SymMatrix::from_lower(out);
}

Eigen::VectorXd adj_adjoint(const Eigen::MatrixXd& q) {
    check_square(q);
    const int p = static_cast<int>(q.rows());
    Eigen::VectorXd out(num_pairs(p));
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            out[m] = 0.5 * (q(i, j) + q(j, i));
        }
    }
    return out;
}

Eigen::VectorXd lap_adjoint(const Eigen::MatrixXd& q) {
    check_square(q);
    const int p = static_cast<int>(q.rows());
    Eigen::VectorXd out(num_pairs(p));
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            out[m] = q(i, i) - q(i, j) - q(j, i) + q(j, j);
        }
    }
    return out;
}

Eigen::VectorXd degrees(const WeightVector& wv) {
    wv.validate();
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(wv.p);
    std::int64_t m = 0;
    for (int j = 0; j < wv.p; ++j) {
        for (int i = j + 1; i < wv.p; ++i, ++m) {
            deg[i] += wv.w[m];
            deg[j] += wv.w[m];
        }
    }
    return deg;
}

std::pair<std::vector<int>, std::vector<int>> factor1_block_indices(int i, int j,
                                                                    const ProductSpec& spec) {
    spec.validate();
    if (i < 1 || i > spec.p1 || j < 1 || j > spec.p1) {
        throw ValidationError("factor1_block_indices: node out of range");
    }
    std::vector<int> rows(spec.p2), cols(spec.p2);
    for (int k = 0; k < spec.p2; ++k) {
        rows[k] = (i - 1) * spec.p2 + k + 1;
        cols[k] = (j - 1) * spec.p2 + k + 1;
    }
    return {rows, cols};
}

std::pair<std::vector<int>, std::vector<int>> factor2_block_indices(int i, int j,
                                                                    const ProductSpec& spec) {
    spec.validate();
    if (i < 1 || i > spec.p2 || j < 1 || j > spec.p2) {
        throw ValidationError("factor2_block_indices: node out of range");
    }
    std::vector<int> rows(spec.p1), cols(spec.p1);
    for (int k = 0; k < spec.p1; ++k) {
        rows[k] = k * spec.p2 + i;
        cols[k] = k * spec.p2 + j;
    }
    return {rows, cols};
}

WeightVector compose_product(const WeightVector& w1, const WeightVector& w2,
                             ProductKind kind) {
    w1.validate();
    w2.validate();
    Eigen::MatrixXd w1_eff = adjacency_from_weights(w1).dense();
    Eigen::MatrixXd w2_eff = adjacency_from_weights(w2).dense();
    if (kind == ProductKind::Strong) {
        w1_eff.diagonal().array() += 1.0;
        w2_eff.diagonal().array() += 1.0;
    }
    const int p = w1.p * w2.p;
    Eigen::VectorXd out(num_pairs(p));
    detail::compose_product_weights(w1_eff, w2_eff, w1.p, w2.p, out.data());
    return WeightVector(p, std::move(out));
}

namespace detail {

void compose_product_weights(const Eigen::MatrixXd& w1_eff, const Eigen::MatrixXd& w2_eff,
                             int p1, int p2, double* out) {
    std::int64_t m = 0;
    for (int j1 = 0; j1 < p1; ++j1) {
        for (int j2 = 0; j2 < p2; ++j2) {
            const double* w2_col = w2_eff.data() + static_cast<std::ptrdiff_t>(j2) * p2;
            // remainder of the diagonal block i1 = j1 (rows below the product diagonal)
            const double s_diag = w1_eff(j1, j1);
            if (s_diag == 0.0) {
                for (int i2 = j2 + 1; i2 < p2; ++i2) out[m++] = 0.0;
            } else {
                for (int i2 = j2 + 1; i2 < p2; ++i2) out[m++] = s_diag * w2_col[i2];
            }
            for (int i1 = j1 + 1; i1 < p1; ++i1) {
                const double s = w1_eff(i1, j1);
                if (s == 0.0) {
                    for (int i2 = 0; i2 < p2; ++i2) out[m++] = 0.0;
                } else {
                    for (int i2 = 0; i2 < p2; ++i2) out[m++] = s * w2_col[i2];
                }
            }
        }
    }
}

void laplacian_plus_j(const double* w, int p, Eigen::MatrixXd& out) {
    out.resize(p, p);
    out.setZero();
    Eigen::VectorXd deg = Eigen::VectorXd::Zero(p);
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            const double v = w[m];
            out(i, j) = -v;
            out(j, i) = -v;
            deg[i] += v;
            deg[j] += v;
        }
    }
    out.diagonal() = deg;
    out.array() += 1.0 / p;
}

}  // namespace detail

}  // namespace kronlearn
