#include "kronlearn/types.hpp"

namespace kronlearn {

std::string to_string(ProductKind kind) {
    return kind == ProductKind::Kronecker ? "kronecker" : "strong";
}

ProductKind product_kind_from_string(const std::string& s) {
    std::string t;
    t.reserve(s.size());
    for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "kronecker") return ProductKind::Kronecker;
    if (t == "strong") return ProductKind::Strong;
    throw ValidationError("unknown product kind '" + s + "' (expected kronecker or strong)");
}

WeightVector::WeightVector(int p_, Eigen::VectorXd w_) : p(p_), w(std::move(w_)) {
    validate();
}

WeightVector WeightVector::zeros(int p) {
    return WeightVector(p, Eigen::VectorXd::Zero(num_pairs(p)));
}

WeightVector WeightVector::constant(int p, double value) {
    return WeightVector(p, Eigen::VectorXd::Constant(num_pairs(p), value));
}

void WeightVector::validate() const {
    if (p < 2) throw ValidationError("WeightVector: node count must be >= 2, got " + std::to_string(p));
    if (w.size() != num_pairs(p)) {
        throw ValidationError("WeightVector: expected length " + std::to_string(num_pairs(p)) +
                              " for p=" + std::to_string(p) + ", got " + std::to_string(w.size()));
    }
    for (Eigen::Index m = 0; m < w.size(); ++m) {
        if (!(w[m] >= 0.0)) {
            throw ValidationError("WeightVector: entry " + std::to_string(m + 1) +
                                  " is negative or NaN: " + std::to_string(w[m]));
        }
    }
}

SymMatrix SymMatrix::from_lower(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ValidationError("SymMatrix: matrix must be square");
    SymMatrix out(static_cast<int>(m.rows()));
    out.m_ = m.selfadjointView<Eigen::Lower>();
    return out;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() != m.cols()) throw ValidationError("SymMatrix: matrix must be square");
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol) {
        throw ValidationError("SymMatrix: matrix is not symmetric (max asymmetry " +
                              std::to_string(asym) + ")");
    }
    return from_lower(m);
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ValidationError("SymMatrix: matrix must be square");
    return from_lower(0.5 * (m + m.transpose()));
}

void ProductSpec::validate() const {
    if (p1 < 2 || p2 < 2) {
        throw ValidationError("ProductSpec: factor sizes must be >= 2, got p1=" +
                              std::to_string(p1) + ", p2=" + std::to_string(p2));
    }
}

}  // namespace kronlearn
