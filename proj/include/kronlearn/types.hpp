#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <cctype>
#include <stdexcept>
#include <string>

namespace kronlearn {

// Thrown on invalid arguments, malformed configs, and broken type invariants.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when an iterate (or input graph) yields a product Laplacian L with
// L + J singular, i.e. a disconnected product graph.
class DisconnectedProductError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when backtracking cannot find a feasible decrease step.
class LineSearchFailureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProductKind { Kronecker, Strong };

std::string to_string(ProductKind kind);
ProductKind product_kind_from_string(const std::string& s);

// Number of unordered node pairs of a p-node graph.
inline std::int64_t num_pairs(int p) {
    return static_cast<std::int64_t>(p) * (p - 1) / 2;
}

// Half-vectorized nonnegative edge weights of a p-node undirected graph.
// Entry m (1-based) holds the weight of the pair (i,j), i > j, with
// m = i - j + (j-1)(2p-j)/2, i.e. lower-triangle columns stacked in order.
struct WeightVector {
    int p = 0;
    Eigen::VectorXd w;

    WeightVector() = default;
    WeightVector(int p_, Eigen::VectorXd w_);

    static WeightVector zeros(int p);
    static WeightVector constant(int p, double value);

    std::int64_t size() const { return w.size(); }
    void validate() const;
};

// Dense symmetric matrix; symmetry is exact by construction (the lower
// triangle is mirrored, never averaged away later).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int p) : m_(Eigen::MatrixXd::Zero(p, p)) {}

    // Mirrors the lower triangle (including diagonal) of `m`.
    static SymMatrix from_lower(const Eigen::MatrixXd& m);
    // Requires max |m - m^T| <= tol, then mirrors the lower triangle.
    static SymMatrix from_dense(const Eigen::MatrixXd& m, double tol = 0.0);
    // Symmetrizes as (m + m^T)/2.
    static SymMatrix symmetrized(const Eigen::MatrixXd& m);

    int p() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXd& dense() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }

    // Sets both (i,j) and (j,i).
    void set(int i, int j, double value) {
        m_(i, j) = value;
        m_(j, i) = value;
    }

private:
    Eigen::MatrixXd m_;
};

// Factor sizes plus product kind. Product node (i1,i2), 1-based, maps to flat
// index (i1-1)*p2 + i2; every module and file format uses this convention.
struct ProductSpec {
    int p1 = 0;
    int p2 = 0;
    ProductKind kind = ProductKind::Kronecker;

    int p() const { return p1 * p2; }
    void validate() const;

    // 1-based product node index of factor nodes (i1, i2).
    int flat_index(int i1, int i2) const { return (i1 - 1) * p2 + i2; }
};

}  // namespace kronlearn
