#pragma once

#include "kronlearn/types.hpp"

#include <utility>
#include <vector>

namespace kronlearn {

// 1-based index of the pair (i,j), i > j, in the half-vectorized weight
// layout: m = i - j + (j-1)(2p-j)/2. Bijective over {(i,j) : 1 <= j < i <= p}
// onto [1, p(p-1)/2]. Throws ValidationError when i <= j or out of range.
std::int64_t pair_index(int i, int j, int p);

// Inverse of pair_index: the (i,j) pair, i > j, housed at 1-based index m.
std::pair<int, int> pair_nodes(std::int64_t m, int p);

// W = A w: symmetric, zero diagonal, [W]_{ij} = +w_m for i != j.
SymMatrix adjacency_from_weights(const WeightVector& wv);

// L = D - W: rows sum to zero, off-diagonal -w_m, PSD.
SymMatrix laplacian_from_weights(const WeightVector& wv);

// [A* Q]_m = (Q_ij + Q_ji)/2 for the pair (i,j) of m. Q need not be symmetric.
Eigen::VectorXd adj_adjoint(const Eigen::MatrixXd& q);

// [L* Q]_m = Q_ii - Q_ij - Q_ji + Q_jj for the pair (i,j) of m.
Eigen::VectorXd lap_adjoint(const Eigen::MatrixXd& q);

// Node degrees d_i = sum_j [A w]_{ij}.
Eigen::VectorXd degrees(const WeightVector& wv);

// Row/column index sets (1-based, into the product graph) selecting the
// p2 x p2 block associated with the factor-1 pair (i,j):
// I1 = {(i-1)p2+1, ..., i*p2}, J1 = {(j-1)p2+1, ..., j*p2}.
std::pair<std::vector<int>, std::vector<int>> factor1_block_indices(int i, int j,
                                                                    const ProductSpec& spec);

// Index sets selecting the p1 x p1 block associated with the factor-2 pair
// (i,j): I2 = {i, p2+i, ..., (p1-1)p2+i}, J2 = {j, p2+j, ..., (p1-1)p2+j}.
std::pair<std::vector<int>, std::vector<int>> factor2_block_indices(int i, int j,
                                                                    const ProductSpec& spec);

// Half-vectorized weights of the product graph on p1*p2 nodes.
// Kronecker: weight between (i1,i2) and (j1,j2) is w1(i1,j1)*w2(i2,j2).
// Strong: additionally w1(i1,j1) when i2=j2 and w2(i2,j2) when i1=j1.
WeightVector compose_product(const WeightVector& w1, const WeightVector& w2,
                             ProductKind kind);

namespace detail {

// compose_product into a caller-provided buffer of length p1*p2*(p1*p2-1)/2,
// taking the effective factor adjacencies (W, or W + I for the strong kind)
// as dense column-major matrices. Used by the solver's inner loop.
void compose_product_weights(const Eigen::MatrixXd& w1_eff, const Eigen::MatrixXd& w2_eff,
                             int p1, int p2, double* out);

// Dense L + (1/p) 11^T from half-vectorized product weights.
void laplacian_plus_j(const double* w, int p, Eigen::MatrixXd& out);

}  // namespace detail

}  // namespace kronlearn
