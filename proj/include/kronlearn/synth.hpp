#pragma once

#include "kronlearn/rng.hpp"
#include "kronlearn/types.hpp"

#include <string>

namespace kronlearn {

// Random factor-graph families with the parameter conventions of the
// synthetic protocol: ER edge probability, BA preferential attachment,
// WS ring rewiring, and regular grids.
struct GraphModel {
    enum class Type { ErdosRenyi, BarabasiAlbert, WattsStrogatz, Grid };

    Type type = Type::ErdosRenyi;
    double prob = 0.3;        // ErdosRenyi: edge probability
    int m = 2;                // BarabasiAlbert: edges per new node
    int m0 = 2;               // BarabasiAlbert: initial nodes
    int degree = 2;           // WattsStrogatz: ring degree (even)
    double rewire_prob = 0.1; // WattsStrogatz: rewiring probability
    int rows = 0, cols = 0;   // Grid

    static GraphModel erdos_renyi(double prob);
    static GraphModel barabasi_albert(int m, int m0);
    static GraphModel watts_strogatz(int degree, double rewire_prob);
    static GraphModel grid(int rows, int cols);

    void validate(int p) const;

    // Compact text form used in configs and sidecars:
    // er(0.3) | ba(2,2) | ws(2,0.1) | grid(4,5)
    std::string to_string() const;
    static GraphModel parse(const std::string& text);
};

// n vectorized two-way signal samples, one sample per row.
struct Dataset {
    ProductSpec spec;
    int n = 0;
    Eigen::MatrixXd samples;  // n x (p1*p2)
    std::uint64_t seed = 0;

    void validate() const;
};

// Draws a connected weighted factor graph: the topology comes from `model`
// (resampled from `topology_rng` until connected, up to 1000 tries) and each
// present edge gets an independent Uniform(0.1, 2) weight from `weight_rng`.
WeightVector generate_factor(const GraphModel& model, int p, RandomStream& topology_rng,
                             RandomStream& weight_rng);

// B with B B^T = pinv(L), computed from the symmetric eigendecomposition with
// eigenvalues below 1e-10 * lambda_max treated as zero. Throws
// DisconnectedProductError when more than one eigenvalue is below the cutoff.
Eigen::MatrixXd pseudo_sqrt_cov(const SymMatrix& laplacian);

// n i.i.d. samples x = B z, z ~ N(0, I): a zero-mean Gaussian whose
// covariance is pinv(L). Each sample is orthogonal to the all-ones vector up
// to floating point. `seed_label` is recorded in the Dataset unchanged.
Dataset sample_igmrf(const SymMatrix& laplacian, const ProductSpec& spec, int n,
                     RandomStream& signal_rng, std::uint64_t seed_label);

// True iff the graph with positive-weight edges of wv is connected.
bool is_connected(const WeightVector& wv);

}  // namespace kronlearn
