#include "kronlearn/synth.hpp"

#include "kronlearn/graphrep.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <vector>

namespace kronlearn {

namespace {

constexpr int kConnectivityRetries = 1000;
constexpr double kWeightLow = 0.1;
constexpr double kWeightHigh = 2.0;

// Dense undirected topology on p nodes.
struct Topology {
    int p;
    std::vector<char> adj;  // p*p, symmetric, zero diagonal
    explicit Topology(int p_) : p(p_), adj(static_cast<std::size_t>(p_) * p_, 0) {}
    bool has(int i, int j) const { return adj[static_cast<std::size_t>(i) * p + j] != 0; }
    void add(int i, int j) {
        adj[static_cast<std::size_t>(i) * p + j] = 1;
        adj[static_cast<std::size_t>(j) * p + i] = 1;
    }
    void remove(int i, int j) {
        adj[static_cast<std::size_t>(i) * p + j] = 0;
        adj[static_cast<std::size_t>(j) * p + i] = 0;
    }
    int degree(int i) const {
        int d = 0;
        for (int j = 0; j < p; ++j) d += has(i, j);
        return d;
    }
};

bool topology_connected(const Topology& t) {
    std::vector<char> seen(t.p, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < t.p; ++u) {
            if (t.has(v, u) && !seen[u]) {
                seen[u] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == t.p;
}

Topology draw_erdos_renyi(double prob, int p, RandomStream& rng) {
    Topology t(p);
    // pair order matters for reproducibility: m-ascending, like the weight pass
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i) {
            if (rng.bernoulli(prob)) t.add(i, j);
        }
    }
    return t;
}

// Preferential attachment. The m0 initial nodes form a path (a single edge
// for m0 = 2); each subsequent node attaches to m distinct existing nodes
// drawn with probability proportional to max(degree, 1).
Topology draw_barabasi_albert(int m, int m0, int p, RandomStream& rng) {
    Topology t(p);
    for (int v = 1; v < m0; ++v) t.add(v, v - 1);
    std::vector<double> weight(p, 0.0);
    for (int v = m0; v < p; ++v) {
        double total = 0.0;
        for (int u = 0; u < v; ++u) {
            weight[u] = std::max(t.degree(u), 1);
            total += weight[u];
        }
        int attached = 0;
        while (attached < m) {
            double r = rng.uniform01() * total;
            int pick = v - 1;
            for (int u = 0; u < v; ++u) {
                r -= weight[u];
                if (r < 0.0) {
                    pick = u;
                    break;
                }
            }
            if (!t.has(v, pick)) {
                t.add(v, pick);
                ++attached;
            }
        }
    }
    return t;
}

// Ring lattice with `degree`/2 neighbours on each side, then each lattice
// edge (v, v+d) is rewired with probability `beta` to a uniformly random
// non-duplicate, non-self target, keeping the v endpoint.
Topology draw_watts_strogatz(int degree, double beta, int p, RandomStream& rng) {
    Topology t(p);
    const int half = degree / 2;
    for (int d = 1; d <= half; ++d) {
        for (int v = 0; v < p; ++v) t.add(v, (v + d) % p);
    }
    for (int d = 1; d <= half; ++d) {
        for (int v = 0; v < p; ++v) {
            const int u = (v + d) % p;
            if (!t.has(v, u)) continue;  // already rewired away
            if (!rng.bernoulli(beta)) continue;
            if (t.degree(v) >= p - 1) continue;  // no free target
            int target;
            do {
                target = rng.uniform_int(p);
            } while (target == v || t.has(v, target));
            t.remove(v, u);
            t.add(v, target);
        }
    }
    return t;
}

Topology build_grid(int rows, int cols) {
    Topology t(rows * cols);
    auto idx = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols) t.add(idx(r, c), idx(r, c + 1));
            if (r + 1 < rows) t.add(idx(r, c), idx(r + 1, c));
        }
    }
    return t;
}

Topology draw_topology(const GraphModel& model, int p, RandomStream& rng) {
    switch (model.type) {
        case GraphModel::Type::ErdosRenyi:
            return draw_erdos_renyi(model.prob, p, rng);
        case GraphModel::Type::BarabasiAlbert:
            return draw_barabasi_albert(model.m, model.m0, p, rng);
        case GraphModel::Type::WattsStrogatz:
            return draw_watts_strogatz(model.degree, model.rewire_prob, p, rng);
        case GraphModel::Type::Grid:
            return build_grid(model.rows, model.cols);
    }
    throw ValidationError("unknown graph model type");
}

}  // namespace

GraphModel GraphModel::erdos_renyi(double prob) {
    GraphModel g;
    g.type = Type::ErdosRenyi;
    g.prob = prob;
    return g;
}

GraphModel GraphModel::barabasi_albert(int m, int m0) {
    GraphModel g;
    g.type = Type::BarabasiAlbert;
    g.m = m;
    g.m0 = m0;
    return g;
}

GraphModel GraphModel::watts_strogatz(int degree, double rewire_prob) {
    GraphModel g;
    g.type = Type::WattsStrogatz;
    g.degree = degree;
    g.rewire_prob = rewire_prob;
    return g;
}

GraphModel GraphModel::grid(int rows, int cols) {
    GraphModel g;
    g.type = Type::Grid;
    g.rows = rows;
    g.cols = cols;
    return g;
}

void GraphModel::validate(int p) const {
    if (p < 2) throw ValidationError("graph model: p must be >= 2");
    switch (type) {
        case Type::ErdosRenyi:
            if (!(prob > 0.0 && prob <= 1.0)) {
                throw ValidationError("erdos_renyi: prob must be in (0, 1]");
            }
            break;
        case Type::BarabasiAlbert:
            if (m < 1 || m > m0) throw ValidationError("barabasi_albert: need 1 <= m <= m0");
            if (m0 >= p) throw ValidationError("barabasi_albert: need m0 < p");
            break;
        case Type::WattsStrogatz:
            if (degree < 2 || degree % 2 != 0) {
                throw ValidationError("watts_strogatz: degree must be even and >= 2");
            }
            if (degree > p - 1) throw ValidationError("watts_strogatz: degree must be < p");
            if (rewire_prob < 0.0 || rewire_prob > 1.0) {
                throw ValidationError("watts_strogatz: rewire_prob must be in [0, 1]");
            }
            break;
        case Type::Grid:
            if (rows < 1 || cols < 1 || rows * cols != p) {
                throw ValidationError("grid: rows*cols must equal p");
            }
            break;
    }
}

std::string GraphModel::to_string() const {
    char buf[64];
    switch (type) {
        case Type::ErdosRenyi:
            std::snprintf(buf, sizeof(buf), "er(%g)", prob);
            break;
        case Type::BarabasiAlbert:
            std::snprintf(buf, sizeof(buf), "ba(%d,%d)", m, m0);
            break;
        case Type::WattsStrogatz:
            std::snprintf(buf, sizeof(buf), "ws(%d,%g)", degree, rewire_prob);
            break;
        case Type::Grid:
            std::snprintf(buf, sizeof(buf), "grid(%d,%d)", rows, cols);
            break;
    }
    return buf;
}

GraphModel GraphModel::parse(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    double a = 0.0, b = 0.0;
    if (std::sscanf(s.c_str(), "er(%lf)", &a) == 1) return erdos_renyi(a);
    if (std::sscanf(s.c_str(), "ba(%lf,%lf)", &a, &b) == 2) {
        return barabasi_albert(static_cast<int>(a), static_cast<int>(b));
    }
    if (std::sscanf(s.c_str(), "ws(%lf,%lf)", &a, &b) == 2) {
        return watts_strogatz(static_cast<int>(a), b);
    }
    if (std::sscanf(s.c_str(), "grid(%lf,%lf)", &a, &b) == 2) {
        return grid(static_cast<int>(a), static_cast<int>(b));
    }
    throw ValidationError("cannot parse graph model '" + text +
                          "' (expected er(p) | ba(m,m0) | ws(deg,beta) | grid(r,c))");
}

void Dataset::validate() const {
    spec.validate();
    if (n < 0) throw ValidationError("Dataset: n must be >= 0");
    if (samples.rows() != n || samples.cols() != spec.p()) {
        throw ValidationError("Dataset: sample matrix must be n x p1*p2");
    }
}

WeightVector generate_factor(const GraphModel& model, int p, RandomStream& topology_rng,
                             RandomStream& weight_rng) {
    model.validate(p);
    Topology topo(p);
    bool ok = false;
    for (int attempt = 0; attempt < kConnectivityRetries; ++attempt) {
        topo = draw_topology(model, p, topology_rng);
        if (topology_connected(topo)) {
            ok = true;
            break;
        }
    }
    if (!ok) {
        throw ValidationError("generate_factor: no connected draw in " +
                              std::to_string(kConnectivityRetries) +
                              " attempts; model parameters look degenerate (" +
                              model.to_string() + ", p=" + std::to_string(p) + ")");
    }
    WeightVector wv = WeightVector::zeros(p);
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            if (topo.has(i, j)) wv.w[m] = weight_rng.uniform(kWeightLow, kWeightHigh);
        }
    }
    return wv;
}

bool is_connected(const WeightVector& wv) {
    const int p = wv.p;
    std::vector<std::vector<int>> adj(p);
    std::int64_t m = 0;
    for (int j = 0; j < p; ++j) {
        for (int i = j + 1; i < p; ++i, ++m) {
            if (wv.w[m] > 0.0) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    std::vector<char> seen(p, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int u : adj[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++visited;
                stack.push_back(u);
            }
        }
    }
    return visited == p;
}

Eigen::MatrixXd pseudo_sqrt_cov(const SymMatrix& laplacian) {
    const int p = laplacian.p();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian.dense());
    if (eig.info() != Eigen::Success) {
        throw ValidationError("pseudo_sqrt_cov: eigendecomposition failed");
    }
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const double lam_max = lam[p - 1];
    const double tol = 1e-10 * std::max(lam_max, 0.0);
    int null_count = 0;
    for (int k = 0; k < p; ++k) {
        if (lam[k] <= tol) ++null_count;
    }
    if (null_count != 1) {
        throw DisconnectedProductError("pseudo_sqrt_cov: " + std::to_string(null_count) +
                                       " eigenvalues below cutoff; the graph is not a "
                                       "connected single-component Laplacian");
    }
    Eigen::VectorXd inv_sqrt(p);
    for (int k = 0; k < p; ++k) {
        inv_sqrt[k] = lam[k] <= tol ? 0.0 : 1.0 / std::sqrt(lam[k]);
    }
    // symmetric square root of pinv(L)
    return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

Dataset sample_igmrf(const SymMatrix& laplacian, const ProductSpec& spec, int n,
                     RandomStream& signal_rng, std::uint64_t seed_label) {
    spec.validate();
    if (laplacian.p() != spec.p()) {
        throw ValidationError("sample_igmrf: Laplacian size does not match ProductSpec");
    }
    if (n < 0) throw ValidationError("sample_igmrf: n must be >= 0");
    Dataset ds;
    ds.spec = spec;
    ds.n = n;
    ds.seed = seed_label;
    const int p = spec.p();
    if (n == 0) {
        ds.samples.resize(0, p);
        return ds;
    }
    const Eigen::MatrixXd b = pseudo_sqrt_cov(laplacian);
    Eigen::MatrixXd z(n, p);
    for (int k = 0; k < n; ++k) {
        for (int c = 0; c < p; ++c) z(k, c) = signal_rng.normal();
    }
    ds.samples.noalias() = z * b;  // row k is (B z_k)^T, B symmetric
    return ds;
}

}  // namespace kronlearn
