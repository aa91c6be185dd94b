#include "nussim/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace nussim::graph {

namespace {

constexpr double kBalanceTol = 1e-12;
constexpr double kEigenTol = 1e-10;

void check_node(const Digraph& g, std::size_t v, const char* what) {
    if (v >= g.size()) throw std::out_of_range(std::string(what) + ": node index out of range");
}

/// Nodes reachable from `start`. Successors of j are {i : a_ij > 0} when
/// forward, predecessors {j : a_ij > 0} when !forward.
std::vector<bool> reach_sweep(const Digraph& g, std::size_t start, bool forward) {
    const std::size_t n = g.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < n; ++w) {
            const double a = forward ? g.weight(w, v) : g.weight(v, w);
            if (a > 0.0 && !seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return seen;
}

bool all(const std::vector<bool>& v) {
    for (bool b : v)
        if (!b) return false;
    return true;
}

}  // namespace

Digraph Digraph::from_weights(const linalg::Matrix& weights) {
    if (weights.rows() != weights.cols())
        throw std::invalid_argument("Digraph: weight matrix must be square");
    const std::size_t n = weights.rows();
    for (std::size_t i = 0; i < n; ++i) {
        if (weights(i, i) != 0.0)
            throw std::invalid_argument("Digraph: diagonal weights must be zero");
        for (std::size_t j = 0; j < n; ++j)
            if (weights(i, j) < 0.0 || !std::isfinite(weights(i, j)))
                throw std::invalid_argument("Digraph: weights must be finite and nonnegative");
    }
    Digraph g(n);
    g.weights_ = weights;
    return g;
}

void Digraph::add_edge(std::size_t from, std::size_t to, double w) {
    check_node(*this, from, "add_edge");
    check_node(*this, to, "add_edge");
    if (from == to) throw std::invalid_argument("add_edge: self-loops are not allowed");
    if (w < 0.0 || !std::isfinite(w))
        throw std::invalid_argument("add_edge: weight must be finite and nonnegative");
    weights_(to, from) = w;
}

void Digraph::add_undirected_edge(std::size_t a, std::size_t b, double w) {
    add_edge(a, b, w);
    add_edge(b, a, w);
}

double Digraph::in_degree(std::size_t i) const {
    check_node(*this, i, "in_degree");
    double d = 0.0;
    for (std::size_t j = 0; j < n_; ++j) d += weights_(i, j);
    return d;
}

double Digraph::out_degree(std::size_t i) const {
    check_node(*this, i, "out_degree");
    double d = 0.0;
    for (std::size_t j = 0; j < n_; ++j) d += weights_(j, i);
    return d;
}

LeaderGraph::LeaderGraph(Digraph f, std::vector<double> lw)
    : followers(std::move(f)), leader_weights(std::move(lw)) {
    if (leader_weights.size() != followers.size())
        throw std::invalid_argument("LeaderGraph: pinning vector length must match follower count");
    for (double w : leader_weights)
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("LeaderGraph: pinning weights must be finite and nonnegative");
}

linalg::Matrix laplacian(const Digraph& g) {
    const std::size_t n = g.size();
    linalg::Matrix l(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            l(i, j) = -g.weight(i, j);
            deg += g.weight(i, j);
        }
        l(i, i) = deg;
    }
    return l;
}

bool is_balanced(const Digraph& g) {
    for (std::size_t i = 0; i < g.size(); ++i)
        if (std::abs(g.in_degree(i) - g.out_degree(i)) > kBalanceTol) return false;
    return true;
}

bool is_undirected(const Digraph& g) {
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            if (g.weight(i, j) != g.weight(j, i)) return false;
    return true;
}

bool is_strongly_connected(const Digraph& g) {
    if (g.size() <= 1) return true;
    // Strong connectivity <=> node 0 reaches everyone and everyone reaches node 0.
    return all(reach_sweep(g, 0, true)) && all(reach_sweep(g, 0, false));
}

bool is_weakly_connected(const Digraph& g) {
    const std::size_t n = g.size();
    if (n <= 1) return true;
    Digraph sym(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (g.weight(i, j) + g.weight(j, i) > 0.0) sym.add_undirected_edge(i, j, 1.0);
    return all(reach_sweep(sym, 0, true));
}

linalg::Matrix mirror_laplacian(const Digraph& g) {
    if (!is_balanced(g))
        throw std::invalid_argument("mirror_laplacian: digraph is not weight-balanced");
    const linalg::Matrix l = laplacian(g);
    return l + l.transposed();
}

linalg::Matrix leader_h_matrix(const LeaderGraph& lg) {
    linalg::Matrix h = laplacian(lg.followers);
    for (std::size_t i = 0; i < lg.leader_weights.size(); ++i) h(i, i) += lg.leader_weights[i];
    return h;
}

bool leader_globally_reachable(const LeaderGraph& lg) {
    const std::size_t n = lg.followers.size();
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (lg.leader_weights[i] > 0.0) {
            seen[i] = true;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const std::size_t v = stack.back();
        stack.pop_back();
        for (std::size_t w = 0; w < n; ++w) {
            if (lg.followers.weight(w, v) > 0.0 && !seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
        }
    }
    return all(seen);
}

bool symmetric_part_positive_definite(const linalg::Matrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("symmetric_part_positive_definite: matrix not square");
    if (m.rows() == 0) return true;
    const auto eig = linalg::symmetric_eigenvalues(m);
    return eig.front() > kEigenTol;
}

}  // namespace nussim::graph
