#pragma once

// Shared helpers for the unit and acceptance suites: independent oracles
// (brute-force reachability, adaptive quadrature) and deterministic random
// graph/sample generators. Everything here is deliberately written from
// first principles, separate from the library's own algorithms.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "nussim/graph.hpp"

namespace testsupport {

// ---------------------------------------------------------------------------
// Brute-force reachability oracle (Floyd-Warshall transitive closure).
// adj[j][i] = true means an edge j -> i.
// ---------------------------------------------------------------------------

using BoolAdj = std::vector<std::vector<bool>>;

inline BoolAdj transitive_closure(BoolAdj r) {
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) r[i][i] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

inline BoolAdj adjacency_of(const nussim::graph::Digraph& g) {
    const std::size_t n = g.size();
    BoolAdj adj(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (g.weight(i, j) > 0.0) adj[j][i] = true;  // edge j -> i
    return adj;
}

inline bool brute_strongly_connected(const nussim::graph::Digraph& g) {
    const auto closure = transitive_closure(adjacency_of(g));
    for (const auto& row : closure)
        for (bool b : row)
            if (!b) return false;
    return true;
}

inline bool brute_weakly_connected(const nussim::graph::Digraph& g) {
    auto adj = adjacency_of(g);
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (adj[i][j]) adj[j][i] = true;
    const auto closure = transitive_closure(adj);
    for (const auto& row : closure)
        for (bool b : row)
            if (!b) return false;
    return true;
}

inline bool brute_leader_reachable(const nussim::graph::LeaderGraph& lg) {
    const std::size_t n = lg.followers.size();
    BoolAdj adj(n + 1, std::vector<bool>(n + 1, false));
    for (std::size_t i = 0; i < n; ++i)
        if (lg.leader_weights[i] > 0.0) adj[0][i + 1] = true;  // 0 -> i
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (lg.followers.weight(i, j) > 0.0) adj[j + 1][i + 1] = true;
    const auto closure = transitive_closure(adj);
    for (std::size_t i = 1; i <= n; ++i)
        if (!closure[0][i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Adaptive Simpson quadrature (independent of any closed form).
// ---------------------------------------------------------------------------

namespace detail {
inline double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double fa,
                                   double b, double fb, double m, double fm, double whole,
                                   double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-11) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = detail::simpson(a, fa, b, fb, fm);
    return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

// ---------------------------------------------------------------------------
// Deterministic random generators.
// ---------------------------------------------------------------------------

/// Random {0,1}-weight digraph on n nodes.
inline nussim::graph::Digraph random_digraph(std::mt19937& rng, std::size_t n, double edge_p) {
    std::bernoulli_distribution edge(edge_p);
    nussim::graph::Digraph g(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && edge(rng)) g.add_edge(j, i, 1.0);
    return g;
}

/// Random connected undirected unit-weight graph: random spanning tree plus
/// random extra edges.
inline nussim::graph::Digraph random_connected_undirected(std::mt19937& rng, std::size_t n,
                                                          double extra_p = 0.3) {
    nussim::graph::Digraph g(n);
    std::bernoulli_distribution extra(extra_p);
    for (std::size_t v = 1; v < n; ++v) {
        std::uniform_int_distribution<std::size_t> parent(0, v - 1);
        g.add_undirected_edge(parent(rng), v, 1.0);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (g.weight(i, j) == 0.0 && extra(rng)) g.add_undirected_edge(i, j, 1.0);
    return g;
}

/// Digraph on n nodes decoded from the bits of `code`, enumerating every
/// off-diagonal {0,1} adjacency pattern.
inline nussim::graph::Digraph digraph_from_code(std::size_t n, std::uint64_t code) {
    nussim::graph::Digraph g(n);
    std::size_t bit = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (code >> bit & 1u) g.add_edge(j, i, 1.0);
            ++bit;
        }
    return g;
}

}  // namespace testsupport
