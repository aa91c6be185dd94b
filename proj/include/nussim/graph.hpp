#pragma once

#include <cstddef>
#include <vector>

#include "nussim/matrix.hpp"

namespace nussim::graph {

/// Weighted communication digraph over nodes 0..n-1.
///
/// Weight convention: weight(i, j) = a_ij >= 0, and a_ij > 0 iff there is an
/// edge j -> i, i.e. information flows from j to i (agent i can read y_j).
/// Immutable once built through a builder/scenario path; mutation is limited
/// to the add_edge helpers used during construction.
class Digraph {
public:
    explicit Digraph(std::size_t n) : n_(n), weights_(n, n, 0.0) {}

    /// Build from an explicit weight matrix; validates a_ii = 0 and a_ij >= 0.
    static Digraph from_weights(const linalg::Matrix& weights);

    std::size_t size() const { return n_; }

    double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
    const linalg::Matrix& weights() const { return weights_; }

    /// Add edge from -> to with the given weight (sets a_{to,from}).
    void add_edge(std::size_t from, std::size_t to, double w);

    /// Add both directions with equal weight.
    void add_undirected_edge(std::size_t a, std::size_t b, double w);

    double in_degree(std::size_t i) const;
    double out_degree(std::size_t i) const;

private:
    std::size_t n_;
    linalg::Matrix weights_;
};

/// Followers plus pinning weights to a constant-output leader (node 0).
/// leader_weights[i] = a_{i0} > 0 iff follower i reads the leader's output.
struct LeaderGraph {
    Digraph followers;
    std::vector<double> leader_weights;

    LeaderGraph(Digraph f, std::vector<double> lw);
};

/// Degree-minus-adjacency Laplacian: l_ii = sum_j a_ij, l_ij = -a_ij.
/// Rows sum to zero by construction.
linalg::Matrix laplacian(const Digraph& g);

/// True iff every node's weighted in-degree equals its out-degree
/// (equivalently 1'L = 0), within 1e-12 on the weight sums.
bool is_balanced(const Digraph& g);

/// True iff a_ij == a_ji for all pairs.
bool is_undirected(const Digraph& g);

/// True iff every node reaches every other node by a directed path.
bool is_strongly_connected(const Digraph& g);

/// True iff the underlying undirected graph (edge where a_ij + a_ji > 0)
/// is connected.
bool is_weakly_connected(const Digraph& g);

/// L + L' of a balanced digraph (a valid Laplacian of its mirror graph).
/// Throws std::invalid_argument for unbalanced graphs.
linalg::Matrix mirror_laplacian(const Digraph& g);

/// H = L(followers) + diag(a_10, ..., a_N0).
linalg::Matrix leader_h_matrix(const LeaderGraph& lg);

/// True iff in the augmented digraph on {0, 1..N} (edge 0->i iff a_i0 > 0)
/// every follower is reachable by a directed path starting at the leader.
bool leader_globally_reachable(const LeaderGraph& lg);

/// True iff all eigenvalues of (m + m')/2 exceed 1e-10.
bool symmetric_part_positive_definite(const linalg::Matrix& m);

}  // namespace nussim::graph
