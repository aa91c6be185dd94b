#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nussim/graph.hpp"

namespace nussim::control {

/// Nussbaum-type gain functions. expk2cos overflows double precision near
/// |k| = 26.6; evaluation refuses |k| > 26 instead of returning infinity.
enum class NussbaumKind { K2Sin, K2Cos, ExpK2Cos };

NussbaumKind nussbaum_kind_from_id(std::string_view id);  // "k2sin" | "k2cos" | "expk2cos"
std::string_view nussbaum_kind_id(NussbaumKind kind);

/// Thrown when expk2cos is evaluated outside its representable range.
class NussbaumRangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// N(k) for the selected variant; throws NussbaumRangeError for expk2cos
/// with |k| > 26 and std::invalid_argument for non-finite k.
double nussbaum_eval(NussbaumKind kind, double k);

/// F(k) = integral of s^2 sin(s) from 0 to k
///      = -k^2 cos(k) + 2 k sin(k) + 2 cos(k) - 2.
double nussbaum_antiderivative_k2sin(double k);

/// Per-agent adaptive state. k is integrated by the simulator with
/// dk/dt = y * xi.
struct ControllerState {
    double k = 0.0;
    NussbaumKind kind = NussbaumKind::K2Sin;
};

/// u = -N(k) * xi.
double control_input(const ControllerState& cs, double xi);

/// dk/dt = y * xi.
double gain_rate(double y, double xi);

enum class Mode { Leaderless, LeaderFollowing };

/// Communication structure of one experiment: a digraph among the agents,
/// optionally augmented with pinning edges from a constant-output leader.
class Protocol {
public:
    static Protocol leaderless(graph::Digraph g);
    static Protocol leader_following(graph::LeaderGraph lg);

    Mode mode() const { return mode_; }
    std::size_t agent_count() const { return followers().size(); }

    /// The digraph among the (non-leader) agents, in either mode.
    const graph::Digraph& followers() const;

    /// Leader pinning structure; throws in leaderless mode.
    const graph::LeaderGraph& leader_graph() const;

    /// Disagreement signal xi_i = sum_j a_ij (y_i - y_j) [+ a_i0 (y_i - y0)].
    /// y0 must be supplied exactly when the mode is LeaderFollowing.
    std::vector<double> consensus_error(std::span<const double> y,
                                        std::optional<double> y0) const;

private:
    Protocol(Mode mode, std::variant<graph::Digraph, graph::LeaderGraph> top);

    Mode mode_;
    std::variant<graph::Digraph, graph::LeaderGraph> topology_;
};

}  // namespace nussim::control
