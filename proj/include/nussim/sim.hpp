#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nussim/agents.hpp"
#include "nussim/control.hpp"
#include "nussim/graph.hpp"

namespace nussim::sim {

/// Raised when integration produces a non-finite value. Carries the time, a
/// description of the offending channel, and (when known) the packed state
/// index, so a run can be diagnosed post hoc.
class DivergenceError : public std::runtime_error {
public:
    static constexpr std::size_t kNoComponent = static_cast<std::size_t>(-1);

    DivergenceError(double t, std::string channel, const std::string& detail,
                    std::size_t component = kNoComponent)
        : std::runtime_error("divergence at t=" + std::to_string(t) + " in " + channel +
                             (detail.empty() ? "" : ": " + detail)),
          time(t),
          channel(std::move(channel)),
          component(component) {}

    double time;
    std::string channel;
    std::size_t component;
};

/// Per-instant convergence metrics.
struct Metrics {
    double disagreement = 0.0;    // y' L y over the follower digraph
    double spread = 0.0;          // max_{i,j} |y_i - y_j|
    double tracking_error = 0.0;  // ||y - y0*1|| (leader mode; 0 otherwise)
    double gain_sum = 0.0;        // sum_i k_i
    double gain_rate_sum = 0.0;   // sum_i y_i * xi_i
};

/// Time-indexed record of a run. Channels are parallel: every vector has one
/// entry per recorded instant.
struct Trajectory {
    std::size_t agent_count = 0;
    bool leader_mode = false;
    double leader_output = 0.0;

    std::vector<double> times;
    std::vector<std::vector<double>> states;   // packed (x_1..x_N, k_1..k_N)
    std::vector<std::vector<double>> outputs;  // y per agent
    std::vector<std::vector<double>> gains;    // k per agent
    std::vector<std::vector<double>> inputs;   // u per agent
    std::vector<Metrics> metrics;

    std::size_t size() const { return times.size(); }
};

/// N plants + N adaptive controllers + protocol, composed into one ODE over
/// the packed state (x_1, ..., x_N, k_1, ..., k_N). Immutable once built.
class ClosedLoopSystem {
public:
    ClosedLoopSystem(std::vector<agents::AgentModel> agent_models, control::Protocol protocol,
                     std::vector<control::ControllerState> controllers,
                     std::optional<agents::LeaderModel> leader);

    std::size_t agent_count() const { return agents_.size(); }
    std::size_t state_size() const { return gain_offset_ + agents_.size(); }
    std::size_t agent_state_offset(std::size_t i) const { return offsets_[i]; }
    std::size_t gain_index(std::size_t i) const { return gain_offset_ + i; }

    const std::vector<agents::AgentModel>& agent_models() const { return agents_; }
    const control::Protocol& protocol() const { return protocol_; }
    const std::optional<agents::LeaderModel>& leader() const { return leader_; }
    const linalg::Matrix& follower_laplacian() const { return laplacian_; }

    /// Initial packed state from the controllers' k values and per-agent
    /// initial plant states.
    std::vector<double> pack_state(const std::vector<std::vector<double>>& x0) const;

    /// Agent outputs extracted from a packed state.
    std::vector<double> outputs(std::span<const double> z) const;

    /// Closed-loop vector field: plant drifts under u_i = -N(k_i) xi_i plus
    /// gain dynamics dk_i = y_i xi_i. The leader state is a constant
    /// parameter and is not integrated.
    void rhs(double t, std::span<const double> z, std::span<double> dz) const;

    /// Controller inputs u_i at a packed state (for recording).
    std::vector<double> inputs(std::span<const double> z) const;

    Metrics metrics_at(std::span<const double> z) const;

private:
    std::vector<agents::AgentModel> agents_;
    control::Protocol protocol_;
    std::vector<control::ControllerState> controllers_;
    std::optional<agents::LeaderModel> leader_;
    std::vector<std::size_t> offsets_;
    std::size_t gain_offset_ = 0;
    linalg::Matrix laplacian_;
};

using RhsFn = std::function<void(double t, std::span<const double> z, std::span<double> dz)>;

/// One classical 4th-order Runge-Kutta step; throws DivergenceError if the
/// update is non-finite.
std::vector<double> rk4_step(const RhsFn& rhs, double t, std::span<const double> z, double h);

struct SimulateOptions {
    double h = 1e-3;
    double duration = 100.0;
    int record_every = 100;
};

/// Fixed-step integration from 0 to duration, recording every
/// record_every-th step plus the final state. Aborts with DivergenceError at
/// the first non-finite value, identifying the agent and channel.
Trajectory simulate(const ClosedLoopSystem& sys, std::span<const double> z0,
                    const SimulateOptions& opts);

struct MonotoneReport {
    bool ok = true;
    std::size_t first_violation = 0;  // recorded index, valid when !ok
};

/// Checks that gain_sum never decreases (beyond 1e-6*(1+|gain_sum|)) along a
/// leaderless run over an undirected graph, where sum_i dk_i = y'Ly >= 0.
/// Throws std::invalid_argument for directed graphs or leader-mode runs.
MonotoneReport verify_gain_sum_monotone(const Trajectory& traj, const graph::Digraph& g);

struct ConvergenceReport {
    bool consensus = false;             // spread < eps over the whole final window
    bool bounded = false;               // every |state| and |gain| below ceiling
    std::optional<bool> tracking;       // leader mode: ||y - y0|| < eps over final window
    double max_spread_in_window = 0.0;
    double max_tracking_in_window = 0.0;
    double max_abs_state = 0.0;
    double max_abs_gain = 0.0;
    double state_ceiling = 0.0;

    bool passed() const { return consensus && bounded && tracking.value_or(true); }
};

/// Evaluates the consensus / boundedness / tracking flags over the final
/// `window` seconds of a trajectory. The boundedness ceiling is 1e6 per
/// state component.
ConvergenceReport verify_convergence(const Trajectory& traj, double eps, double window);

}  // namespace nussim::sim
