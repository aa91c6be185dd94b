#include "nussim/sim.hpp"

#include <algorithm>
#include <cmath>

namespace nussim::sim {

namespace {

constexpr double kStateCeiling = 1e6;
constexpr double kMonotoneTolScale = 1e-6;

double spread_of(std::span<const double> y) {
    if (y.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return *hi - *lo;
}

}  // namespace

ClosedLoopSystem::ClosedLoopSystem(std::vector<agents::AgentModel> agent_models,
                                   control::Protocol protocol,
                                   std::vector<control::ControllerState> controllers,
                                   std::optional<agents::LeaderModel> leader)
    : agents_(std::move(agent_models)),
      protocol_(std::move(protocol)),
      controllers_(std::move(controllers)),
      leader_(std::move(leader)),
      laplacian_(graph::laplacian(protocol_.followers())) {
    const std::size_t n = agents_.size();
    if (protocol_.agent_count() != n)
        throw std::invalid_argument("ClosedLoopSystem: agent count does not match graph size");
    if (controllers_.size() != n)
        throw std::invalid_argument("ClosedLoopSystem: one controller per agent required");
    const bool leader_mode = protocol_.mode() == control::Mode::LeaderFollowing;
    if (leader_mode != leader_.has_value())
        throw std::invalid_argument("ClosedLoopSystem: leader present iff protocol is leader-following");

    offsets_.resize(n);
    std::size_t off = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (agents_[i].state_dim == 0)
            throw std::invalid_argument("ClosedLoopSystem: agent state dimension must be positive");
        offsets_[i] = off;
        off += agents_[i].state_dim;
    }
    gain_offset_ = off;
}

std::vector<double> ClosedLoopSystem::pack_state(const std::vector<std::vector<double>>& x0) const {
    if (x0.size() != agents_.size())
        throw std::invalid_argument("pack_state: one initial state per agent required");
    std::vector<double> z(state_size(), 0.0);
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        if (x0[i].size() != agents_[i].state_dim)
            throw std::invalid_argument("pack_state: initial state dimension mismatch for agent " +
                                        std::to_string(i + 1));
        std::copy(x0[i].begin(), x0[i].end(), z.begin() + static_cast<std::ptrdiff_t>(offsets_[i]));
        z[gain_index(i)] = controllers_[i].k;
    }
    return z;
}

std::vector<double> ClosedLoopSystem::outputs(std::span<const double> z) const {
    std::vector<double> y(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i)
        y[i] = agents_[i].output(z.subspan(offsets_[i], agents_[i].state_dim));
    return y;
}

void ClosedLoopSystem::rhs(double t, std::span<const double> z, std::span<double> dz) const {
    (void)t;  // the closed loop is autonomous
    if (z.size() != state_size() || dz.size() != state_size())
        throw std::invalid_argument("rhs: packed state size mismatch");
    for (double v : z)
        if (!std::isfinite(v)) throw std::invalid_argument("rhs: non-finite state input");

    const std::vector<double> y = outputs(z);
    const std::optional<double> y0 =
        leader_ ? std::optional<double>(leader_->output()) : std::nullopt;
    const std::vector<double> xi = protocol_.consensus_error(y, y0);

    for (std::size_t i = 0; i < agents_.size(); ++i) {
        control::ControllerState cs = controllers_[i];
        cs.k = z[gain_index(i)];
        const double u = control::control_input(cs, xi[i]);
        agents_[i].drift(z.subspan(offsets_[i], agents_[i].state_dim), u,
                         dz.subspan(offsets_[i], agents_[i].state_dim));
        dz[gain_index(i)] = control::gain_rate(y[i], xi[i]);
    }
}

std::vector<double> ClosedLoopSystem::inputs(std::span<const double> z) const {
    const std::vector<double> y = outputs(z);
    const std::optional<double> y0 =
        leader_ ? std::optional<double>(leader_->output()) : std::nullopt;
    const std::vector<double> xi = protocol_.consensus_error(y, y0);
    std::vector<double> u(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        control::ControllerState cs = controllers_[i];
        cs.k = z[gain_index(i)];
        u[i] = control::control_input(cs, xi[i]);
    }
    return u;
}

Metrics ClosedLoopSystem::metrics_at(std::span<const double> z) const {
    const std::vector<double> y = outputs(z);
    const std::optional<double> y0 =
        leader_ ? std::optional<double>(leader_->output()) : std::nullopt;
    const std::vector<double> xi = protocol_.consensus_error(y, y0);

    Metrics m;
    m.disagreement = laplacian_.quadratic_form(y);
    m.spread = spread_of(y);
    if (leader_) {
        double s = 0.0;
        for (double yi : y) s += (yi - *y0) * (yi - *y0);
        m.tracking_error = std::sqrt(s);
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        m.gain_sum += z[gain_index(i)];
        m.gain_rate_sum += control::gain_rate(y[i], xi[i]);
    }
    return m;
}

std::vector<double> rk4_step(const RhsFn& rhs, double t, std::span<const double> z, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("rk4_step: step size must be positive");
    const std::size_t n = z.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), out(n);

    const auto check_stage = [&](const std::vector<double>& v, const char* stage) {
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(v[i]))
                throw DivergenceError(t, "state[" + std::to_string(i) + "]",
                                      std::string("non-finite RK4 ") + stage, i);
    };

    rhs(t, z, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k1[i];
    check_stage(tmp, "stage");
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + 0.5 * h * k2[i];
    check_stage(tmp, "stage");
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = z[i] + h * k3[i];
    check_stage(tmp, "stage");
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = z[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    check_stage(out, "update");
    return out;
}

namespace {

/// Map a packed index to a human-readable channel name.
std::string channel_name(const ClosedLoopSystem& sys, std::size_t idx) {
    for (std::size_t i = 0; i < sys.agent_count(); ++i) {
        const std::size_t off = sys.agent_state_offset(i);
        const std::size_t dim = sys.agent_models()[i].state_dim;
        if (idx >= off && idx < off + dim)
            return "agent " + std::to_string(i + 1) + " state x" + std::to_string(idx - off + 1);
    }
    return "agent " + std::to_string(idx - sys.gain_index(0) + 1) + " gain k";
}

void record_instant(const ClosedLoopSystem& sys, double t, const std::vector<double>& z,
                    Trajectory& traj) {
    traj.times.push_back(t);
    traj.states.push_back(z);
    traj.outputs.push_back(sys.outputs(z));
    traj.inputs.push_back(sys.inputs(z));
    std::vector<double> k(sys.agent_count());
    for (std::size_t i = 0; i < sys.agent_count(); ++i) k[i] = z[sys.gain_index(i)];
    traj.gains.push_back(std::move(k));
    traj.metrics.push_back(sys.metrics_at(z));
}

}  // namespace

Trajectory simulate(const ClosedLoopSystem& sys, std::span<const double> z0,
                    const SimulateOptions& opts) {
    if (!(opts.h > 0.0)) throw std::invalid_argument("simulate: step size must be positive");
    if (!(opts.duration >= opts.h))
        throw std::invalid_argument("simulate: duration must be at least one step");
    if (opts.record_every < 1)
        throw std::invalid_argument("simulate: record_every must be a positive integer");
    if (z0.size() != sys.state_size())
        throw std::invalid_argument("simulate: initial state size mismatch");

    Trajectory traj;
    traj.agent_count = sys.agent_count();
    traj.leader_mode = sys.leader().has_value();
    traj.leader_output = sys.leader() ? sys.leader()->output() : 0.0;

    // Whole steps of size h, plus one shorter step when duration is not an
    // exact multiple.
    const auto full_steps = static_cast<std::size_t>(opts.duration / opts.h + 1e-9);
    const double remainder = opts.duration - static_cast<double>(full_steps) * opts.h;
    const bool has_tail = remainder > 1e-9 * opts.duration;

    std::vector<double> z(z0.begin(), z0.end());
    const RhsFn rhs = [&sys](double t, std::span<const double> s, std::span<double> ds) {
        sys.rhs(t, s, ds);
    };

    double t = 0.0;
    try {
        record_instant(sys, 0.0, z, traj);
    } catch (const control::NussbaumRangeError& e) {
        throw DivergenceError(0.0, "controller", std::string(e.what()) +
                                                     " (initial gain outside the evaluable range)");
    }

    for (std::size_t step = 1; step <= full_steps + (has_tail ? 1u : 0u); ++step) {
        const double h = (step <= full_steps) ? opts.h : remainder;
        std::vector<double> next;
        try {
            next = rk4_step(rhs, t, z, h);
        } catch (const control::NussbaumRangeError& e) {
            throw DivergenceError(t, "controller", std::string(e.what()) +
                                                       " (adaptive gain left the evaluable range)");
        } catch (const DivergenceError& e) {
            // Re-issue with the agent/channel name and a hint when the
            // adaptive gains were already large.
            double max_gain = 0.0;
            for (std::size_t a = 0; a < sys.agent_count(); ++a)
                max_gain = std::max(max_gain, std::abs(z[sys.gain_index(a)]));
            const std::string channel = e.component == DivergenceError::kNoComponent
                                            ? e.channel
                                            : channel_name(sys, e.component);
            throw DivergenceError(
                e.time, channel,
                max_gain > 100.0 ? "likely Nussbaum-gain divergence (max |k| before failure = " +
                                       std::to_string(max_gain) + ")"
                                 : "non-finite value",
                e.component);
        }
        t = (step <= full_steps) ? static_cast<double>(step) * opts.h : opts.duration;
        z = std::move(next);

        const bool is_last = step == full_steps + (has_tail ? 1u : 0u);
        if (step % static_cast<std::size_t>(opts.record_every) == 0 || is_last) {
            try {
                record_instant(sys, t, z, traj);
            } catch (const control::NussbaumRangeError& e) {
                throw DivergenceError(t, "controller",
                                      std::string(e.what()) +
                                          " (adaptive gain left the evaluable range)");
            }
        }
    }
    return traj;
}

MonotoneReport verify_gain_sum_monotone(const Trajectory& traj, const graph::Digraph& g) {
    if (traj.leader_mode)
        throw std::invalid_argument("verify_gain_sum_monotone: leaderless trajectory required");
    if (!graph::is_undirected(g))
        throw std::invalid_argument("verify_gain_sum_monotone: graph must be undirected");
    for (std::size_t r = 1; r < traj.size(); ++r) {
        const double prev = traj.metrics[r - 1].gain_sum;
        const double cur = traj.metrics[r].gain_sum;
        if (cur < prev - kMonotoneTolScale * (1.0 + std::abs(prev))) return {false, r};
    }
    return {};
}

ConvergenceReport verify_convergence(const Trajectory& traj, double eps, double window) {
    if (traj.size() < 2) throw std::invalid_argument("verify_convergence: trajectory too short");
    const double t_end = traj.times.back();
    if (!(window > 0.0) || window >= t_end)
        throw std::invalid_argument("verify_convergence: window must lie inside the trajectory");

    ConvergenceReport rep;
    rep.state_ceiling = kStateCeiling;
    const double t_from = t_end - window;

    bool any_in_window = false;
    for (std::size_t r = 0; r < traj.size(); ++r) {
        for (double v : traj.states[r]) rep.max_abs_state = std::max(rep.max_abs_state, std::abs(v));
        for (double k : traj.gains[r]) rep.max_abs_gain = std::max(rep.max_abs_gain, std::abs(k));
        if (traj.times[r] >= t_from) {
            any_in_window = true;
            rep.max_spread_in_window = std::max(rep.max_spread_in_window, traj.metrics[r].spread);
            rep.max_tracking_in_window =
                std::max(rep.max_tracking_in_window, traj.metrics[r].tracking_error);
        }
    }

    rep.consensus = any_in_window && rep.max_spread_in_window < eps;
    rep.bounded = rep.max_abs_state < kStateCeiling && rep.max_abs_gain < kStateCeiling;
    if (traj.leader_mode) rep.tracking = any_in_window && rep.max_tracking_in_window < eps;
    return rep;
}

}  // namespace nussim::sim
