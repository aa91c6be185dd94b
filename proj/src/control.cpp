#include "nussim/control.hpp"

#include <cmath>

namespace nussim::control {

namespace {
constexpr double kExpK2CosRange = 26.0;
}

NussbaumKind nussbaum_kind_from_id(std::string_view id) {
    if (id == "k2sin") return NussbaumKind::K2Sin;
    if (id == "k2cos") return NussbaumKind::K2Cos;
    if (id == "expk2cos") return NussbaumKind::ExpK2Cos;
    throw std::invalid_argument("unknown nussbaum kind: " + std::string(id));
}

std::string_view nussbaum_kind_id(NussbaumKind kind) {
    switch (kind) {
        case NussbaumKind::K2Sin: return "k2sin";
        case NussbaumKind::K2Cos: return "k2cos";
        case NussbaumKind::ExpK2Cos: return "expk2cos";
    }
    return "k2sin";
}

double nussbaum_eval(NussbaumKind kind, double k) {
    if (!std::isfinite(k)) throw std::invalid_argument("nussbaum_eval: k must be finite");
    switch (kind) {
        case NussbaumKind::K2Sin:
            return k * k * std::sin(k);
        case NussbaumKind::K2Cos:
            return k * k * std::cos(k);
        case NussbaumKind::ExpK2Cos:
            if (std::abs(k) > kExpK2CosRange)
                throw NussbaumRangeError("expk2cos overflow: |k| = " + std::to_string(std::abs(k)) +
                                         " exceeds 26");
            return std::exp(k * k) * std::cos(k);
    }
    return 0.0;
}

double nussbaum_antiderivative_k2sin(double k) {
    if (!std::isfinite(k))
        throw std::invalid_argument("nussbaum_antiderivative_k2sin: k must be finite");
    return -k * k * std::cos(k) + 2.0 * k * std::sin(k) + 2.0 * std::cos(k) - 2.0;
}

double control_input(const ControllerState& cs, double xi) {
    return -nussbaum_eval(cs.kind, cs.k) * xi;
}

double gain_rate(double y, double xi) { return y * xi; }

Protocol::Protocol(Mode mode, std::variant<graph::Digraph, graph::LeaderGraph> top)
    : mode_(mode), topology_(std::move(top)) {}

Protocol Protocol::leaderless(graph::Digraph g) {
    return Protocol(Mode::Leaderless, std::move(g));
}

Protocol Protocol::leader_following(graph::LeaderGraph lg) {
    return Protocol(Mode::LeaderFollowing, std::move(lg));
}

const graph::Digraph& Protocol::followers() const {
    if (mode_ == Mode::Leaderless) return std::get<graph::Digraph>(topology_);
    return std::get<graph::LeaderGraph>(topology_).followers;
}

const graph::LeaderGraph& Protocol::leader_graph() const {
    if (mode_ != Mode::LeaderFollowing)
        throw std::logic_error("Protocol: no leader graph in leaderless mode");
    return std::get<graph::LeaderGraph>(topology_);
}

std::vector<double> Protocol::consensus_error(std::span<const double> y,
                                              std::optional<double> y0) const {
    const std::size_t n = agent_count();
    if (y.size() != n) throw std::invalid_argument("consensus_error: output vector length mismatch");
    if (mode_ == Mode::LeaderFollowing && !y0)
        throw std::invalid_argument("consensus_error: leader output y0 required in leader mode");
    if (mode_ == Mode::Leaderless && y0)
        throw std::invalid_argument("consensus_error: y0 supplied in leaderless mode");

    const graph::Digraph& g = followers();
    std::vector<double> xi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += g.weight(i, j) * (y[i] - y[j]);
        xi[i] = s;
    }
    if (mode_ == Mode::LeaderFollowing) {
        const auto& lw = leader_graph().leader_weights;
        for (std::size_t i = 0; i < n; ++i) xi[i] += lw[i] * (y[i] - *y0);
    }
    return xi;
}

}  // namespace nussim::control
