#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nussim/control.hpp"
#include "nussim/graph.hpp"
#include "nussim/sim.hpp"

namespace nussim::cli {

/// Invalid scenario document; message carries the offending field path.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One follower entry of the scenario's agent list.
struct AgentSpec {
    std::string model;
    double b = 0.0;
    std::vector<double> init;  // length state_dim; zeros when omitted
};

struct IntegratorSettings {
    double h = 1e-3;
    double duration = 100.0;  // "T" in scenario files
    int record_every = 100;
};

struct AcceptanceSettings {
    double eps = 0.05;
    double window = 10.0;
};

/// A fully validated experiment description.
struct Scenario {
    std::string name;
    control::Mode mode = control::Mode::Leaderless;
    graph::Digraph topology{0};
    std::vector<double> leader_weights;  // empty in leaderless mode
    std::vector<AgentSpec> agents;       // follower specs in node order 1..N
    std::optional<double> leader_x0;     // present iff leader mode
    control::NussbaumKind nussbaum = control::NussbaumKind::K2Sin;
    std::vector<double> k0;              // length N
    IntegratorSettings integrator;
    AcceptanceSettings acceptance;
};

/// Parse and validate a scenario document (JSON; // and /* */ comments
/// allowed). Throws ScenarioError with a field path on any defect.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical serialization; parse_scenario(emit_scenario(s)) reproduces an
/// equivalent scenario. Adjacency is always written as a weight matrix.
std::string emit_scenario(const Scenario& s);

/// Which protocol hypothesis set the communication structure satisfies.
/// UndirectedStrong: (followers) undirected and strongly connected;
/// BalancedWeak: weight-balanced and weakly connected. In leader mode both
/// additionally require the leader to reach every follower.
enum class HypothesisSet { UndirectedStrong, BalancedWeak, None };

struct AssumptionReport {
    bool undirected = false;
    bool strongly_connected = false;
    bool balanced = false;
    bool weakly_connected = false;
    bool leader_reachable = false;  // leader mode only
    bool h_matrix_spd = false;      // leader mode only
    HypothesisSet satisfied = HypothesisSet::None;
    std::vector<std::string> warnings;

    /// Multi-line human-readable rendering.
    std::string text(const Scenario& s) const;
};

/// Evaluate the graph-structure hypotheses of the scenario's mode. Purely
/// informational: an unsatisfied set yields warnings, never an error.
AssumptionReport check_assumptions(const Scenario& s);

struct BuiltSystem {
    sim::ClosedLoopSystem system;
    std::vector<double> z0;
};

/// Instantiate the closed loop and its packed initial state.
BuiltSystem build_closed_loop(const Scenario& s);

}  // namespace nussim::cli
