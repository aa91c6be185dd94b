#include "nussim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nussim/agents.hpp"

namespace nussim::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ScenarioError(path + ": " + msg);
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    return obj.at(key);
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "value must be finite");
    return x;
}

std::vector<double> number_list_at(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::size_t node_index(const json& v, const std::string& path, std::size_t n) {
    if (!v.is_number_integer()) fail(path, "expected a 1-based node index");
    const auto raw = v.get<long long>();
    if (raw < 1 || static_cast<std::size_t>(raw) > n)
        fail(path, "node index " + std::to_string(raw) + " outside 1.." + std::to_string(n));
    return static_cast<std::size_t>(raw) - 1;
}

graph::Digraph parse_graph(const json& gj, const std::string& path, std::size_t& n_out) {
    if (!gj.is_object()) fail(path, "expected an object");

    if (gj.contains("weights")) {
        if (gj.contains("nodes") || gj.contains("edges") || gj.contains("undirected_edges"))
            fail(path, "give either \"weights\" or \"nodes\" with edge lists, not both");
        const json& wj = gj.at("weights");
        if (!wj.is_array() || wj.empty()) fail(path + ".weights", "expected a nonempty N x N matrix");
        const std::size_t n = wj.size();
        linalg::Matrix w(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::string rp = path + ".weights[" + std::to_string(i) + "]";
            const auto row = number_list_at(wj[i], rp);
            if (row.size() != n) fail(rp, "expected " + std::to_string(n) + " columns");
            for (std::size_t j = 0; j < n; ++j) w(i, j) = row[j];
        }
        n_out = n;
        try {
            return graph::Digraph::from_weights(w);
        } catch (const std::invalid_argument& e) {
            fail(path + ".weights", e.what());
        }
    }

    if (!gj.contains("nodes")) fail(path, "need either \"weights\" or \"nodes\"");
    const json& nj = gj.at("nodes");
    if (!nj.is_number_integer() || nj.get<long long>() < 1)
        fail(path + ".nodes", "expected a positive node count");
    const std::size_t n = nj.get<std::size_t>();
    n_out = n;
    graph::Digraph g(n);

    auto add_edges = [&](const char* key, bool undirected) {
        if (!gj.contains(key)) return;
        const json& ej = gj.at(key);
        const std::string ep = path + "." + key;
        if (!ej.is_array()) fail(ep, "expected an array of [from, to, weight] triples");
        for (std::size_t e = 0; e < ej.size(); ++e) {
            const std::string p = ep + "[" + std::to_string(e) + "]";
            const json& t = ej[e];
            if (!t.is_array() || (t.size() != 2 && t.size() != 3))
                fail(p, "expected [from, to] or [from, to, weight]");
            const std::size_t from = node_index(t[0], p + "[0]", n);
            const std::size_t to = node_index(t[1], p + "[1]", n);
            const double w = t.size() == 3 ? number_at(t[2], p + "[2]") : 1.0;
            if (w < 0.0) fail(p + "[2]", "edge weight must be nonnegative");
            try {
                if (undirected)
                    g.add_undirected_edge(from, to, w);
                else
                    g.add_edge(from, to, w);
            } catch (const std::invalid_argument& ex) {
                fail(p, ex.what());
            }
        }
    };
    add_edges("edges", false);
    add_edges("undirected_edges", true);
    return g;
}

std::vector<double> parse_leader_edges(const json& gj, const std::string& path, std::size_t n) {
    std::vector<double> lw(n, 0.0);
    if (!gj.contains("leader_edges")) return lw;
    const json& lj = gj.at("leader_edges");
    const std::string lp = path + ".leader_edges";
    if (!lj.is_array()) fail(lp, "expected an array of [agent, weight] pairs");
    for (std::size_t e = 0; e < lj.size(); ++e) {
        const std::string p = lp + "[" + std::to_string(e) + "]";
        const json& t = lj[e];
        if (!t.is_array() || (t.size() != 1 && t.size() != 2))
            fail(p, "expected [agent] or [agent, weight]");
        const std::size_t agent = node_index(t[0], p + "[0]", n);
        const double w = t.size() == 2 ? number_at(t[1], p + "[1]") : 1.0;
        if (w < 0.0) fail(p + "[1]", "pinning weight must be nonnegative");
        lw[agent] = w;
    }
    return lw;
}

std::size_t model_state_dim(const std::string& id) {
    for (const auto& info : agents::model_catalog())
        if (info.id == id) return info.state_dim;
    return 0;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario is not well-formed: ") + e.what());
    }
    if (!doc.is_object()) throw ScenarioError("scenario: top-level document must be an object");

    Scenario s;

    const json& name = require(doc, "scenario", "name");
    if (!name.is_string() || name.get<std::string>().empty())
        fail("scenario.name", "expected a nonempty string");
    s.name = name.get<std::string>();

    const json& mode = require(doc, "scenario", "mode");
    if (mode == "leaderless")
        s.mode = control::Mode::Leaderless;
    else if (mode == "leader")
        s.mode = control::Mode::LeaderFollowing;
    else
        fail("scenario.mode", "expected \"leaderless\" or \"leader\"");

    std::size_t n = 0;
    const json& gj = require(doc, "scenario", "graph");
    s.topology = parse_graph(gj, "scenario.graph", n);
    if (s.mode == control::Mode::LeaderFollowing) {
        s.leader_weights = parse_leader_edges(gj, "scenario.graph", n);
    } else if (gj.is_object() && gj.contains("leader_edges")) {
        fail("scenario.graph.leader_edges", "leader edges are only valid in leader mode");
    }

    const json& aj = require(doc, "scenario", "agents");
    if (!aj.is_array()) fail("scenario.agents", "expected an array");
    std::size_t leader_entries = 0;
    for (std::size_t i = 0; i < aj.size(); ++i) {
        const std::string p = "scenario.agents[" + std::to_string(i) + "]";
        const json& ej = aj[i];
        if (!ej.is_object()) fail(p, "expected an object");
        const json& mj = require(ej, p, "model");
        if (!mj.is_string()) fail(p + ".model", "expected a model id string");
        const std::string model = mj.get<std::string>();

        if (model == "leader") {
            if (s.mode != control::Mode::LeaderFollowing)
                fail(p, "a leader entry is only valid in leader mode");
            if (++leader_entries > 1) fail(p, "only one leader entry is allowed");
            s.leader_x0 = number_at(require(ej, p, "x0"), p + ".x0");
            continue;
        }

        const std::size_t dim = model_state_dim(model);
        if (dim == 0) fail(p + ".model", "unknown model id: " + model);

        AgentSpec spec;
        spec.model = model;
        spec.b = number_at(require(ej, p, "b"), p + ".b");
        if (spec.b == 0.0) fail(p + ".b", "control gain must be nonzero");
        if (ej.contains("init")) {
            spec.init = number_list_at(ej.at("init"), p + ".init");
            if (spec.init.size() != dim)
                fail(p + ".init", "expected " + std::to_string(dim) + " components for model " + model);
        } else {
            spec.init.assign(dim, 0.0);
        }
        s.agents.push_back(std::move(spec));
    }

    if (s.mode == control::Mode::LeaderFollowing && leader_entries == 0)
        fail("scenario.agents", "leader mode requires one entry with model \"leader\"");
    if (s.agents.size() != n)
        fail("scenario.agents",
             "agent count " + std::to_string(s.agents.size()) + " does not match graph node count " +
                 std::to_string(n));

    if (doc.contains("nussbaum")) {
        const json& kj = doc.at("nussbaum");
        if (!kj.is_string()) fail("scenario.nussbaum", "expected one of k2sin | k2cos | expk2cos");
        try {
            s.nussbaum = control::nussbaum_kind_from_id(kj.get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail("scenario.nussbaum", e.what());
        }
    }

    if (doc.contains("k0")) {
        s.k0 = number_list_at(doc.at("k0"), "scenario.k0");
        if (s.k0.size() != n)
            fail("scenario.k0", "expected one initial gain per agent (" + std::to_string(n) + ")");
    } else {
        s.k0.assign(n, 0.0);
    }

    if (doc.contains("integrator")) {
        const json& ij = doc.at("integrator");
        if (!ij.is_object()) fail("scenario.integrator", "expected an object");
        if (ij.contains("h")) s.integrator.h = number_at(ij.at("h"), "scenario.integrator.h");
        if (ij.contains("T"))
            s.integrator.duration = number_at(ij.at("T"), "scenario.integrator.T");
        if (ij.contains("record_every")) {
            const json& rj = ij.at("record_every");
            if (!rj.is_number_integer() || rj.get<long long>() < 1)
                fail("scenario.integrator.record_every", "expected a positive integer");
            s.integrator.record_every = rj.get<int>();
        }
        if (!(s.integrator.h > 0.0)) fail("scenario.integrator.h", "step size must be positive");
        if (!(s.integrator.duration >= s.integrator.h))
            fail("scenario.integrator.T", "horizon must be at least one step");
    }

    if (doc.contains("acceptance")) {
        const json& cj = doc.at("acceptance");
        if (!cj.is_object()) fail("scenario.acceptance", "expected an object");
        if (cj.contains("eps")) s.acceptance.eps = number_at(cj.at("eps"), "scenario.acceptance.eps");
        if (cj.contains("window"))
            s.acceptance.window = number_at(cj.at("window"), "scenario.acceptance.window");
        if (!(s.acceptance.eps > 0.0)) fail("scenario.acceptance.eps", "tolerance must be positive");
        if (!(s.acceptance.window > 0.0) || s.acceptance.window >= s.integrator.duration)
            fail("scenario.acceptance.window", "window must be positive and shorter than T");
    }

    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string emit_scenario(const Scenario& s) {
    ordered_json doc;
    doc["name"] = s.name;
    doc["mode"] = s.mode == control::Mode::Leaderless ? "leaderless" : "leader";

    const std::size_t n = s.topology.size();
    ordered_json gj;
    ordered_json weights = ordered_json::array();
    for (std::size_t i = 0; i < n; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < n; ++j) row.push_back(s.topology.weight(i, j));
        weights.push_back(std::move(row));
    }
    gj["weights"] = std::move(weights);
    if (s.mode == control::Mode::LeaderFollowing) {
        ordered_json le = ordered_json::array();
        for (std::size_t i = 0; i < n; ++i)
            if (s.leader_weights[i] > 0.0) le.push_back({i + 1, s.leader_weights[i]});
        gj["leader_edges"] = std::move(le);
    }
    doc["graph"] = std::move(gj);

    ordered_json agents = ordered_json::array();
    if (s.leader_x0) agents.push_back({{"model", "leader"}, {"x0", *s.leader_x0}});
    for (const auto& a : s.agents)
        agents.push_back({{"model", a.model}, {"b", a.b}, {"init", a.init}});
    doc["agents"] = std::move(agents);

    doc["nussbaum"] = std::string(control::nussbaum_kind_id(s.nussbaum));
    doc["k0"] = s.k0;
    doc["integrator"] = {{"h", s.integrator.h},
                         {"T", s.integrator.duration},
                         {"record_every", s.integrator.record_every}};
    doc["acceptance"] = {{"eps", s.acceptance.eps}, {"window", s.acceptance.window}};
    return doc.dump(2) + "\n";
}

std::string AssumptionReport::text(const Scenario& s) const {
    const bool leader = s.mode == control::Mode::LeaderFollowing;
    const char* who = leader ? "follower graph" : "graph";
    std::ostringstream out;
    out << who << " undirected:          " << (undirected ? "yes" : "no") << "\n"
        << who << " strongly connected:  " << (strongly_connected ? "yes" : "no") << "\n"
        << who << " weight-balanced:     " << (balanced ? "yes" : "no") << "\n"
        << who << " weakly connected:    " << (weakly_connected ? "yes" : "no") << "\n";
    if (leader) {
        out << "leader reaches every follower: " << (leader_reachable ? "yes" : "no") << "\n"
            << "H = L + diag(pinning) has positive definite symmetric part: "
            << (h_matrix_spd ? "yes" : "no") << "\n";
    }
    switch (satisfied) {
        case HypothesisSet::UndirectedStrong:
            out << "hypotheses satisfied: undirected + strongly connected"
                << (leader ? " followers, leader reachable" : "")
                << " (consensus guaranteed)\n";
            break;
        case HypothesisSet::BalancedWeak:
            out << "hypotheses satisfied: balanced + weakly connected"
                << (leader ? " followers, leader reachable" : "")
                << " (consensus guaranteed)\n";
            break;
        case HypothesisSet::None:
            out << "hypotheses satisfied: none\n";
            break;
    }
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

AssumptionReport check_assumptions(const Scenario& s) {
    AssumptionReport rep;
    const graph::Digraph& g = s.topology;
    rep.undirected = graph::is_undirected(g);
    rep.strongly_connected = graph::is_strongly_connected(g);
    rep.balanced = graph::is_balanced(g);
    rep.weakly_connected = graph::is_weakly_connected(g);

    bool leader_ok = true;
    if (s.mode == control::Mode::LeaderFollowing) {
        graph::LeaderGraph lg(g, s.leader_weights);
        rep.leader_reachable = graph::leader_globally_reachable(lg);
        rep.h_matrix_spd = graph::symmetric_part_positive_definite(graph::leader_h_matrix(lg));
        leader_ok = rep.leader_reachable;
        if (s.leader_x0 && *s.leader_x0 != 0.0)
            rep.warnings.push_back(
                "leader reference x0 is nonzero; the leader-following guarantee is stated for "
                "x0 = 0, so tracking is not certified");
    }

    if (rep.undirected && rep.strongly_connected && leader_ok)
        rep.satisfied = HypothesisSet::UndirectedStrong;
    else if (rep.balanced && rep.weakly_connected && leader_ok)
        rep.satisfied = HypothesisSet::BalancedWeak;
    else
        rep.satisfied = HypothesisSet::None;

    if (rep.satisfied == HypothesisSet::None)
        rep.warnings.push_back(
            "communication structure satisfies no protocol hypothesis set; the run will proceed "
            "but convergence is not guaranteed");
    return rep;
}

BuiltSystem build_closed_loop(const Scenario& s) {
    std::vector<agents::AgentModel> models;
    std::vector<std::vector<double>> x0;
    models.reserve(s.agents.size());
    for (const auto& spec : s.agents) {
        models.push_back(agents::make_model(spec.model, spec.b));
        x0.push_back(spec.init);
    }

    control::Protocol protocol =
        s.mode == control::Mode::Leaderless
            ? control::Protocol::leaderless(s.topology)
            : control::Protocol::leader_following(graph::LeaderGraph(s.topology, s.leader_weights));

    std::vector<control::ControllerState> controllers(s.agents.size());
    for (std::size_t i = 0; i < controllers.size(); ++i)
        controllers[i] = {s.k0[i], s.nussbaum};

    std::optional<agents::LeaderModel> leader;
    if (s.mode == control::Mode::LeaderFollowing) leader = agents::LeaderModel{*s.leader_x0};

    sim::ClosedLoopSystem system(std::move(models), std::move(protocol), controllers,
                                 std::move(leader));
    std::vector<double> z0 = system.pack_state(x0);
    return {std::move(system), std::move(z0)};
}

}  // namespace nussim::cli
