// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Each criterion pins its tolerance in code; scenario files supply the
// experiment definitions.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "nussim/runner.hpp"
#include "nussim/scenario.hpp"
#include "support.hpp"

using namespace nussim;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct RunArtifacts {
    cli::Scenario scenario;
    sim::Trajectory traj;
    sim::ConvergenceReport report;
    double sim_seconds = 0.0;
    int exit_status = -1;
};

RunArtifacts run_shipped(const std::string& name) {
    RunArtifacts art;
    art.scenario = cli::load_scenario_file(std::string(NUSSIM_SCENARIO_DIR) + "/" + name);
    cli::BuiltSystem built = cli::build_closed_loop(art.scenario);
    const sim::SimulateOptions opts{art.scenario.integrator.h, art.scenario.integrator.duration,
                                    art.scenario.integrator.record_every};
    const auto t0 = std::chrono::steady_clock::now();
    art.traj = sim::simulate(built.system, built.z0, opts);
    art.sim_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    art.report = sim::verify_convergence(art.traj, art.scenario.acceptance.eps,
                                         art.scenario.acceptance.window);

    std::ostringstream log;
    const fs::path out = fs::temp_directory_path() / ("nussim_acceptance_" + art.scenario.name);
    art.exit_status = cli::run_scenario(art.scenario, out, log);
    return art;
}

/// Max |y_i - y0| over recorded instants in the final window.
double max_tracking_inf(const RunArtifacts& art, double window) {
    const double t_from = art.traj.times.back() - window;
    double worst = 0.0;
    for (std::size_t r = 0; r < art.traj.size(); ++r) {
        if (art.traj.times[r] < t_from) continue;
        for (double y : art.traj.outputs[r])
            worst = std::max(worst, std::abs(y - art.traj.leader_output));
    }
    return worst;
}

double max_abs_gain(const sim::Trajectory& traj) {
    double worst = 0.0;
    for (const auto& ks : traj.gains)
        for (double k : ks) worst = std::max(worst, std::abs(k));
    return worst;
}

struct Criterion {
    std::string name;
    std::function<bool(std::ostream&)> check;
};

}  // namespace

int main() {
    std::vector<RunArtifacts> runs;
    try {
        runs.push_back(run_shipped("scenario_a.json"));            // 0
        runs.push_back(run_shipped("scenario_b.json"));            // 1
        runs.push_back(run_shipped("scenario_a_digraph.json"));    // 2
        runs.push_back(run_shipped("scenario_same_sign.json"));    // 3
        runs.push_back(run_shipped("scenario_disconnected.json")); // 4
    } catch (const std::exception& e) {
        std::cout << "[FAIL] scenario execution: " << e.what() << "\n";
        return 1;
    }
    const RunArtifacts& a = runs[0];
    const RunArtifacts& b = runs[1];
    const RunArtifacts& ring = runs[2];
    const RunArtifacts& same = runs[3];
    const RunArtifacts& split = runs[4];

    const std::vector<Criterion> criteria = {
        {"1 leaderless consensus of four mixed-sign oscillators (scenario_a)",
         [&](std::ostream& out) {
             out << "max spread over final " << a.scenario.acceptance.window
                 << " s = " << a.report.max_spread_in_window << " (< 0.05), max |k| = "
                 << max_abs_gain(a.traj) << " (< 1e3), sim time = " << a.sim_seconds
                 << " s (< 10)";
             return a.report.max_spread_in_window < 0.05 && max_abs_gain(a.traj) < 1e3 &&
                    a.sim_seconds < 10.0;
         }},
        {"2 leader-following consensus with mixed-sign followers (scenario_b)",
         [&](std::ostream& out) {
             const double e_inf = max_tracking_inf(b, 10.0);
             out << "max |y_i - y0| over final 10 s = " << e_inf
                 << " (< 0.05), exit status = " << b.exit_status << " (== 0)";
             return e_inf < 0.05 && b.exit_status == cli::kExitOk;
         }},
        {"3 balanced directed ring of single integrators (scenario_a_digraph)",
         [&](std::ostream& out) {
             out << "consensus flag = " << (ring.report.consensus ? "true" : "false")
                 << ", max spread over final window = " << ring.report.max_spread_in_window;
             return ring.report.consensus && ring.report.bounded;
         }},
        {"4 gain-sum monotonicity and dissipation identity on undirected runs",
         [&](std::ostream& out) {
             bool ok = true;
             for (const RunArtifacts* art : {&a, &same, &split}) {
                 const auto mono = sim::verify_gain_sum_monotone(art->traj, art->scenario.topology);
                 if (!mono.ok) {
                     out << art->scenario.name << ": gain sum decreases at index "
                         << mono.first_violation << "; ";
                     ok = false;
                 }
                 double worst = 0.0;
                 for (const auto& m : art->traj.metrics)
                     worst = std::max(worst, std::abs(m.gain_rate_sum - m.disagreement));
                 out << art->scenario.name << ": max |sum(y_i xi_i) - y'Ly| = " << worst << "; ";
                 ok = ok && worst <= 1e-9;
             }
             out << "(<= 1e-9 pointwise)";
             return ok;
         }},
        {"5 closed-form Nussbaum integral matches quadrature",
         [&](std::ostream& out) {
             const auto integrand = [](double s) { return s * s * std::sin(s); };
             double worst = 0.0;
             for (int i = 1; i <= 40; ++i) {
                 const double k = 0.5 * i;
                 worst = std::max(worst,
                                  std::abs(control::nussbaum_antiderivative_k2sin(k) -
                                           testsupport::adaptive_simpson(integrand, 0.0, k)));
             }
             const double at_pi = std::abs(control::nussbaum_antiderivative_k2sin(pi) -
                                           (pi * pi - 4.0));
             const double at_2pi = std::abs(control::nussbaum_antiderivative_k2sin(2 * pi) -
                                            (-4.0 * pi * pi));
             out << "max |F - quadrature| over 40 points = " << worst
                 << " (< 1e-8), |F(pi) - (pi^2-4)| = " << at_pi << ", |F(2pi) + 4pi^2| = "
                 << at_2pi << " (< 1e-12)";
             return worst < 1e-8 && at_pi < 1e-12 && at_2pi < 1e-12;
         }},
        {"6 passivity certificates hold on 1000 random samples per model",
         [&](std::ostream& out) {
             std::mt19937 rng(424242);
             std::uniform_real_distribution<double> coord(-10.0, 10.0);
             std::uniform_real_distribution<double> gain(0.25, 3.0);
             std::bernoulli_distribution flip(0.5);
             bool ok = true;
             for (const char* id :
                  {"single_integrator", "harmonic_oscillator", "damped_integrator_chain",
                   "damped_oscillator", "lorenz"}) {
                 const double bval = (flip(rng) ? 1.0 : -1.0) * gain(rng);
                 const agents::AgentModel m = agents::make_model(id, bval);
                 std::vector<agents::CertificateSample> samples(1000);
                 for (auto& s : samples) {
                     s.x.resize(m.state_dim);
                     for (auto& v : s.x) v = coord(rng);
                     s.u = coord(rng);
                 }
                 const auto rep = agents::check_passivity_certificate(m, samples);
                 if (!rep.ok) {
                     out << id << " violated at sample " << rep.sample_index << " (lhs=" << rep.lhs
                         << ", rhs=" << rep.rhs << "); ";
                     ok = false;
                 }
             }
             if (ok) out << "zero violations across 5 models x 1000 samples";
             return ok;
         }},
        {"7 connectivity and reachability agree with brute-force closure",
         [&](std::ostream& out) {
             std::uint64_t checked = 0;
             // Exhaustive over all {0,1} digraphs for N <= 4.
             for (std::size_t n = 1; n <= 4; ++n) {
                 const std::uint64_t codes = 1ull << (n * (n - 1));
                 for (std::uint64_t c = 0; c < codes; ++c) {
                     const auto g = testsupport::digraph_from_code(n, c);
                     if (graph::is_strongly_connected(g) != testsupport::brute_strongly_connected(g) ||
                         graph::is_weakly_connected(g) != testsupport::brute_weakly_connected(g)) {
                         out << "mismatch at n=" << n << " code=" << c;
                         return false;
                     }
                     ++checked;
                 }
             }
             // 10^4 random N = 5 digraphs.
             std::mt19937 rng(777);
             std::uniform_int_distribution<std::uint64_t> code5(0, (1ull << 20) - 1);
             for (int i = 0; i < 10000; ++i) {
                 const auto g = testsupport::digraph_from_code(5, code5(rng));
                 if (graph::is_strongly_connected(g) != testsupport::brute_strongly_connected(g) ||
                     graph::is_weakly_connected(g) != testsupport::brute_weakly_connected(g)) {
                     out << "mismatch at a random n=5 digraph";
                     return false;
                 }
                 ++checked;
             }
             // Leader reachability: exhaustive N <= 3 over pinning patterns,
             // then 10^4 random instances for N in {4, 5}.
             for (std::size_t n = 1; n <= 3; ++n) {
                 const std::uint64_t codes = 1ull << (n * (n - 1));
                 for (std::uint64_t c = 0; c < codes; ++c) {
                     const auto f = testsupport::digraph_from_code(n, c);
                     for (std::uint64_t p = 0; p < (1ull << n); ++p) {
                         std::vector<double> lw(n, 0.0);
                         for (std::size_t i = 0; i < n; ++i)
                             if (p >> i & 1u) lw[i] = 1.0;
                         const graph::LeaderGraph lg(f, lw);
                         if (graph::leader_globally_reachable(lg) !=
                             testsupport::brute_leader_reachable(lg)) {
                             out << "leader mismatch at n=" << n << " code=" << c << " pin=" << p;
                             return false;
                         }
                         ++checked;
                     }
                 }
             }
             std::bernoulli_distribution pin(0.4);
             for (std::size_t n : {std::size_t{4}, std::size_t{5}}) {
                 std::uniform_int_distribution<std::uint64_t> code(0, (1ull << (n * (n - 1))) - 1);
                 for (int i = 0; i < 10000; ++i) {
                     const auto f = testsupport::digraph_from_code(n, code(rng));
                     std::vector<double> lw(n, 0.0);
                     for (auto& w : lw) w = pin(rng) ? 1.0 : 0.0;
                     const graph::LeaderGraph lg(f, lw);
                     if (graph::leader_globally_reachable(lg) !=
                         testsupport::brute_leader_reachable(lg)) {
                         out << "leader mismatch at a random n=" << n << " instance";
                         return false;
                     }
                     ++checked;
                 }
             }
             out << checked << " instances agree";
             return true;
         }},
        {"8 RK4 global error falls 14x-18x when the step is halved",
         [&](std::ostream& out) {
             const sim::RhsFn decay = [](double, std::span<const double> z, std::span<double> dz) {
                 dz[0] = -z[0];
             };
             const auto global_error = [&](double h) {
                 std::vector<double> z{1.0};
                 const int steps = static_cast<int>(std::round(1.0 / h));
                 for (int s = 0; s < steps; ++s) z = sim::rk4_step(decay, s * h, z, h);
                 return std::abs(z[0] - std::exp(-1.0));
             };
             const double ratio = global_error(0.1) / global_error(0.05);
             out << "error ratio = " << ratio << " (in [14, 18])";
             return ratio >= 14.0 && ratio <= 18.0;
         }},
        {"9 disconnected graph is reported as a consensus failure",
         [&](std::ostream& out) {
             out << "exit status = " << split.exit_status << " (== 1), consensus flag = "
                 << (split.report.consensus ? "true" : "false") << " (== false)";
             return split.exit_status == cli::kExitAcceptance && !split.report.consensus;
         }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = c.check(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.name << " -- "
                  << detail.str() << "\n";
        if (!ok) ++failures;
    }
    if (failures == 0)
        std::cout << "all " << criteria.size() << " acceptance criteria passed\n";
    else
        std::cout << failures << " acceptance criteria FAILED\n";
    return failures == 0 ? 0 : 1;
}
