#include "nussim/runner.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace nussim::cli {

namespace {

/// 17 significant digits: enough to reproduce any double exactly.
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    return out;
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

}  // namespace

void apply_overrides(Scenario& s, const RunOverrides& o) {
    if (o.h) {
        if (!(*o.h > 0.0)) throw ScenarioError("--dt: step size must be positive");
        s.integrator.h = *o.h;
    }
    if (o.duration) {
        if (!(*o.duration >= s.integrator.h))
            throw ScenarioError("--duration: horizon must be at least one step");
        if (s.acceptance.window >= *o.duration)
            throw ScenarioError("--duration: horizon must exceed the acceptance window");
        s.integrator.duration = *o.duration;
    }
    if (o.nussbaum) s.nussbaum = *o.nussbaum;
}

void write_trajectory_csv(const std::filesystem::path& path, const sim::Trajectory& traj) {
    auto out = open_out(path);
    const std::size_t n = traj.agent_count;
    out << "t";
    for (std::size_t i = 1; i <= n; ++i) out << ",y_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",k_" << i;
    for (std::size_t i = 1; i <= n; ++i) out << ",u_" << i;
    out << ",spread,disagreement,tracking_error,gain_sum\n";
    for (std::size_t r = 0; r < traj.size(); ++r) {
        out << fmt(traj.times[r]);
        for (double y : traj.outputs[r]) out << ',' << fmt(y);
        for (double k : traj.gains[r]) out << ',' << fmt(k);
        for (double u : traj.inputs[r]) out << ',' << fmt(u);
        const auto& m = traj.metrics[r];
        out << ',' << fmt(m.spread) << ',' << fmt(m.disagreement) << ',' << fmt(m.tracking_error)
            << ',' << fmt(m.gain_sum) << '\n';
    }
}

void write_plot_outputs(const std::filesystem::path& path, const sim::Trajectory& traj) {
    auto out = open_out(path);
    out << "# t";
    if (traj.leader_mode) out << " y_0";
    for (std::size_t i = 1; i <= traj.agent_count; ++i) out << " y_" << i;
    out << '\n';
    for (std::size_t r = 0; r < traj.size(); ++r) {
        out << fmt(traj.times[r]);
        if (traj.leader_mode) out << ' ' << fmt(traj.leader_output);
        for (double y : traj.outputs[r]) out << ' ' << fmt(y);
        out << '\n';
    }
}

void write_plot_gains(const std::filesystem::path& path, const sim::Trajectory& traj) {
    auto out = open_out(path);
    out << "# t";
    for (std::size_t i = 1; i <= traj.agent_count; ++i) out << " k_" << i;
    out << '\n';
    for (std::size_t r = 0; r < traj.size(); ++r) {
        out << fmt(traj.times[r]);
        for (double k : traj.gains[r]) out << ' ' << fmt(k);
        out << '\n';
    }
}

void write_summary(const std::filesystem::path& path, const Scenario& s,
                   const AssumptionReport& assumptions, const sim::Trajectory& traj,
                   const sim::ConvergenceReport& report, int exit_status) {
    auto out = open_out(path);
    out << "name = " << s.name << "\n"
        << "mode = " << (s.mode == control::Mode::Leaderless ? "leaderless" : "leader") << "\n"
        << "agents = " << traj.agent_count << "\n"
        << "nussbaum = " << control::nussbaum_kind_id(s.nussbaum) << "\n"
        << "h = " << fmt(s.integrator.h) << "\n"
        << "T = " << fmt(s.integrator.duration) << "\n"
        << "record_every = " << s.integrator.record_every << "\n"
        << "eps = " << fmt(s.acceptance.eps) << "\n"
        << "window = " << fmt(s.acceptance.window) << "\n";
    if (s.leader_x0) out << "leader_x0 = " << fmt(*s.leader_x0) << "\n";

    const char* hypotheses = "none";
    if (assumptions.satisfied == HypothesisSet::UndirectedStrong)
        hypotheses = "undirected_strongly_connected";
    else if (assumptions.satisfied == HypothesisSet::BalancedWeak)
        hypotheses = "balanced_weakly_connected";
    out << "hypotheses = " << hypotheses << "\n";

    const auto& m = traj.metrics.back();
    out << "t_final = " << fmt(traj.times.back()) << "\n"
        << "spread_final = " << fmt(m.spread) << "\n"
        << "disagreement_final = " << fmt(m.disagreement) << "\n"
        << "tracking_error_final = " << fmt(m.tracking_error) << "\n"
        << "gain_sum_final = " << fmt(m.gain_sum) << "\n"
        << "max_spread_in_window = " << fmt(report.max_spread_in_window) << "\n"
        << "max_tracking_in_window = " << fmt(report.max_tracking_in_window) << "\n"
        << "max_abs_state = " << fmt(report.max_abs_state) << "\n"
        << "max_abs_gain = " << fmt(report.max_abs_gain) << "\n"
        << "consensus = " << bool_str(report.consensus) << "\n"
        << "bounded = " << bool_str(report.bounded) << "\n"
        << "tracking = " << (report.tracking ? bool_str(*report.tracking) : "n/a") << "\n"
        << "exit_status = " << exit_status << "\n";
}

int run_scenario(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log) {
    const AssumptionReport assumptions = check_assumptions(s);
    for (const auto& w : assumptions.warnings) log << "warning: " << w << "\n";

    BuiltSystem built = build_closed_loop(s);
    sim::SimulateOptions opts{s.integrator.h, s.integrator.duration, s.integrator.record_every};

    sim::Trajectory traj;
    try {
        traj = sim::simulate(built.system, built.z0, opts);
    } catch (const sim::DivergenceError& e) {
        log << "error: " << e.what() << "\n";
        return kExitDiverged;
    }

    const sim::ConvergenceReport report =
        sim::verify_convergence(traj, s.acceptance.eps, s.acceptance.window);
    const int status = report.passed() ? kExitOk : kExitAcceptance;

    std::filesystem::create_directories(out_dir);
    write_trajectory_csv(out_dir / "trajectory.csv", traj);
    write_plot_outputs(out_dir / "plot_outputs.dat", traj);
    write_plot_gains(out_dir / "plot_gains.dat", traj);
    write_summary(out_dir / "summary.txt", s, assumptions, traj, report, status);

    log << "wrote " << (out_dir / "trajectory.csv").string() << " (" << traj.size()
        << " instants)\n"
        << "consensus = " << bool_str(report.consensus) << ", bounded = "
        << bool_str(report.bounded);
    if (report.tracking) log << ", tracking = " << bool_str(*report.tracking);
    log << "\n";
    if (status != kExitOk) {
        log << "acceptance failed:";
        if (!report.consensus) log << " consensus";
        if (!report.bounded) log << " boundedness";
        if (report.tracking && !*report.tracking) log << " tracking";
        log << "\n";
    }
    return status;
}

int run_file(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
             const RunOverrides& overrides, std::ostream& log) {
    Scenario s;
    try {
        s = load_scenario_file(scenario_path);
        apply_overrides(s, overrides);
    } catch (const ScenarioError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    const std::filesystem::path dir = out_dir.empty() ? std::filesystem::path("out") / s.name
                                                      : out_dir;
    return run_scenario(s, dir, log);
}

int check_file(const std::filesystem::path& scenario_path, std::ostream& log) {
    Scenario s;
    try {
        s = load_scenario_file(scenario_path);
    } catch (const ScenarioError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    log << "scenario: " << s.name << "\n" << check_assumptions(s).text(s);
    return kExitOk;
}

std::string list_models_text() {
    std::ostringstream out;
    out << std::left << std::setw(26) << "model" << std::setw(11) << "state_dim" << std::setw(8)
        << "output" << std::setw(66) << "dynamics" << "certificate\n";
    for (const auto& info : agents::model_catalog()) {
        out << std::left << std::setw(26) << info.id << std::setw(11) << info.state_dim
            << std::setw(8) << info.output << std::setw(66) << info.dynamics
            << (info.has_certificate ? "yes" : "n/a") << "\n";
    }
    return out.str();
}

}  // namespace nussim::cli
