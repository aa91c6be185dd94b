#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "nussim/scenario.hpp"

namespace nussim::cli {

/// Process exit codes used by the command-line front end.
enum ExitCode : int {
    kExitOk = 0,          // run completed and all acceptance flags passed
    kExitAcceptance = 1,  // run completed but an acceptance flag is false
    kExitInvalid = 2,     // scenario or argument rejected
    kExitDiverged = 3,    // non-finite state or Nussbaum overflow
};

/// Command-line overrides; precedence is CLI > scenario file > defaults.
struct RunOverrides {
    std::optional<double> h;
    std::optional<double> duration;
    std::optional<control::NussbaumKind> nussbaum;
};

void apply_overrides(Scenario& s, const RunOverrides& o);

/// Simulate a validated scenario and write trajectory.csv, summary.txt,
/// plot_outputs.dat and plot_gains.dat into out_dir (created if missing).
/// Progress and warnings go to `log`. Returns an ExitCode.
int run_scenario(const Scenario& s, const std::filesystem::path& out_dir, std::ostream& log);

/// Load + override + run; maps ScenarioError to kExitInvalid.
int run_file(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
             const RunOverrides& overrides, std::ostream& log);

/// Parse a scenario and print its assumption report without running it.
int check_file(const std::filesystem::path& scenario_path, std::ostream& log);

/// Catalog of shipped agent models.
std::string list_models_text();

void write_trajectory_csv(const std::filesystem::path& path, const sim::Trajectory& traj);
void write_plot_outputs(const std::filesystem::path& path, const sim::Trajectory& traj);
void write_plot_gains(const std::filesystem::path& path, const sim::Trajectory& traj);
void write_summary(const std::filesystem::path& path, const Scenario& s,
                   const AssumptionReport& assumptions, const sim::Trajectory& traj,
                   const sim::ConvergenceReport& report, int exit_status);

}  // namespace nussim::cli
