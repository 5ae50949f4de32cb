#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "verify.hpp"

namespace nhsym {

/// One symmetry section of a scenario together with its requested checks.
struct SymmetryRequest {
    SymmetrySpec spec;
    std::vector<std::string> checks;
    std::vector<ExprPtr> xi0;      // moving_energy reference section (defaults to 0)
    std::optional<OneForm> gamma;  // correction form for the generalized check
};

struct Scenario {
    std::string name;
    std::string source; // path or "builtin:<name>"
    int n = 0;
    ParamTable params;
    NaturalLagrangian lagrangian;
    Force force;
    std::vector<ConstraintRow> rows;
    std::vector<SymmetryRequest> symmetries;

    // integration section
    double t0 = 0.0;
    std::vector<double> q0, p0;
    double h = 1e-3;
    int steps = 1000;
    bool projection = true;
    std::uint64_t seed = 20240601ull;

    // system-level checks
    bool check_gyroscopic = false;
    int subset_directions = 0;
    int oracle_states = 0;

    VerifyTolerances tol;
};

/// Parse and validate a scenario file. Diagnostics carry file, line, section
/// and key. Throws ScenarioError.
Scenario load_scenario(const std::filesystem::path& path);
Scenario load_scenario_text(std::string_view text, const std::string& origin);

/// Build the mechanical system and projected initial state without running;
/// this is the `check` subcommand behind the C API.
struct PreparedScenario {
    MechSystem system;
    PhaseState initial;
};
PreparedScenario prepare(const Scenario& scenario);

struct RunResult {
    Report report;
    Trajectory trajectory;
    std::vector<std::string> j_labels;
    std::vector<std::vector<double>> j_series; // one row per label
    bool passed() const { return report.all_pass(); }
};

RunResult run_scenario(const Scenario& scenario);

/// trajectory.csv, report.txt and report.json under out_dir.
void write_outputs(const Scenario& scenario, const RunResult& result,
                   const std::filesystem::path& out_dir);

std::string trajectory_csv(const Scenario& scenario, const RunResult& result);

struct BuiltinInfo {
    std::string name;
    std::string summary;
};
const std::vector<BuiltinInfo>& builtin_scenarios();
bool is_builtin(const std::string& name);
Scenario load_builtin(const std::string& name);
std::string list_builtins_text();

} // namespace nhsym
