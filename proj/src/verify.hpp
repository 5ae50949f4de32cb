#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "symmetry.hpp"

namespace nhsym {

/// One verification entry. `statement` is the checked identity written out,
/// so reports are readable without the source.
struct CheckResult {
    std::string name;
    std::string statement;
    bool pass = false;
    double max_residual = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    std::string note;
};

struct SymmetryDrift {
    std::string label;
    double initial = 0.0;
    double abs_drift = 0.0;
    double rel_drift = 0.0;
};

struct Report {
    std::string scenario;
    std::vector<CheckResult> entries;
    std::vector<SymmetryDrift> drifts;
    double max_constraint_drift = 0.0;
    double energy_initial = 0.0;
    double energy_abs_drift = 0.0;
    double energy_rel_drift = 0.0;

    bool all_pass() const;
};

std::string render_text(const Report& report);
std::string render_json(const Report& report);

struct VerifyTolerances {
    double pointwise = 1e-8;        // pointwise identities
    double conservation_rel = 1e-8; // relative trajectory drift
    double membership = 1e-8;       // distribution membership residuals
    double invariance = 1e-10;      // invariance condition at sampled states
    double oracle_rel = 1e-5;       // multiplier oracle agreement
};

/// Sampling window for state-sampled checks (t uniform in [t0,t1], q in a
/// unit box around q_center, admissible momenta from the chart).
struct SampleWindow {
    double t0 = 0.0;
    double t1 = 10.0;
    Vec q_center;
    double momentum_radius = 3.0;
};

/// Fills trajectory summary fields (constraint drift, energy drift).
void summarize_trajectory(const MechSystem& sys, const Trajectory& traj, Report& report);

/// dJ/dt against the full and the force-only right hand sides, where J is
/// the symmetry pairing without the gauge term. The full identity must hold
/// whenever the invariance condition does; the reduced one additionally
/// requires reaction-annihilator membership.
std::vector<CheckResult> momentum_equation_report(const MechSystem& sys,
                                                  const SymmetryEngine& engine,
                                                  const Trajectory& traj,
                                                  const VerifyTolerances& tol = {});

CheckResult conservation_report(const MechSystem& sys, const SymmetryEngine& engine,
                                const Trajectory& traj, const VerifyTolerances& tol,
                                SymmetryDrift* drift_out = nullptr);

/// Invariance residual at seeded on-manifold states.
CheckResult invariance_report(const MechSystem& sys, const SymmetryEngine& engine,
                              const SampleWindow& window, int states, std::uint64_t seed,
                              const VerifyTolerances& tol = {});

/// (tau, xi) membership sampled along the trajectory: the affine row
/// equations (informational) and the reaction-annihilator test (gating).
CheckResult membership_report(const MechSystem& sys, const SymmetryEngine& engine,
                              const Trajectory& traj, const MembershipOptions& opt,
                              int max_points = 64);

CheckResult gyroscopic_check(const MechSystem& sys, const SampleWindow& window, int samples,
                             std::uint64_t seed, const VerifyTolerances& tol = {});

/// Random directions solving the affine row equations must annihilate the
/// reaction force; a perturbed control direction must fail when reactions
/// are active.
std::vector<CheckResult> subset_check(const MechSystem& sys, const SampleWindow& window,
                                      int directions, const MembershipOptions& opt,
                                      std::uint64_t seed);

/// Moving-energy verdicts for tau == 1 specs: admissibility of xi0,
/// membership of xi - xi0, and drift of J = sum xi_j p_j - H.
std::vector<CheckResult> moving_energy_report(const MechSystem& sys, const SymmetryEngine& engine,
                                              const std::vector<ExprPtr>& xi0,
                                              const Trajectory& traj,
                                              const MembershipOptions& opt,
                                              const VerifyTolerances& tol,
                                              SymmetryDrift* drift_out = nullptr);

CheckResult weak_noether_report(const MechSystem& sys, const SymmetryEngine& engine,
                                const Trajectory& traj, const VerifyTolerances& tol = {},
                                int max_points = 64);

std::vector<CheckResult> generalized_report(const MechSystem& sys, const SymmetryEngine& engine,
                                            const OneForm& gamma, const Trajectory& traj,
                                            const VerifyTolerances& tol = {},
                                            int max_points = 64);

CheckResult bracket_report(const MechSystem& sys, const SymmetryEngine& engine,
                           const Trajectory& traj, const VerifyTolerances& tol = {},
                           int max_points = 64);

/// Single-state multiplier oracle: multipliers recovered from one explicit
/// Euler step of size h_fd using only residual evaluations, against the
/// analytic solve. Returns the relative difference.
double multiplier_oracle_check(const MechSystem& sys, const PhaseState& state,
                               double h_fd = 1e-6);

CheckResult multiplier_oracle_report(const MechSystem& sys, const Trajectory& traj, int states,
                                     const VerifyTolerances& tol = {}, double h_fd = 1e-6);

} // namespace nhsym
