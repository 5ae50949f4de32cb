#pragma once

#include <vector>

#include "constraint.hpp"
#include "model.hpp"

namespace nhsym {

struct PhaseState {
    double t = 0.0;
    Vec q;
    Vec p;
};

/// A tangent vector at a phase-space point; dt is 1 for the flow field.
struct PhaseVectorField {
    double dt = 1.0;
    Vec dq;
    Vec dp;
    Vec lambda; // multipliers used to assemble dp
};

struct TrajectorySample {
    PhaseState state;
    Vec lambda;
    double constraint_drift = 0.0; // violation before any projection
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double h = 0.0;
    bool projection = true;
    int steps() const { return static_cast<int>(samples.size()) - 1; }
};

struct ProjectionOptions {
    double tol = 1e-12;
    int max_iterations = 5;
};

struct IntegrateOptions {
    bool projection = true;
    double manifold_tol = 1e-8; // admission check for the initial state
    ProjectionOptions project;
};

/// Right-hand side of the constrained equations of motion:
/// dq = H_p, dp = -H_q + F + R with multipliers from solve_multipliers.
PhaseVectorField vector_field(const MechSystem& sys, const PhaseState& state);

/// Newton-project q onto the holonomic constraints, then apply the affine
/// least-norm momentum correction p -= A^T (A H_pp A^T)^{-1} g (minimal
/// change in the H_pp metric). Throws IntegrationError on divergence.
PhaseState project_to_manifold(const MechSystem& sys, const PhaseState& state,
                               const ProjectionOptions& opt = {});

/// Classical fixed-step RK4. Reported per-sample drift is measured before
/// the optional post-step projection so projection cannot mask an incorrect
/// multiplier solve.
Trajectory integrate(const MechSystem& sys, const PhaseState& initial, double h, int steps,
                     const IntegrateOptions& opt = {});

} // namespace nhsym
