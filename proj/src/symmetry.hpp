#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "model.hpp"

namespace nhsym {

/// A 1-form on the extended phase space, beta = beta_t dt + sum beta_{q_i} dq_i
/// + sum beta_{p_i} dp_i, with components in (t,q,p).
struct OneForm {
    ExprPtr t_comp;
    std::vector<ExprPtr> q_comp;
    std::vector<ExprPtr> p_comp;

    static OneForm zero(int n);
};

enum class ProlongationMode { Full, CotangentLift };

/// Candidate symmetry: time component tau and configuration components xi,
/// both in (t,q); optional gauge function f(t,q,p) and closed 1-form beta.
struct SymmetrySpec {
    std::string label;
    ExprPtr tau;
    std::vector<ExprPtr> xi;
    ExprPtr gauge;                // defaults to 0
    std::optional<OneForm> beta;  // defaults to none
    ProlongationMode mode = ProlongationMode::Full;

    static SymmetrySpec translation(int n, int axis, std::string label); // xi = e_axis, tau = 0
    static SymmetrySpec time_translation(int n, std::string label);      // tau = 1, xi = 0
};

struct ClosednessVerdict {
    bool closed = false;
    bool symbolic = false; // all antisymmetrized mixed partials folded to zero
    double worst = 0.0;    // worst numeric residual when sampling was needed
};

/// Closedness of a 1-form: symbolic mixed-partial antisymmetry after folding,
/// with a 200-point seeded numeric fallback.
ClosednessVerdict check_closed(const OneForm& beta, int n, const ParamTable& params,
                               std::uint64_t seed = 0xbe7a5eedull, int samples = 200,
                               double tol = 1e-10);

/// Arity and closedness validation; throws ScenarioError.
void validate_symmetry(const SymmetrySpec& spec, int n, const ParamTable& params);

/// Gradient of a scalar phase-space function in the (dt, dq, dp) basis.
struct ScalarGradient {
    double value = 0.0;
    Vec d; // 2n+1 entries: t, q_1..q_n, p_1..p_n
};

struct GeneralizedResiduals {
    Vec residual_a; // covector components of L_zeta(alpha+beta) - df - gamma
    double residual_b = 0.0;
};

/// Precompiled symbolic partial tables for one symmetry over one system.
/// All evaluation methods are const and thread-safe.
class SymmetryEngine {
public:
    SymmetryEngine(SymmetrySpec spec, const MechSystem& sys);

    const SymmetrySpec& spec() const { return spec_; }
    int n() const { return n_; }

    /// Phase-space prolongation of (tau, xi) following the declared mode.
    PhaseVectorField prolong(const PhaseState& state) const;
    PhaseVectorField prolong(const PhaseState& state, const HamiltonianPoint& hp) const;

    /// L_zeta H - (sum_i p_i dxi_i/dt - H dtau/dt); zero at a point means the
    /// prolonged field is a Hamiltonian symmetry there.
    double invariance_residual(const PhaseState& state) const;
    double invariance_residual(const PhaseState& state, const HamiltonianPoint& hp) const;

    /// J = sum_i p_i xi_i - H tau + beta(zeta) - f (set include_gauge = false
    /// to drop the gauge term, which is the momentum-equation normalization).
    double noether(const PhaseState& state, bool include_gauge = true) const;
    double noether(const PhaseState& state, const HamiltonianPoint& hp,
                   bool include_gauge = true) const;

    /// J together with its exact gradient over (t,q,p).
    ScalarGradient noether_gradient(const PhaseState& state, const HamiltonianPoint& hp,
                                    bool include_gauge = true) const;

    /// Covector components of L_zeta(pdq - Hdt + beta) in the (dt,dq,dp) basis.
    Vec lie_derivative_poincare(const PhaseState& state, const HamiltonianPoint& hp) const;

    /// lie_derivative_poincare minus df.
    Vec weak_noether_residual(const PhaseState& state) const;
    Vec weak_noether_residual(const PhaseState& state, const HamiltonianPoint& hp) const;

    /// Residuals of the relaxed symmetry condition with a correction 1-form
    /// gamma and a perturbation P (dp components; dt, dq are zero):
    ///   residual_a = L_zeta(alpha+beta) - df - gamma,
    ///   residual_b = d alpha(P, zeta) + gamma(Z + P).
    GeneralizedResiduals generalized_residuals(const OneForm& gamma, const PhaseState& state,
                                               const PhaseVectorField& P) const;

    /// [Z, zeta] - c Z with c the dt component of the commutator; Z is the
    /// unperturbed Hamiltonian flow field. Zero when the prolonged field
    /// permutes unperturbed trajectories up to reparameterization.
    Vec bracket_defect(const PhaseState& state) const;

    /// tau, xi and the invariance residual transported to the Lagrangian side.
    double lagrangian_invariance_residual(double t, const Vec& q, const Vec& qdot) const;
    /// J = dL/dqdot . (xi - tau qdot) + L tau.
    double lagrangian_noether(double t, const Vec& q, const Vec& qdot) const;

    struct Tables; // precomputed symbolic partials (implementation detail)

private:
    const MechSystem& sys_;
    SymmetrySpec spec_;
    int n_ = 0;
    std::shared_ptr<const Tables> tables_;
};

// One-shot wrappers over SymmetryEngine matching the operation list.
PhaseVectorField prolong_full(const SymmetrySpec& spec, const MechSystem& sys,
                              const PhaseState& state);
/// Independent assembly of the tau = 0 lift (used to cross-check prolong).
PhaseVectorField cotangent_lift(const SymmetrySpec& spec, const MechSystem& sys,
                                const PhaseState& state);
double invariance_residual(const SymmetrySpec& spec, const MechSystem& sys,
                           const PhaseState& state);
double lagrangian_invariance_residual(const SymmetrySpec& spec, const MechSystem& sys, double t,
                                      const Vec& q, const Vec& qdot);
double noether_function(const SymmetrySpec& spec, const MechSystem& sys, const PhaseState& state);
double lagrangian_noether(const SymmetrySpec& spec, const MechSystem& sys, double t, const Vec& q,
                          const Vec& qdot);
Vec weak_noether_residual(const SymmetrySpec& spec, const MechSystem& sys,
                          const PhaseState& state);
GeneralizedResiduals generalized_symmetry_residuals(const SymmetrySpec& spec, const OneForm& gamma,
                                                    const MechSystem& sys, const PhaseState& state,
                                                    const PhaseVectorField& P);
Vec bracket_defect(const SymmetrySpec& spec, const MechSystem& sys, const PhaseState& state);

/// Contact nondegeneracy factor rho = p . H_p - H (diagnostic only).
double contact_factor(const MechSystem& sys, const PhaseState& state);

} // namespace nhsym
