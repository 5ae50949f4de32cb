#pragma once

#include <cstdint>

#include "model.hpp"

namespace nhsym {

/// Lagrange multipliers and the reaction force R = A^T lambda at one point.
struct MultiplierSolution {
    Vec lambda;          // k entries
    Vec reaction;        // n entries
    double conditioning; // condition estimate of A H_pp A^T
};

/// Affine parameterization of the admissible momenta at fixed (t,q):
/// every p = p_star + basis c satisfies the momentum-level constraints.
struct AdmissibleMomentumChart {
    Vec p_star;
    Mat basis; // n x (n-k), orthonormal columns
};

struct DisplacementResidual {
    bool pass = false;
    double residual = 0.0;
};

/// Seeded sampling settings for reaction-annihilator membership.
struct MembershipOptions {
    int samples = 64;
    double radius = 10.0;
    double tol = 1e-8;
    std::uint64_t seed = 0x5eed0001ull;
};

struct MembershipVerdict {
    bool pass = false;
    double worst = 0.0;     // worst residual normalized by (1 + |R|)
    double worst_raw = 0.0; // the same sample, unnormalized
    int samples = 0;
};

/// r^l = a0^l + sum_i a_i^l qdot_i.
Vec velocity_residual(const MechSystem& sys, double t, const Vec& q, const Vec& qdot);

/// g^l(t,q,p) = a0^l + sum_i a_i^l dH/dp_i.
Vec momentum_residual(const MechSystem& sys, double t, const Vec& q, const Vec& p);

/// Largest holonomic/momentum constraint violation at a point (infinity norm).
double manifold_violation(const MechSystem& sys, double t, const Vec& q, const Vec& p);

/// Verify rank(A) == k with the smallest singular value above 1e-8 times the
/// largest; hard ModelError otherwise.
void check_row_rank(const Mat& A);

AdmissibleMomentumChart admissible_chart(const MechSystem& sys, double t, const Vec& q);

MultiplierSolution solve_multipliers(const MechSystem& sys, double t, const Vec& q, const Vec& p);
MultiplierSolution solve_multipliers(const MechSystem& sys, double t, const Vec& q, const Vec& p,
                                     const HamiltonianPoint& hp);

/// xi against the homogeneous rows: sum_i a_i^l xi_i = 0.
DisplacementResidual in_virtual_displacements(const MechSystem& sys, double t, const Vec& q,
                                              const Vec& xi, double tol = 1e-8);

/// (tau, xi) against the affine rows: a0^l tau + sum_i a_i^l xi_i = 0.
DisplacementResidual in_admissible_hatV(const MechSystem& sys, double t, const Vec& q, double tau,
                                        const Vec& xi, double tol = 1e-8);

/// Sampled falsification test of sum_i R_i (xi_i - dH/dp_i tau) = 0 over the
/// admissible momenta at (t,q). A pass is a sampled verdict, not a proof.
MembershipVerdict in_reaction_annihilator(const MechSystem& sys, double t, const Vec& q,
                                          double tau, const Vec& xi,
                                          const MembershipOptions& opt = {});

} // namespace nhsym
