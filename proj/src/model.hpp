#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "expr.hpp"

namespace nhsym {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Natural Lagrangian L = 1/2 qdot^T M(t,q) qdot + b(t,q).qdot - V(t,q).
// Only the upper triangle of M is stored; symmetry is exact by construction.
struct NaturalLagrangian {
    int n = 0;
    std::vector<ExprPtr> mass_upper; // row-major upper triangle, n(n+1)/2 entries
    std::vector<ExprPtr> coupling;   // b, n entries
    ExprPtr potential;               // V

    const ExprPtr& mass(int i, int j) const;
    ExprPtr& mass_ref(int i, int j);

    /// Identity-structure Lagrangian with all entries zero/defaulted.
    static NaturalLagrangian make(int n);
};

/// Generalized nonconservative force; components may depend on (t,q,p).
struct Force {
    std::vector<ExprPtr> components;
    static Force zero(int n);
};

/// One scalar constraint row in velocity form a0 + sum_i a_i qdot_i = 0.
/// Holonomic rows keep their position-level f and derive (a0, a) from it.
struct ConstraintRow {
    enum class Kind { Holonomic, Kinematic };
    Kind kind = Kind::Kinematic;
    ExprPtr position; // f(t,q), holonomic rows only
    ExprPtr a0;
    std::vector<ExprPtr> a;

    static ConstraintRow holonomic(ExprPtr f, int n);
    static ConstraintRow kinematic(ExprPtr a0, std::vector<ExprPtr> a);
};

/// a0 = df/dt, a_i = df/dq_i.
std::pair<ExprPtr, std::vector<ExprPtr>> holonomic_to_velocity_row(const ExprPtr& f, int n);

/// H = p.qdot - L at qdot = M^{-1}(p - b): 1/2 (p-b)^T M^{-1} (p-b) + V,
/// built with a closed-form adjugate inverse. Supported for n <= 4.
ExprPtr legendre_to_hamiltonian(const NaturalLagrangian& lag);

/// H and its exact partials at one phase-space point.
struct HamiltonianPoint {
    double H = 0.0;
    double Ht = 0.0;
    Vec Hq, Hp;
    Mat Hpp;      // d2H/dp_i dp_j
    Mat Hpq;      // (i,j) = d2H/dp_i dq_j
    Vec Hpt;      // d2H/dp_i dt
    Mat Hqq;      // d2H/dq_i dq_j
    Vec Hqt;      // d2H/dq_i dt
};

/// L and its exact partials at one velocity-space point.
struct LagrangianPoint {
    double L = 0.0;
    double Lt = 0.0;
    Vec Lq;    // dL/dq_i
    Vec Lqdot; // dL/dqdot_i = M qdot + b
};

enum class HamiltonianBackend {
    Auto,         // symbolic for n <= 4, semi-symbolic otherwise
    Symbolic,     // H and all partials as expression trees
    SemiSymbolic, // numeric M^{-1} plus matrix-calculus identities
};

class MechSystem {
public:
    MechSystem(NaturalLagrangian lag, Force force, std::vector<ConstraintRow> rows,
               ParamTable params, HamiltonianBackend backend = HamiltonianBackend::Auto);

    int n() const { return n_; }
    int k() const { return static_cast<int>(rows_.size()); }
    int holonomic_count() const { return s_; }

    const NaturalLagrangian& lagrangian() const { return lag_; }
    const Force& force() const { return force_; }
    const std::vector<ConstraintRow>& rows() const { return rows_; }
    const ParamTable& params() const { return params_; }
    HamiltonianBackend backend() const { return backend_; }

    Bindings bind(double t, const Vec& q, const Vec& p) const;
    Bindings bind_config(double t, const Vec& q) const; // (t,q)-only expressions

    /// Evaluate H with exact partials up to second order. Checks that M is
    /// positive definite at the point (ModelError otherwise).
    HamiltonianPoint hamiltonian(double t, const Vec& q, const Vec& p) const;

    /// The symbolic Hamiltonian; available when the symbolic backend is active.
    ExprPtr hamiltonian_expr() const;

    LagrangianPoint lagrangian_point(double t, const Vec& q, const Vec& qdot) const;
    double lagrangian_value(double t, const Vec& q, const Vec& qdot) const;

    Mat mass_matrix(double t, const Vec& q) const;
    Vec coupling_vector(double t, const Vec& q) const;
    /// p = M qdot + b
    Vec momentum_of_velocity(double t, const Vec& q, const Vec& qdot) const;
    /// qdot = H_p(t,q,p)
    Vec velocity_of_momentum(double t, const Vec& q, const Vec& p) const;

    /// Nonconservative force components at a phase-space point.
    Vec force_vector(double t, const Vec& q, const Vec& p) const;

    // Constraint coefficient evaluation (velocity form).
    Mat a_matrix(double t, const Vec& q) const;   // k x n
    Vec a0_vector(double t, const Vec& q) const;  // k
    Vec holonomic_values(double t, const Vec& q) const; // s entries f^l(t,q)

    /// Coefficient partials needed by the multiplier solve.
    struct RowPartials {
        Vec a0;   // k
        Mat A;    // k x n
        Vec a0_t; // k
        Mat a0_q; // k x n
        Mat A_t;  // k x n, (l,i) = d a_li / dt
        std::vector<Mat> A_q; // per row l: (i,j) = d a_li / dq_j
    };
    RowPartials row_partials(double t, const Vec& q) const;

private:
    struct NaturalTables;     // symbolic partials of M, b, V
    struct SymbolicH;         // H and partial trees
    struct RowTables;         // symbolic partials of constraint coefficients

    void check_mass_positive_definite(const Mat& m) const;
    HamiltonianPoint hamiltonian_symbolic(const Bindings& b) const;
    HamiltonianPoint hamiltonian_semisymbolic(double t, const Vec& q, const Vec& p) const;

    NaturalLagrangian lag_;
    Force force_;
    std::vector<ConstraintRow> rows_;
    ParamTable params_;
    int n_ = 0;
    int s_ = 0;
    HamiltonianBackend backend_ = HamiltonianBackend::Auto;
    std::shared_ptr<const NaturalTables> tables_;
    std::shared_ptr<const SymbolicH> symbolic_;
    std::shared_ptr<const RowTables> row_tables_;
};

// Small helpers shared by the numeric modules.
Vec eval_vector(const std::vector<ExprPtr>& exprs, const Bindings& b);
std::string coord_name(int i);    // 1-based -> "q<i>"
std::string momentum_name(int i); // 1-based -> "p<i>"

} // namespace nhsym
