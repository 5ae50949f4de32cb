#include "dynamics.hpp"

#include <cmath>

namespace nhsym {

namespace {

bool finite(const PhaseState& s) {
    return std::isfinite(s.t) && s.q.allFinite() && s.p.allFinite();
}

} // namespace

PhaseVectorField vector_field(const MechSystem& sys, const PhaseState& state) {
    HamiltonianPoint hp = sys.hamiltonian(state.t, state.q, state.p);
    MultiplierSolution sol = solve_multipliers(sys, state.t, state.q, state.p, hp);
    PhaseVectorField f;
    f.dq = hp.Hp;
    f.dp = -hp.Hq + sys.force_vector(state.t, state.q, state.p) + sol.reaction;
    f.lambda = sol.lambda;
    return f;
}

PhaseState project_to_manifold(const MechSystem& sys, const PhaseState& state,
                               const ProjectionOptions& opt) {
    PhaseState out = state;
    const int s = sys.holonomic_count();

    if (s > 0) {
        bool converged = false;
        for (int it = 0; it < opt.max_iterations; ++it) {
            Vec f = sys.holonomic_values(out.t, out.q);
            if (f.cwiseAbs().maxCoeff() <= opt.tol) {
                converged = true;
                break;
            }
            Mat J = sys.a_matrix(out.t, out.q).topRows(s); // df/dq rows
            Mat JJt = J * J.transpose();
            Eigen::LDLT<Mat> ldlt(JJt);
            if (ldlt.info() != Eigen::Success)
                throw IntegrationError("holonomic projection: degenerate constraint gradients");
            out.q += J.transpose() * ldlt.solve(-f);
        }
        if (!converged && sys.holonomic_values(out.t, out.q).cwiseAbs().maxCoeff() > opt.tol)
            throw IntegrationError("holonomic projection did not converge");
    }

    if (sys.k() > 0) {
        for (int it = 0; it < opt.max_iterations; ++it) {
            Vec g = momentum_residual(sys, out.t, out.q, out.p);
            if (g.cwiseAbs().maxCoeff() <= opt.tol)
                return out;
            Mat A = sys.a_matrix(out.t, out.q);
            check_row_rank(A);
            Mat W = sys.hamiltonian(out.t, out.q, out.p).Hpp;
            Eigen::LLT<Mat> llt(A * W * A.transpose());
            out.p -= A.transpose() * llt.solve(g);
        }
        if (momentum_residual(sys, out.t, out.q, out.p).cwiseAbs().maxCoeff() > opt.tol)
            throw IntegrationError("momentum projection did not converge");
    }
    return out;
}

Trajectory integrate(const MechSystem& sys, const PhaseState& initial, double h, int steps,
                     const IntegrateOptions& opt) {
    if (!(h > 0.0))
        throw IntegrationError("step size must be positive");
    if (!finite(initial))
        throw IntegrationError("initial state is not finite");
    double v0 = manifold_violation(sys, initial.t, initial.q, initial.p);
    if (v0 > opt.manifold_tol)
        throw IntegrationError("initial state violates the constraints by " + std::to_string(v0));

    Trajectory traj;
    traj.h = h;
    traj.projection = opt.projection;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);

    auto lambda_at = [&](const PhaseState& s) {
        return solve_multipliers(sys, s.t, s.q, s.p).lambda;
    };

    PhaseState cur = initial;
    traj.samples.push_back({cur, lambda_at(cur), v0});

    for (int step = 0; step < steps; ++step) {
        const double t = cur.t;
        PhaseVectorField k1 = vector_field(sys, cur);
        PhaseState s2{t + 0.5 * h, cur.q + 0.5 * h * k1.dq, cur.p + 0.5 * h * k1.dp};
        PhaseVectorField k2 = vector_field(sys, s2);
        PhaseState s3{t + 0.5 * h, cur.q + 0.5 * h * k2.dq, cur.p + 0.5 * h * k2.dp};
        PhaseVectorField k3 = vector_field(sys, s3);
        PhaseState s4{t + h, cur.q + h * k3.dq, cur.p + h * k3.dp};
        PhaseVectorField k4 = vector_field(sys, s4);

        PhaseState next;
        next.t = t + h;
        next.q = cur.q + (h / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
        next.p = cur.p + (h / 6.0) * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
        if (!finite(next))
            throw IntegrationError("state became non-finite at t = " + std::to_string(next.t));

        double drift = manifold_violation(sys, next.t, next.q, next.p);
        if (opt.projection)
            next = project_to_manifold(sys, next, opt.project);
        traj.samples.push_back({next, lambda_at(next), drift});
        cur = next;
    }
    return traj;
}

} // namespace nhsym
