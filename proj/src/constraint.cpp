#include "constraint.hpp"

#include <cmath>
#include <string>

#include "rng.hpp"

namespace nhsym {

namespace {

constexpr double kRankThreshold = 1e-8;
constexpr double kConditionLimit = 1e12;

Mat inverse_mass(const MechSystem& sys, double t, const Vec& q) {
    Mat M = sys.mass_matrix(t, q);
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw ModelError("mass matrix is not positive definite at this point");
    return llt.solve(Mat::Identity(sys.n(), sys.n()));
}

} // namespace

Vec velocity_residual(const MechSystem& sys, double t, const Vec& q, const Vec& qdot) {
    if (sys.k() == 0)
        return Vec(0);
    return sys.a0_vector(t, q) + sys.a_matrix(t, q) * qdot;
}

Vec momentum_residual(const MechSystem& sys, double t, const Vec& q, const Vec& p) {
    if (sys.k() == 0)
        return Vec(0);
    return sys.a0_vector(t, q) + sys.a_matrix(t, q) * sys.velocity_of_momentum(t, q, p);
}

double manifold_violation(const MechSystem& sys, double t, const Vec& q, const Vec& p) {
    double worst = 0.0;
    if (sys.holonomic_count() > 0)
        worst = sys.holonomic_values(t, q).cwiseAbs().maxCoeff();
    if (sys.k() > 0)
        worst = std::max(worst, momentum_residual(sys, t, q, p).cwiseAbs().maxCoeff());
    return worst;
}

void check_row_rank(const Mat& A) {
    if (A.rows() == 0)
        return;
    if (A.rows() > A.cols())
        throw ModelError("more constraint rows than degrees of freedom");
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= kRankThreshold * sv(0))
        throw ModelError("constraint rows are rank deficient at this point "
                         "(singular value ratio " +
                         std::to_string(sv(sv.size() - 1) / sv(0)) + ")");
}

AdmissibleMomentumChart admissible_chart(const MechSystem& sys, double t, const Vec& q) {
    const int n = sys.n();
    const int k = sys.k();
    AdmissibleMomentumChart chart;
    if (k == 0) {
        chart.p_star = Vec::Zero(n);
        chart.basis = Mat::Identity(n, n);
        return chart;
    }
    Mat A = sys.a_matrix(t, q);
    check_row_rank(A);
    Mat W = inverse_mass(sys, t, q);
    Vec b = sys.coupling_vector(t, q);
    Vec a0 = sys.a0_vector(t, q);

    // g(p) = a0 + A W (p - b) = 0  <=>  (A W) p = A W b - a0
    Mat B = A * W;
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
    chart.p_star = svd.solve(A * W * b - a0);
    chart.basis = svd.matrixV().rightCols(n - k);
    return chart;
}

MultiplierSolution solve_multipliers(const MechSystem& sys, double t, const Vec& q, const Vec& p) {
    if (sys.k() == 0) {
        MultiplierSolution sol;
        sol.lambda = Vec(0);
        sol.reaction = Vec::Zero(sys.n());
        sol.conditioning = 1.0;
        return sol;
    }
    return solve_multipliers(sys, t, q, p, sys.hamiltonian(t, q, p));
}

MultiplierSolution solve_multipliers(const MechSystem& sys, double t, const Vec& q, const Vec& p,
                                     const HamiltonianPoint& hp) {
    const int n = sys.n();
    const int k = sys.k();
    MultiplierSolution sol;
    if (k == 0) {
        sol.lambda = Vec(0);
        sol.reaction = Vec::Zero(n);
        sol.conditioning = 1.0;
        return sol;
    }

    MechSystem::RowPartials rp = sys.row_partials(t, q);
    check_row_rank(rp.A);

    // d/dt g = g_t + g_q . H_p + (A H_pp) . pdot must vanish with
    // pdot = -H_q + F + A^T lambda.
    Vec g_t = rp.a0_t + rp.A_t * hp.Hp + rp.A * hp.Hpt;
    Mat g_q(k, n);
    for (int l = 0; l < k; ++l)
        for (int j = 0; j < n; ++j) {
            double v = rp.a0_q(l, j);
            for (int i = 0; i < n; ++i)
                v += rp.A_q[static_cast<std::size_t>(l)](i, j) * hp.Hp(i) + rp.A(l, i) * hp.Hpq(i, j);
            g_q(l, j) = v;
        }

    Mat AH = rp.A * hp.Hpp;
    Mat S = AH * rp.A.transpose();
    Vec F = sys.force_vector(t, q, p);
    Vec rhs = -(g_t + g_q * hp.Hp + AH * (-hp.Hq + F));

    Eigen::SelfAdjointEigenSolver<Mat> es(S);
    double lo = es.eigenvalues().cwiseAbs().minCoeff();
    double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    sol.conditioning = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(sol.conditioning < kConditionLimit)) {
        std::string rows;
        for (int l = 0; l < k; ++l)
            rows += (l ? ", " : "") + std::to_string(l + 1);
        throw ModelError("multiplier solve matrix is singular or ill conditioned "
                         "(condition estimate " +
                         std::to_string(sol.conditioning) + ", rows " + rows + ")");
    }
    sol.lambda = Eigen::LLT<Mat>(S).solve(rhs);
    sol.reaction = rp.A.transpose() * sol.lambda;
    return sol;
}

DisplacementResidual in_virtual_displacements(const MechSystem& sys, double t, const Vec& q,
                                              const Vec& xi, double tol) {
    DisplacementResidual out;
    out.residual = sys.k() == 0 ? 0.0 : (sys.a_matrix(t, q) * xi).cwiseAbs().maxCoeff();
    out.pass = out.residual <= tol;
    return out;
}

DisplacementResidual in_admissible_hatV(const MechSystem& sys, double t, const Vec& q, double tau,
                                        const Vec& xi, double tol) {
    DisplacementResidual out;
    out.residual =
        sys.k() == 0
            ? 0.0
            : (sys.a0_vector(t, q) * tau + sys.a_matrix(t, q) * xi).cwiseAbs().maxCoeff();
    out.pass = out.residual <= tol;
    return out;
}

MembershipVerdict in_reaction_annihilator(const MechSystem& sys, double t, const Vec& q,
                                          double tau, const Vec& xi,
                                          const MembershipOptions& opt) {
    MembershipVerdict verdict;
    verdict.pass = true;
    if (sys.k() == 0)
        return verdict; // no reactions, the whole tangent space annihilates them

    AdmissibleMomentumChart chart = admissible_chart(sys, t, q);
    Rng rng(opt.seed);
    const int free_dims = static_cast<int>(chart.basis.cols());
    const int samples = free_dims == 0 ? 1 : opt.samples;
    for (int s = 0; s < samples; ++s) {
        Vec c(free_dims);
        for (int i = 0; i < free_dims; ++i)
            c(i) = opt.radius * rng.normal();
        Vec p = chart.p_star + chart.basis * c;
        HamiltonianPoint hp = sys.hamiltonian(t, q, p);
        MultiplierSolution sol = solve_multipliers(sys, t, q, p, hp);
        double raw = sol.reaction.dot(xi - tau * hp.Hp);
        double normalized = std::abs(raw) / (1.0 + sol.reaction.norm());
        ++verdict.samples;
        if (normalized > verdict.worst) {
            verdict.worst = normalized;
            verdict.worst_raw = raw;
        }
        if (normalized > opt.tol)
            verdict.pass = false;
    }
    return verdict;
}

} // namespace nhsym
