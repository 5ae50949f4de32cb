#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "rng.hpp"

namespace nhsym {

namespace {

std::vector<std::size_t> strided_indices(std::size_t total, int max_points) {
    std::vector<std::size_t> idx;
    if (total == 0)
        return idx;
    std::size_t count = std::min<std::size_t>(total, static_cast<std::size_t>(max_points));
    for (std::size_t i = 0; i < count; ++i)
        idx.push_back(i * (total - 1) / (count > 1 ? count - 1 : 1));
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

PhaseState sample_on_manifold(const MechSystem& sys, const SampleWindow& window, Rng& rng) {
    PhaseState s;
    s.t = rng.uniform(window.t0, window.t1);
    const int n = sys.n();
    s.q = Vec(n);
    for (int i = 0; i < n; ++i)
        s.q(i) = (window.q_center.size() == n ? window.q_center(i) : 0.0) + rng.uniform(-1.0, 1.0);
    s.p = Vec::Zero(n);
    if (sys.holonomic_count() > 0)
        s = project_to_manifold(sys, s);
    AdmissibleMomentumChart chart = admissible_chart(sys, s.t, s.q);
    Vec c(chart.basis.cols());
    for (int i = 0; i < c.size(); ++i)
        c(i) = window.momentum_radius * rng.normal();
    s.p = chart.p_star + chart.basis * c;
    return s;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

} // namespace

bool Report::all_pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const CheckResult& c) { return c.pass; });
}

std::string render_text(const Report& report) {
    std::ostringstream out;
    out << "scenario: " << report.scenario << "\n";
    for (const auto& e : report.entries) {
        out << "  [" << (e.pass ? "pass" : "FAIL") << "] " << e.name
            << "  residual=" << fmt_double(e.max_residual) << " tol=" << fmt_double(e.tolerance)
            << " samples=" << e.samples << "\n";
        out << "         " << e.statement << "\n";
        if (!e.note.empty())
            out << "         " << e.note << "\n";
    }
    for (const auto& d : report.drifts)
        out << "  drift " << d.label << ": J0=" << fmt_double(d.initial)
            << " abs=" << fmt_double(d.abs_drift) << " rel=" << fmt_double(d.rel_drift) << "\n";
    out << "  constraint drift (pre-projection max): " << fmt_double(report.max_constraint_drift)
        << "\n";
    out << "  energy: H0=" << fmt_double(report.energy_initial)
        << " abs drift=" << fmt_double(report.energy_abs_drift)
        << " rel drift=" << fmt_double(report.energy_rel_drift) << "\n";
    out << "  overall: " << (report.all_pass() ? "pass" : "FAIL") << "\n";
    return out.str();
}

std::string render_json(const Report& report) {
    nlohmann::json j;
    j["scenario"] = report.scenario;
    j["pass"] = report.all_pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& e : report.entries) {
        j["checks"].push_back({{"name", e.name},
                               {"statement", e.statement},
                               {"pass", e.pass},
                               {"max_residual", e.max_residual},
                               {"tolerance", e.tolerance},
                               {"samples", e.samples},
                               {"note", e.note}});
    }
    j["drifts"] = nlohmann::json::array();
    for (const auto& d : report.drifts)
        j["drifts"].push_back({{"label", d.label},
                               {"initial", d.initial},
                               {"abs", d.abs_drift},
                               {"rel", d.rel_drift}});
    j["constraint_drift"] = report.max_constraint_drift;
    j["energy"] = {{"initial", report.energy_initial},
                   {"abs_drift", report.energy_abs_drift},
                   {"rel_drift", report.energy_rel_drift}};
    return j.dump(2) + "\n";
}

void summarize_trajectory(const MechSystem& sys, const Trajectory& traj, Report& report) {
    double worst = 0.0;
    for (const auto& s : traj.samples)
        worst = std::max(worst, s.constraint_drift);
    report.max_constraint_drift = worst;

    if (traj.samples.empty())
        return;
    const PhaseState& first = traj.samples.front().state;
    double h0 = sys.hamiltonian(first.t, first.q, first.p).H;
    double habs = 0.0;
    for (const auto& s : traj.samples)
        habs = std::max(habs,
                        std::abs(sys.hamiltonian(s.state.t, s.state.q, s.state.p).H - h0));
    report.energy_initial = h0;
    report.energy_abs_drift = habs;
    report.energy_rel_drift = habs / std::max(1.0, std::abs(h0));
}

std::vector<CheckResult> momentum_equation_report(const MechSystem& sys,
                                                  const SymmetryEngine& engine,
                                                  const Trajectory& traj,
                                                  const VerifyTolerances& tol) {
    double worst_full = 0.0, worst_reduced = 0.0;
    int count = 0;
    for (const auto& sample : traj.samples) {
        const PhaseState& s = sample.state;
        HamiltonianPoint hp = sys.hamiltonian(s.t, s.q, s.p);
        MultiplierSolution sol = solve_multipliers(sys, s.t, s.q, s.p, hp);
        Vec F = sys.force_vector(s.t, s.q, s.p);

        ScalarGradient dj = engine.noether_gradient(s, hp, /*include_gauge=*/false);
        const int n = sys.n();
        Vec dq = hp.Hp;
        Vec dp = -hp.Hq + F + sol.reaction;
        double lhs = dj.d(0) + dj.d.segment(1, n).dot(dq) + dj.d.segment(n + 1, n).dot(dp);

        PhaseVectorField zeta = engine.prolong(s, hp);
        Vec displacement = zeta.dq - zeta.dt * hp.Hp;
        worst_full = std::max(worst_full, std::abs(lhs - (F + sol.reaction).dot(displacement)));
        worst_reduced = std::max(worst_reduced, std::abs(lhs - F.dot(displacement)));
        ++count;
    }
    const std::string label = engine.spec().label;
    std::vector<CheckResult> out;
    out.push_back({"momentum.full[" + label + "]",
                   "dJ/dt = sum_i (F_i + R_i)(xi_i - qdot_i tau) pointwise along the flow",
                   worst_full <= tol.pointwise, worst_full, tol.pointwise, count, ""});
    out.push_back({"momentum.reduced[" + label + "]",
                   "dJ/dt = sum_i F_i (xi_i - qdot_i tau), valid under "
                   "reaction-annihilator membership",
                   worst_reduced <= tol.pointwise, worst_reduced, tol.pointwise, count, ""});
    return out;
}

CheckResult conservation_report(const MechSystem& sys, const SymmetryEngine& engine,
                                const Trajectory& traj, const VerifyTolerances& tol,
                                SymmetryDrift* drift_out) {
    (void)sys;
    double j0 = engine.noether(traj.samples.front().state);
    double abs_drift = 0.0;
    for (const auto& sample : traj.samples)
        abs_drift = std::max(abs_drift, std::abs(engine.noether(sample.state) - j0));
    double rel = abs_drift / std::max(1.0, std::abs(j0));
    if (drift_out)
        *drift_out = {engine.spec().label, j0, abs_drift, rel};
    return {"conservation[" + engine.spec().label + "]",
            "J = sum_i p_i xi_i - H tau + beta(zeta) - f is constant along the flow",
            rel <= tol.conservation_rel, rel, tol.conservation_rel,
            static_cast<int>(traj.samples.size()), "relative drift, J(0)=" + fmt_double(j0)};
}

CheckResult invariance_report(const MechSystem& sys, const SymmetryEngine& engine,
                              const SampleWindow& window, int states, std::uint64_t seed,
                              const VerifyTolerances& tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < states; ++i) {
        PhaseState s = sample_on_manifold(sys, window, rng);
        worst = std::max(worst, std::abs(engine.invariance_residual(s)));
    }
    return {"invariance[" + engine.spec().label + "]",
            "L_zeta H = sum_i p_i dxi_i/dt - H dtau/dt at admissible states",
            worst <= tol.invariance, worst, tol.invariance, states, ""};
}

CheckResult membership_report(const MechSystem& sys, const SymmetryEngine& engine,
                              const Trajectory& traj, const MembershipOptions& opt,
                              int max_points) {
    double worst = 0.0;
    double worst_rows = 0.0;
    bool pass = true;
    int points = 0;
    for (std::size_t idx : strided_indices(traj.samples.size(), max_points)) {
        const PhaseState& s = traj.samples[idx].state;
        HamiltonianPoint hp = sys.hamiltonian(s.t, s.q, s.p);
        PhaseVectorField zeta = engine.prolong(s, hp);
        MembershipVerdict v = in_reaction_annihilator(sys, s.t, s.q, zeta.dt, zeta.dq, opt);
        pass = pass && v.pass;
        worst = std::max(worst, v.worst);
        worst_rows = std::max(
            worst_rows, in_admissible_hatV(sys, s.t, s.q, zeta.dt, zeta.dq, opt.tol).residual);
        ++points;
    }
    return {"membership[" + engine.spec().label + "]",
            "sum_i R_i (xi_i - dH/dp_i tau) = 0 for all admissible momenta along the trajectory",
            pass, worst, opt.tol, points,
            "affine row residual a0 tau + A xi: " + fmt_double(worst_rows)};
}

CheckResult gyroscopic_check(const MechSystem& sys, const SampleWindow& window, int samples,
                             std::uint64_t seed, const VerifyTolerances& tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        PhaseState s = sample_on_manifold(sys, window, rng);
        HamiltonianPoint hp = sys.hamiltonian(s.t, s.q, s.p);
        Vec F = sys.force_vector(s.t, s.q, s.p);
        double power = std::abs(F.dot(hp.Hp)) / (1.0 + F.norm() * hp.Hp.norm());
        worst = std::max(worst, power);
    }
    return {"gyroscopic",
            "sum_i F_i dH/dp_i = 0: the nonconservative force does no work along the flow",
            worst <= tol.pointwise, worst, tol.pointwise, samples, ""};
}

std::vector<CheckResult> subset_check(const MechSystem& sys, const SampleWindow& window,
                                      int directions, const MembershipOptions& opt,
                                      std::uint64_t seed) {
    Rng rng(seed);
    const int n = sys.n();
    const int k = sys.k();
    std::vector<CheckResult> out;
    if (k == 0) {
        out.push_back({"subset.inclusion",
                       "directions solving a0 tau + A xi = 0 annihilate the reaction force",
                       true, 0.0, opt.tol, 0, "no constraint rows: vacuous"});
        return out;
    }

    double worst = 0.0;
    bool pass = true;
    double control_worst = 0.0;
    int control_count = 0;
    int control_failures = 0;

    for (int d = 0; d < directions; ++d) {
        PhaseState s = sample_on_manifold(sys, window, rng);
        Mat aug(k, n + 1);
        aug.col(0) = sys.a0_vector(s.t, s.q);
        aug.rightCols(n) = sys.a_matrix(s.t, s.q);
        Eigen::JacobiSVD<Mat> svd(aug, Eigen::ComputeFullV);
        Mat null_basis = svd.matrixV().rightCols(n + 1 - k);
        Vec coeff(n + 1 - k);
        for (int i = 0; i < coeff.size(); ++i)
            coeff(i) = rng.normal();
        Vec dir = null_basis * coeff;
        double tau = dir(0);
        Vec xi = dir.tail(n);
        MembershipVerdict v = in_reaction_annihilator(sys, s.t, s.q, tau, xi, opt);
        pass = pass && v.pass;
        worst = std::max(worst, v.worst);

        // control: push xi off the row equations along a reaction-active
        // combination and expect the membership test to fail
        MultiplierSolution probe = solve_multipliers(sys, s.t, s.q, s.p);
        if (probe.lambda.cwiseAbs().maxCoeff() > 1e-3) {
            Mat A = sys.a_matrix(s.t, s.q);
            int row = 0;
            probe.lambda.cwiseAbs().maxCoeff(&row);
            Vec push = A.transpose() *
                       (A * A.transpose()).llt().solve(Vec::Unit(k, row));
            MembershipVerdict cv =
                in_reaction_annihilator(sys, s.t, s.q, tau, xi + 1e-2 * push, opt);
            ++control_count;
            if (!cv.pass)
                ++control_failures;
            control_worst = std::max(control_worst, cv.worst);
        }
    }

    std::vector<CheckResult> results;
    results.push_back({"subset.inclusion",
                       "directions solving a0 tau + A xi = 0 annihilate the reaction force",
                       pass, worst, opt.tol, directions, ""});
    // residual here is the fraction of perturbed controls that were NOT
    // detected; a working falsification test drives it to zero
    double undetected =
        control_count == 0
            ? 1.0
            : static_cast<double>(control_count - control_failures) / control_count;
    results.push_back({"subset.control",
                       "a 1e-2 perturbation off the row equations is detected when "
                       "reactions are active (residual = undetected fraction)",
                       control_count > 0 && control_failures == control_count, undetected,
                       1e-9, control_count,
                       control_count == 0
                           ? "reactions inactive at all sampled states"
                           : "worst control membership residual " + fmt_double(control_worst)});
    return results;
}

std::vector<CheckResult> moving_energy_report(const MechSystem& sys, const SymmetryEngine& engine,
                                              const std::vector<ExprPtr>& xi0,
                                              const Trajectory& traj,
                                              const MembershipOptions& opt,
                                              const VerifyTolerances& tol,
                                              SymmetryDrift* drift_out) {
    const SymmetrySpec& spec = engine.spec();
    if (!(is_constant(*spec.tau) && const_value(*spec.tau) == 1.0))
        throw ScenarioError("moving-energy check requires tau identically 1");
    if (xi0.size() != static_cast<std::size_t>(sys.n()))
        throw ScenarioError("xi0 arity does not match dimension");

    const int n = sys.n();
    double worst_adm = 0.0;
    for (std::size_t idx : strided_indices(traj.samples.size(), 16)) {
        const PhaseState& s = traj.samples[idx].state;
        Vec x0 = eval_vector(xi0, sys.bind_config(s.t, s.q));
        worst_adm = std::max(worst_adm,
                             velocity_residual(sys, s.t, s.q, x0).cwiseAbs().maxCoeff());
    }
    if (worst_adm > 1e-8)
        throw ScenarioError("xi0 is not a section of the affine velocity distribution "
                            "(worst residual " +
                            fmt_double(worst_adm) + ")");

    bool member_pass = true;
    double member_worst = 0.0;
    int points = 0;
    for (std::size_t idx : strided_indices(traj.samples.size(), 64)) {
        const PhaseState& s = traj.samples[idx].state;
        Bindings bind = sys.bind_config(s.t, s.q);
        Vec x0 = eval_vector(xi0, bind);
        Vec xi(n);
        for (int i = 0; i < n; ++i)
            xi(i) = eval(spec.xi[static_cast<std::size_t>(i)], bind);
        MembershipVerdict v = in_reaction_annihilator(sys, s.t, s.q, 0.0, xi - x0, opt);
        member_pass = member_pass && v.pass;
        member_worst = std::max(member_worst, v.worst);
        ++points;
    }

    double j0 = engine.noether(traj.samples.front().state);
    double abs_drift = 0.0;
    for (const auto& sample : traj.samples)
        abs_drift = std::max(abs_drift, std::abs(engine.noether(sample.state) - j0));
    double rel = abs_drift / std::max(1.0, std::abs(j0));
    if (drift_out)
        *drift_out = {engine.spec().label, j0, abs_drift, rel};

    std::vector<CheckResult> out;
    out.push_back({"moving_energy.membership[" + spec.label + "]",
                   "xi - xi0 annihilates the reaction force for all admissible momenta",
                   member_pass, member_worst, opt.tol, points, ""});
    out.push_back({"moving_energy.conservation[" + spec.label + "]",
                   "J = sum_j xi_j p_j - H is constant along the flow", rel <= tol.conservation_rel,
                   rel, tol.conservation_rel, static_cast<int>(traj.samples.size()),
                   "relative drift, J(0)=" + fmt_double(j0)});
    return out;
}

CheckResult weak_noether_report(const MechSystem& sys, const SymmetryEngine& engine,
                                const Trajectory& traj, const VerifyTolerances& tol,
                                int max_points) {
    (void)sys;
    double worst = 0.0;
    int points = 0;
    for (std::size_t idx : strided_indices(traj.samples.size(), max_points)) {
        const PhaseState& s = traj.samples[idx].state;
        worst = std::max(worst,
                         engine.weak_noether_residual(s).cwiseAbs().maxCoeff());
        ++points;
    }
    return {"weak_noether[" + engine.spec().label + "]",
            "L_zeta(p dq - H dt + beta) = df componentwise along the trajectory",
            worst <= tol.pointwise, worst, tol.pointwise, points, ""};
}

std::vector<CheckResult> generalized_report(const MechSystem& sys, const SymmetryEngine& engine,
                                            const OneForm& gamma, const Trajectory& traj,
                                            const VerifyTolerances& tol, int max_points) {
    double worst_a = 0.0, worst_b = 0.0;
    int points = 0;
    for (std::size_t idx : strided_indices(traj.samples.size(), max_points)) {
        const PhaseState& s = traj.samples[idx].state;
        HamiltonianPoint hp = sys.hamiltonian(s.t, s.q, s.p);
        MultiplierSolution sol = solve_multipliers(sys, s.t, s.q, s.p, hp);
        PhaseVectorField P;
        P.dt = 0.0;
        P.dq = Vec::Zero(sys.n());
        P.dp = sys.force_vector(s.t, s.q, s.p) + sol.reaction;
        GeneralizedResiduals g = engine.generalized_residuals(gamma, s, P);
        worst_a = std::max(worst_a, g.residual_a.cwiseAbs().maxCoeff());
        worst_b = std::max(worst_b, std::abs(g.residual_b));
        ++points;
    }
    const std::string label = engine.spec().label;
    std::vector<CheckResult> out;
    out.push_back({"generalized.form[" + label + "]",
                   "L_zeta(alpha + beta) = df + gamma componentwise along the trajectory",
                   worst_a <= tol.pointwise, worst_a, tol.pointwise, points, ""});
    out.push_back({"generalized.pairing[" + label + "]",
                   "d alpha(P, zeta) + gamma(Z + P) = 0 along the trajectory",
                   worst_b <= tol.pointwise, worst_b, tol.pointwise, points, ""});
    return out;
}

CheckResult bracket_report(const MechSystem& sys, const SymmetryEngine& engine,
                           const Trajectory& traj, const VerifyTolerances& tol, int max_points) {
    (void)sys;
    double worst = 0.0;
    int points = 0;
    for (std::size_t idx : strided_indices(traj.samples.size(), max_points)) {
        worst = std::max(worst,
                         engine.bracket_defect(traj.samples[idx].state).cwiseAbs().maxCoeff());
        ++points;
    }
    return {"bracket[" + engine.spec().label + "]",
            "[Z, zeta] is proportional to Z: the flow maps trajectories to trajectories",
            worst <= tol.pointwise, worst, tol.pointwise, points, ""};
}

double multiplier_oracle_check(const MechSystem& sys, const PhaseState& state, double h_fd) {
    const int k = sys.k();
    if (k == 0)
        return 0.0;

    HamiltonianPoint hp = sys.hamiltonian(state.t, state.q, state.p);
    Vec F = sys.force_vector(state.t, state.q, state.p);
    Mat A = sys.a_matrix(state.t, state.q);
    Vec base_dp = -hp.Hq + F;
    Vec q_next = state.q + h_fd * hp.Hp;
    double t_next = state.t + h_fd;

    // residual of one explicit Euler step as an affine function of lambda
    auto step_residual = [&](const Vec& lambda) {
        Vec p_next = state.p + h_fd * (base_dp + A.transpose() * lambda);
        return momentum_residual(sys, t_next, q_next, p_next);
    };
    Vec phi0 = step_residual(Vec::Zero(k));
    Mat D(k, k);
    for (int m = 0; m < k; ++m)
        D.col(m) = step_residual(Vec::Unit(k, m)) - phi0;
    Vec lambda_fd = Eigen::FullPivLU<Mat>(D).solve(-phi0);

    Vec lambda = solve_multipliers(sys, state.t, state.q, state.p, hp).lambda;
    return (lambda_fd - lambda).norm() / (1.0 + lambda.norm());
}

CheckResult multiplier_oracle_report(const MechSystem& sys, const Trajectory& traj, int states,
                                     const VerifyTolerances& tol, double h_fd) {
    double worst = 0.0;
    int points = 0;
    for (std::size_t idx : strided_indices(traj.samples.size(), states)) {
        worst = std::max(worst, multiplier_oracle_check(sys, traj.samples[idx].state, h_fd));
        ++points;
    }
    return {"multiplier_oracle",
            "analytic multipliers match the finite-difference Euler-step oracle",
            worst <= tol.oracle_rel, worst, tol.oracle_rel, points, ""};
}

} // namespace nhsym
