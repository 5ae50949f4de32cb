#include "symmetry.hpp"

#include <cmath>

#include "rng.hpp"

namespace nhsym {

namespace {

// coordinate slots: 0 = t, 1..n = q, n+1..2n = p
std::string slot_var(int n, int a) {
    if (a == 0)
        return "t";
    if (a <= n)
        return coord_name(a);
    return momentum_name(a - n);
}

struct OneFormEval {
    int n = 0;
    std::vector<ExprPtr> comp; // N entries in slot order
    std::vector<ExprPtr> d;    // N*N, [a*N+b] = d comp_b / d x_a

    OneFormEval(const OneForm& form, int n_) : n(n_) {
        const int N = 2 * n + 1;
        comp.reserve(static_cast<std::size_t>(N));
        comp.push_back(form.t_comp ? form.t_comp : zero());
        for (int i = 0; i < n; ++i)
            comp.push_back(i < static_cast<int>(form.q_comp.size()) && form.q_comp[static_cast<std::size_t>(i)]
                               ? form.q_comp[static_cast<std::size_t>(i)]
                               : zero());
        for (int i = 0; i < n; ++i)
            comp.push_back(i < static_cast<int>(form.p_comp.size()) && form.p_comp[static_cast<std::size_t>(i)]
                               ? form.p_comp[static_cast<std::size_t>(i)]
                               : zero());
        d.resize(static_cast<std::size_t>(N) * static_cast<std::size_t>(N));
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                d[static_cast<std::size_t>(a * N + b)] =
                    diff(comp[static_cast<std::size_t>(b)], slot_var(n, a));
    }

    Vec values(const Bindings& bind) const { return eval_vector(comp, bind); }
    Mat partials(const Bindings& bind) const {
        const int N = 2 * n + 1;
        Mat m(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                m(a, b) = eval(d[static_cast<std::size_t>(a * N + b)], bind);
        return m;
    }
};

} // namespace

OneForm OneForm::zero(int n) {
    OneForm f;
    f.t_comp = nhsym::zero();
    f.q_comp.assign(static_cast<std::size_t>(n), nhsym::zero());
    f.p_comp.assign(static_cast<std::size_t>(n), nhsym::zero());
    return f;
}

SymmetrySpec SymmetrySpec::translation(int n, int axis, std::string label) {
    SymmetrySpec s;
    s.label = std::move(label);
    s.tau = nhsym::zero();
    s.xi.assign(static_cast<std::size_t>(n), nhsym::zero());
    s.xi[static_cast<std::size_t>(axis - 1)] = one();
    s.gauge = nhsym::zero();
    return s;
}

SymmetrySpec SymmetrySpec::time_translation(int n, std::string label) {
    SymmetrySpec s;
    s.label = std::move(label);
    s.tau = one();
    s.xi.assign(static_cast<std::size_t>(n), nhsym::zero());
    s.gauge = nhsym::zero();
    return s;
}

ClosednessVerdict check_closed(const OneForm& beta, int n, const ParamTable& params,
                               std::uint64_t seed, int samples, double tol) {
    OneFormEval form(beta, n);
    const int N = 2 * n + 1;
    ClosednessVerdict verdict;

    bool all_zero = true;
    std::vector<ExprPtr> antisym;
    for (int a = 0; a < N && all_zero; ++a)
        for (int b = a + 1; b < N; ++b) {
            ExprPtr r = f_sub(form.d[static_cast<std::size_t>(a * N + b)],
                              form.d[static_cast<std::size_t>(b * N + a)]);
            antisym.push_back(r);
            if (!(r->kind == Expr::Kind::Constant && r->value == 0.0)) {
                all_zero = false;
                break;
            }
        }
    if (all_zero) {
        verdict.closed = true;
        verdict.symbolic = true;
        return verdict;
    }

    // numeric fallback: full antisymmetry table at seeded sample points
    Rng rng(seed);
    double worst = 0.0;
    int done = 0, attempts = 0;
    while (done < samples && attempts < samples * 20) {
        ++attempts;
        std::vector<double> q(static_cast<std::size_t>(n)), p(static_cast<std::size_t>(n));
        for (auto& v : q)
            v = rng.uniform(-2.0, 2.0);
        for (auto& v : p)
            v = rng.uniform(-2.0, 2.0);
        Bindings bind{rng.uniform(-2.0, 2.0), q, p, &params};
        try {
            Mat d = form.partials(bind);
            worst = std::max(worst, (d - d.transpose()).cwiseAbs().maxCoeff());
        } catch (const DomainError&) {
            continue;
        }
        ++done;
    }
    verdict.worst = worst;
    verdict.closed = done == samples && worst <= tol;
    return verdict;
}

void validate_symmetry(const SymmetrySpec& spec, int n, const ParamTable& params) {
    if (!spec.tau)
        throw ScenarioError("symmetry '" + spec.label + "': missing tau");
    if (spec.xi.size() != static_cast<std::size_t>(n))
        throw ScenarioError("symmetry '" + spec.label + "': xi arity does not match dimension");
    validate_names(*spec.tau, n, params, false);
    for (const auto& x : spec.xi)
        validate_names(*x, n, params, false);
    if (spec.gauge)
        validate_names(*spec.gauge, n, params, true);
    if (spec.beta) {
        const OneForm& b = *spec.beta;
        if (b.q_comp.size() != static_cast<std::size_t>(n) ||
            b.p_comp.size() != static_cast<std::size_t>(n))
            throw ScenarioError("symmetry '" + spec.label + "': beta arity does not match dimension");
        validate_names(*b.t_comp, n, params, true);
        for (const auto& c : b.q_comp)
            validate_names(*c, n, params, true);
        for (const auto& c : b.p_comp)
            validate_names(*c, n, params, true);
        if (!check_closed(b, n, params).closed)
            throw ScenarioError("symmetry '" + spec.label + "': beta is not closed");
    }
    if (spec.mode == ProlongationMode::CotangentLift &&
        !(is_constant(*spec.tau) && const_value(*spec.tau) == 0.0))
        throw ScenarioError("symmetry '" + spec.label +
                            "': the cotangent lift requires tau identically zero");
}

// ---------------------------------------------------------------------------
// SymmetryEngine
// ---------------------------------------------------------------------------

struct SymmetryEngine::Tables {
    int n = 0;
    ExprPtr tau, tau_t;
    std::vector<ExprPtr> tau_q, tau_qt; // n
    std::vector<ExprPtr> tau_qq;        // n*n
    std::vector<ExprPtr> xi, xi_t;      // n
    std::vector<ExprPtr> xi_q, xi_qt;   // n*n, [i*n+j] = d xi_i / d q_j (and /dt)
    std::vector<ExprPtr> xi_qq;         // n*n*n, [(i*n+j)*n+m]
    ExprPtr f, f_t;
    std::vector<ExprPtr> f_q, f_p; // n
    std::optional<OneFormEval> beta;

    Tables(const SymmetrySpec& spec, int n_) : n(n_) {
        tau = spec.tau ? spec.tau : zero();
        tau_t = diff(tau, "t");
        for (int j = 1; j <= n; ++j) {
            tau_q.push_back(diff(tau, coord_name(j)));
            tau_qt.push_back(diff(tau_q.back(), "t"));
        }
        for (int j = 0; j < n; ++j)
            for (int m = 1; m <= n; ++m)
                tau_qq.push_back(diff(tau_q[static_cast<std::size_t>(j)], coord_name(m)));

        xi = spec.xi;
        for (int i = 0; i < n; ++i)
            xi_t.push_back(diff(xi[static_cast<std::size_t>(i)], "t"));
        for (int i = 0; i < n; ++i)
            for (int j = 1; j <= n; ++j) {
                xi_q.push_back(diff(xi[static_cast<std::size_t>(i)], coord_name(j)));
                xi_qt.push_back(diff(xi_q.back(), "t"));
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int m = 1; m <= n; ++m)
                    xi_qq.push_back(diff(xi_q[static_cast<std::size_t>(i * n + j)], coord_name(m)));

        f = spec.gauge ? spec.gauge : zero();
        f_t = diff(f, "t");
        for (int j = 1; j <= n; ++j) {
            f_q.push_back(diff(f, coord_name(j)));
            f_p.push_back(diff(f, momentum_name(j)));
        }
        if (spec.beta)
            beta.emplace(*spec.beta, n);
    }
};

namespace {

/// Numeric snapshot of one symmetry at one state.
struct Snap {
    int n = 0;
    double tau = 0.0, tau_t = 0.0;
    Vec xi, xi_t;
    Vec tau_q, tau_qt;
    Mat tau_qq;
    Mat xi_q, xi_qt;          // (i,j)
    std::vector<Mat> xi_qq;   // [i](j,m)
    Vec eta;                  // prolongation dp components
    double f = 0.0;
    Vec df;                   // N slots
    bool has_beta = false;
    Vec beta;                 // N
    Mat beta_d;               // N x N

    Vec zeta() const {
        const int N = 2 * n + 1;
        Vec z(N);
        z(0) = tau;
        z.segment(1, n) = xi;
        z.segment(n + 1, n) = eta;
        return z;
    }
};

Snap make_snap(const SymmetryEngine::Tables& tb, const Bindings& bind, const Vec& p,
               const HamiltonianPoint& hp) {
    const int n = tb.n;
    const int N = 2 * n + 1;
    Snap s;
    s.n = n;
    s.tau = eval(tb.tau, bind);
    s.tau_t = eval(tb.tau_t, bind);
    s.tau_q = eval_vector(tb.tau_q, bind);
    s.tau_qt = eval_vector(tb.tau_qt, bind);
    s.tau_qq = Mat(n, n);
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            s.tau_qq(j, m) = eval(tb.tau_qq[static_cast<std::size_t>(j * n + m)], bind);
    s.xi = eval_vector(tb.xi, bind);
    s.xi_t = eval_vector(tb.xi_t, bind);
    s.xi_q = Mat(n, n);
    s.xi_qt = Mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            s.xi_q(i, j) = eval(tb.xi_q[static_cast<std::size_t>(i * n + j)], bind);
            s.xi_qt(i, j) = eval(tb.xi_qt[static_cast<std::size_t>(i * n + j)], bind);
        }
    s.xi_qq.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Mat m2(n, n);
        for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m)
                m2(j, m) = eval(tb.xi_qq[static_cast<std::size_t>((i * n + j) * n + m)], bind);
        s.xi_qq[static_cast<std::size_t>(i)] = std::move(m2);
    }
    s.eta = Vec(n);
    for (int i = 0; i < n; ++i) {
        double acc = hp.H * s.tau_q(i);
        for (int j = 0; j < n; ++j)
            acc -= s.xi_q(j, i) * p(j);
        s.eta(i) = acc;
    }
    s.f = eval(tb.f, bind);
    s.df = Vec(N);
    s.df(0) = eval(tb.f_t, bind);
    for (int j = 0; j < n; ++j) {
        s.df(1 + j) = eval(tb.f_q[static_cast<std::size_t>(j)], bind);
        s.df(1 + n + j) = eval(tb.f_p[static_cast<std::size_t>(j)], bind);
    }
    if (tb.beta) {
        s.has_beta = true;
        s.beta = tb.beta->values(bind);
        s.beta_d = tb.beta->partials(bind);
    }
    return s;
}

/// D(a,b) = d zeta^b / d x_a.
Mat zeta_jacobian(const Snap& s, const Vec& p, const HamiltonianPoint& hp) {
    const int n = s.n;
    const int N = 2 * n + 1;
    Mat D = Mat::Zero(N, N);
    // b = 0 (tau)
    D(0, 0) = s.tau_t;
    for (int m = 0; m < n; ++m)
        D(1 + m, 0) = s.tau_q(m);
    // b = q_i (xi_i)
    for (int i = 0; i < n; ++i) {
        D(0, 1 + i) = s.xi_t(i);
        for (int m = 0; m < n; ++m)
            D(1 + m, 1 + i) = s.xi_q(i, m);
    }
    // b = p_i (eta_i = H tau_q(i) - sum_j xi_q(j,i) p_j)
    for (int i = 0; i < n; ++i) {
        double dt = hp.Ht * s.tau_q(i) + hp.H * s.tau_qt(i);
        for (int j = 0; j < n; ++j)
            dt -= s.xi_qt(j, i) * p(j);
        D(0, 1 + n + i) = dt;
        for (int m = 0; m < n; ++m) {
            double dq = hp.Hq(m) * s.tau_q(i) + hp.H * s.tau_qq(i, m);
            for (int j = 0; j < n; ++j)
                dq -= s.xi_qq[static_cast<std::size_t>(j)](i, m) * p(j);
            D(1 + m, 1 + n + i) = dq;
            D(1 + n + m, 1 + n + i) = hp.Hp(m) * s.tau_q(i) - s.xi_q(m, i);
        }
    }
    return D;
}

/// Components of the Poincare-Cartan form alpha = p dq - H dt.
Vec alpha_components(const Vec& p, const HamiltonianPoint& hp) {
    const int n = static_cast<int>(p.size());
    Vec a = Vec::Zero(2 * n + 1);
    a(0) = -hp.H;
    a.segment(1, n) = p;
    return a;
}

/// P(a,b) = d alpha_b / d x_a.
Mat alpha_partials(const Vec& p, const HamiltonianPoint& hp) {
    const int n = static_cast<int>(p.size());
    const int N = 2 * n + 1;
    Mat P = Mat::Zero(N, N);
    P(0, 0) = -hp.Ht;
    for (int m = 0; m < n; ++m) {
        P(1 + m, 0) = -hp.Hq(m);
        P(1 + n + m, 0) = -hp.Hp(m);
        P(1 + n + m, 1 + m) = 1.0; // d p_m / d p_m in the dq_m slot
    }
    return P;
}

/// (L_zeta w)_b = sum_a [ zeta^a dw_b/dx_a + w_a d zeta^a / dx_b ].
Vec lie_covector(const Vec& zeta, const Mat& D, const Vec& w, const Mat& Pw) {
    const int N = static_cast<int>(zeta.size());
    Vec out(N);
    for (int b = 0; b < N; ++b) {
        double acc = 0.0;
        for (int a = 0; a < N; ++a)
            acc += zeta(a) * Pw(a, b) + w(a) * D(b, a);
        out(b) = acc;
    }
    return out;
}

} // namespace

SymmetryEngine::SymmetryEngine(SymmetrySpec spec, const MechSystem& sys)
    : sys_(sys), spec_(std::move(spec)), n_(sys.n()) {
    if (!spec_.tau)
        spec_.tau = zero();
    if (!spec_.gauge)
        spec_.gauge = zero();
    if (spec_.xi.size() != static_cast<std::size_t>(n_))
        throw ScenarioError("symmetry '" + spec_.label + "': xi arity does not match dimension");
    if (spec_.mode == ProlongationMode::CotangentLift &&
        !(is_constant(*spec_.tau) && const_value(*spec_.tau) == 0.0))
        throw ScenarioError("symmetry '" + spec_.label +
                            "': the cotangent lift requires tau identically zero");
    tables_ = std::make_shared<const Tables>(spec_, n_);
}

PhaseVectorField SymmetryEngine::prolong(const PhaseState& state) const {
    return prolong(state, sys_.hamiltonian(state.t, state.q, state.p));
}

PhaseVectorField SymmetryEngine::prolong(const PhaseState& state,
                                         const HamiltonianPoint& hp) const {
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    PhaseVectorField f;
    f.dt = s.tau;
    f.dq = s.xi;
    f.dp = s.eta;
    return f;
}

double SymmetryEngine::invariance_residual(const PhaseState& state) const {
    return invariance_residual(state, sys_.hamiltonian(state.t, state.q, state.p));
}

double SymmetryEngine::invariance_residual(const PhaseState& state,
                                           const HamiltonianPoint& hp) const {
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    double lie = s.tau * hp.Ht + s.xi.dot(hp.Hq) + s.eta.dot(hp.Hp);
    double rhs = state.p.dot(s.xi_t) - hp.H * s.tau_t;
    return lie - rhs;
}

double SymmetryEngine::noether(const PhaseState& state, bool include_gauge) const {
    return noether(state, sys_.hamiltonian(state.t, state.q, state.p), include_gauge);
}

double SymmetryEngine::noether(const PhaseState& state, const HamiltonianPoint& hp,
                               bool include_gauge) const {
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    double J = state.p.dot(s.xi) - hp.H * s.tau;
    if (s.has_beta)
        J += s.beta.dot(s.zeta());
    if (include_gauge)
        J -= s.f;
    return J;
}

ScalarGradient SymmetryEngine::noether_gradient(const PhaseState& state,
                                                const HamiltonianPoint& hp,
                                                bool include_gauge) const {
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    const int n = n_;
    const int N = 2 * n + 1;
    Mat D = zeta_jacobian(s, state.p, hp);
    Vec zeta = s.zeta();

    ScalarGradient out;
    out.value = state.p.dot(s.xi) - hp.H * s.tau;
    out.d = Vec::Zero(N);
    Vec Hgrad(N);
    Hgrad(0) = hp.Ht;
    Hgrad.segment(1, n) = hp.Hq;
    Hgrad.segment(n + 1, n) = hp.Hp;
    for (int b = 0; b < N; ++b) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += state.p(i) * D(b, 1 + i); // p_i d xi_i / dx_b
            if (b == 1 + n + i)
                acc += s.xi(i);
        }
        acc -= Hgrad(b) * s.tau + hp.H * D(b, 0);
        out.d(b) = acc;
    }
    if (s.has_beta) {
        out.value += s.beta.dot(zeta);
        for (int b = 0; b < N; ++b) {
            double acc = 0.0;
            for (int a = 0; a < N; ++a)
                acc += s.beta_d(b, a) * zeta(a) + s.beta(a) * D(b, a);
            out.d(b) += acc;
        }
    }
    if (include_gauge) {
        out.value -= s.f;
        out.d -= s.df;
    }
    return out;
}

Vec SymmetryEngine::lie_derivative_poincare(const PhaseState& state,
                                            const HamiltonianPoint& hp) const {
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    Mat D = zeta_jacobian(s, state.p, hp);
    Vec w = alpha_components(state.p, hp);
    Mat Pw = alpha_partials(state.p, hp);
    if (s.has_beta) {
        w += s.beta;
        Pw += s.beta_d;
    }
    return lie_covector(s.zeta(), D, w, Pw);
}

Vec SymmetryEngine::weak_noether_residual(const PhaseState& state) const {
    return weak_noether_residual(state, sys_.hamiltonian(state.t, state.q, state.p));
}

Vec SymmetryEngine::weak_noether_residual(const PhaseState& state,
                                          const HamiltonianPoint& hp) const {
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    Mat D = zeta_jacobian(s, state.p, hp);
    Vec w = alpha_components(state.p, hp);
    Mat Pw = alpha_partials(state.p, hp);
    if (s.has_beta) {
        w += s.beta;
        Pw += s.beta_d;
    }
    return lie_covector(s.zeta(), D, w, Pw) - s.df;
}

GeneralizedResiduals SymmetryEngine::generalized_residuals(const OneForm& gamma,
                                                           const PhaseState& state,
                                                           const PhaseVectorField& P) const {
    HamiltonianPoint hp = sys_.hamiltonian(state.t, state.q, state.p);
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    Mat D = zeta_jacobian(s, state.p, hp);
    Vec zeta = s.zeta();
    const int n = n_;
    const int N = 2 * n + 1;

    Vec w = alpha_components(state.p, hp);
    Mat Pw = alpha_partials(state.p, hp);
    Vec w_full = w;
    Mat Pw_full = Pw;
    if (s.has_beta) {
        w_full += s.beta;
        Pw_full += s.beta_d;
    }

    OneFormEval ge(gamma, n);
    Vec gvals = ge.values(bind);

    GeneralizedResiduals out;
    out.residual_a = lie_covector(zeta, D, w_full, Pw_full) - s.df - gvals;

    // d alpha(P, zeta) with the perturbation vector (0 by convention in dt/dq
    // unless the caller set them)
    Vec Pvec = Vec::Zero(N);
    Pvec(0) = P.dt;
    if (P.dq.size() == n)
        Pvec.segment(1, n) = P.dq;
    if (P.dp.size() == n)
        Pvec.segment(n + 1, n) = P.dp;
    double dalpha = 0.0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            dalpha += (Pw(a, b) - Pw(b, a)) * Pvec(a) * zeta(b);

    Vec X = Vec::Zero(N); // Z + P
    X(0) = 1.0;
    X.segment(1, n) = hp.Hp;
    X.segment(n + 1, n) = -hp.Hq;
    X += Pvec;
    out.residual_b = dalpha + X.dot(gvals);
    return out;
}

Vec SymmetryEngine::bracket_defect(const PhaseState& state) const {
    HamiltonianPoint hp = sys_.hamiltonian(state.t, state.q, state.p);
    Bindings bind = sys_.bind(state.t, state.q, state.p);
    Snap s = make_snap(*tables_, bind, state.p, hp);
    Mat D = zeta_jacobian(s, state.p, hp);
    Vec zeta = s.zeta();
    const int n = n_;
    const int N = 2 * n + 1;

    Vec Z(N);
    Z(0) = 1.0;
    Z.segment(1, n) = hp.Hp;
    Z.segment(n + 1, n) = -hp.Hq;

    Mat Zjac = Mat::Zero(N, N); // (a,b) = d Z^b / d x_a
    for (int i = 0; i < n; ++i) {
        Zjac(0, 1 + i) = hp.Hpt(i);
        Zjac(0, 1 + n + i) = -hp.Hqt(i);
        for (int m = 0; m < n; ++m) {
            Zjac(1 + m, 1 + i) = hp.Hpq(i, m);
            Zjac(1 + n + m, 1 + i) = hp.Hpp(i, m);
            Zjac(1 + m, 1 + n + i) = -hp.Hqq(i, m);
            Zjac(1 + n + m, 1 + n + i) = -hp.Hpq(m, i);
        }
    }

    Vec bracket(N);
    for (int b = 0; b < N; ++b) {
        double acc = 0.0;
        for (int a = 0; a < N; ++a)
            acc += Z(a) * D(a, b) - zeta(a) * Zjac(a, b);
        bracket(b) = acc;
    }
    return bracket - bracket(0) * Z;
}

double SymmetryEngine::lagrangian_invariance_residual(double t, const Vec& q,
                                                      const Vec& qdot) const {
    Bindings bind = sys_.bind_config(t, q);
    const Tables& tb = *tables_;
    const int n = n_;
    LagrangianPoint lp = sys_.lagrangian_point(t, q, qdot);

    double tau_t = eval(tb.tau_t, bind);
    Vec tau_q = eval_vector(tb.tau_q, bind);
    double tau = eval(tb.tau, bind);
    Vec xi = eval_vector(tb.xi, bind);
    Vec xi_t = eval_vector(tb.xi_t, bind);
    Mat xi_q(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            xi_q(i, j) = eval(tb.xi_q[static_cast<std::size_t>(i * n + j)], bind);

    double tau_total = tau_t + tau_q.dot(qdot); // d tau / dt along the motion
    double residual = lp.Lt * tau + lp.L * tau_total;
    for (int i = 0; i < n; ++i) {
        double nu = xi_t(i) - qdot(i) * tau_t;
        for (int j = 0; j < n; ++j)
            nu += xi_q(i, j) * qdot(j) - qdot(i) * tau_q(j) * qdot(j);
        residual += lp.Lq(i) * xi(i) + lp.Lqdot(i) * nu;
    }
    return residual;
}

double SymmetryEngine::lagrangian_noether(double t, const Vec& q, const Vec& qdot) const {
    Bindings bind = sys_.bind_config(t, q);
    LagrangianPoint lp = sys_.lagrangian_point(t, q, qdot);
    double tau = eval(tables_->tau, bind);
    Vec xi = eval_vector(tables_->xi, bind);
    return lp.Lqdot.dot(xi - tau * qdot) + lp.L * tau;
}

// ---------------------------------------------------------------------------
// free wrappers
// ---------------------------------------------------------------------------

PhaseVectorField prolong_full(const SymmetrySpec& spec, const MechSystem& sys,
                              const PhaseState& state) {
    return SymmetryEngine(spec, sys).prolong(state);
}

PhaseVectorField cotangent_lift(const SymmetrySpec& spec, const MechSystem& sys,
                                const PhaseState& state) {
    // independent assembly of the tau = 0 lift
    const int n = sys.n();
    Bindings bind = sys.bind(state.t, state.q, state.p);
    PhaseVectorField f;
    f.dt = 0.0;
    f.dq = Vec(n);
    f.dp = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
        f.dq(i) = eval(spec.xi[static_cast<std::size_t>(i)], bind);
    for (int i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc -= eval(diff(spec.xi[static_cast<std::size_t>(j)], coord_name(i)), bind) *
                   state.p(j);
        f.dp(i - 1) = acc;
    }
    return f;
}

double invariance_residual(const SymmetrySpec& spec, const MechSystem& sys,
                           const PhaseState& state) {
    return SymmetryEngine(spec, sys).invariance_residual(state);
}

double lagrangian_invariance_residual(const SymmetrySpec& spec, const MechSystem& sys, double t,
                                      const Vec& q, const Vec& qdot) {
    return SymmetryEngine(spec, sys).lagrangian_invariance_residual(t, q, qdot);
}

double noether_function(const SymmetrySpec& spec, const MechSystem& sys, const PhaseState& state) {
    return SymmetryEngine(spec, sys).noether(state);
}

double lagrangian_noether(const SymmetrySpec& spec, const MechSystem& sys, double t, const Vec& q,
                          const Vec& qdot) {
    return SymmetryEngine(spec, sys).lagrangian_noether(t, q, qdot);
}

Vec weak_noether_residual(const SymmetrySpec& spec, const MechSystem& sys,
                          const PhaseState& state) {
    return SymmetryEngine(spec, sys).weak_noether_residual(state);
}

GeneralizedResiduals generalized_symmetry_residuals(const SymmetrySpec& spec, const OneForm& gamma,
                                                    const MechSystem& sys, const PhaseState& state,
                                                    const PhaseVectorField& P) {
    return SymmetryEngine(spec, sys).generalized_residuals(gamma, state, P);
}

Vec bracket_defect(const SymmetrySpec& spec, const MechSystem& sys, const PhaseState& state) {
    return SymmetryEngine(spec, sys).bracket_defect(state);
}

double contact_factor(const MechSystem& sys, const PhaseState& state) {
    HamiltonianPoint hp = sys.hamiltonian(state.t, state.q, state.p);
    return state.p.dot(hp.Hp) - hp.H;
}

} // namespace nhsym
