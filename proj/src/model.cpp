#include "model.hpp"

#include <algorithm>
#include <cmath>

namespace nhsym {

namespace {

int upper_index(int n, int i, int j) {
    // row-major upper triangle, i <= j
    return i * n - i * (i - 1) / 2 + (j - i);
}

Mat eval_matrix_full(const std::vector<ExprPtr>& exprs, int rows, int cols, const Bindings& b) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            m(i, j) = eval(exprs[static_cast<std::size_t>(i * cols + j)], b);
    return m;
}

} // namespace

std::string coord_name(int i) { return "q" + std::to_string(i); }
std::string momentum_name(int i) { return "p" + std::to_string(i); }

Vec eval_vector(const std::vector<ExprPtr>& exprs, const Bindings& b) {
    Vec v(static_cast<Eigen::Index>(exprs.size()));
    for (std::size_t i = 0; i < exprs.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = eval(exprs[i], b);
    return v;
}

// ---------------------------------------------------------------------------
// NaturalLagrangian / Force / ConstraintRow
// ---------------------------------------------------------------------------

const ExprPtr& NaturalLagrangian::mass(int i, int j) const {
    if (i > j)
        std::swap(i, j);
    return mass_upper[static_cast<std::size_t>(upper_index(n, i, j))];
}

ExprPtr& NaturalLagrangian::mass_ref(int i, int j) {
    if (i > j)
        std::swap(i, j);
    return mass_upper[static_cast<std::size_t>(upper_index(n, i, j))];
}

NaturalLagrangian NaturalLagrangian::make(int n) {
    NaturalLagrangian lag;
    lag.n = n;
    lag.mass_upper.assign(static_cast<std::size_t>(n * (n + 1) / 2), zero());
    lag.coupling.assign(static_cast<std::size_t>(n), zero());
    lag.potential = zero();
    return lag;
}

Force Force::zero(int n) {
    Force f;
    f.components.assign(static_cast<std::size_t>(n), nhsym::zero());
    return f;
}

std::pair<ExprPtr, std::vector<ExprPtr>> holonomic_to_velocity_row(const ExprPtr& f, int n) {
    ExprPtr a0 = diff(f, "t");
    std::vector<ExprPtr> a;
    a.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        a.push_back(diff(f, coord_name(i)));
    return {a0, std::move(a)};
}

ConstraintRow ConstraintRow::holonomic(ExprPtr f, int n) {
    ConstraintRow row;
    row.kind = Kind::Holonomic;
    row.position = f;
    auto [a0, a] = holonomic_to_velocity_row(f, n);
    row.a0 = std::move(a0);
    row.a = std::move(a);
    return row;
}

ConstraintRow ConstraintRow::kinematic(ExprPtr a0, std::vector<ExprPtr> a) {
    ConstraintRow row;
    row.kind = Kind::Kinematic;
    row.a0 = std::move(a0);
    row.a = std::move(a);
    return row;
}

// ---------------------------------------------------------------------------
// symbolic Legendre transformation (adjugate inverse, n <= 4)
// ---------------------------------------------------------------------------

namespace {

using ExprMatrix = std::vector<std::vector<ExprPtr>>;

ExprMatrix minor_of(const ExprMatrix& m, std::size_t row, std::size_t col) {
    ExprMatrix out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i == row)
            continue;
        std::vector<ExprPtr> r;
        for (std::size_t j = 0; j < m.size(); ++j)
            if (j != col)
                r.push_back(m[i][j]);
        out.push_back(std::move(r));
    }
    return out;
}

ExprPtr det_expr(const ExprMatrix& m) {
    std::size_t n = m.size();
    if (n == 1)
        return m[0][0];
    ExprPtr acc = zero();
    for (std::size_t j = 0; j < n; ++j) {
        ExprPtr term = f_mul(m[0][j], det_expr(minor_of(m, 0, j)));
        acc = (j % 2 == 0) ? f_add(acc, term) : f_sub(acc, term);
    }
    return acc;
}

} // namespace

ExprPtr legendre_to_hamiltonian(const NaturalLagrangian& lag) {
    int n = lag.n;
    if (n > 4)
        throw ModelError("symbolic Legendre transformation is limited to n <= 4; "
                         "the semi-symbolic backend covers larger systems");
    ExprMatrix m(static_cast<std::size_t>(n), std::vector<ExprPtr>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = lag.mass(i, j);

    ExprPtr det = det_expr(m);
    std::vector<ExprPtr> u; // p - b
    for (int i = 0; i < n; ++i)
        u.push_back(f_sub(variable(momentum_name(i + 1)), lag.coupling[static_cast<std::size_t>(i)]));

    // H = 1/2 u^T adj(M)/det u + V
    ExprPtr quad = zero();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            ExprPtr adj_ij;
            if (n == 1) {
                adj_ij = one();
            } else {
                ExprPtr cof = det_expr(minor_of(m, static_cast<std::size_t>(j), static_cast<std::size_t>(i)));
                adj_ij = ((i + j) % 2 == 0) ? cof : f_neg(cof);
            }
            quad = f_add(quad, f_mul(u[static_cast<std::size_t>(i)],
                                     f_mul(adj_ij, u[static_cast<std::size_t>(j)])));
        }
    }
    return f_add(f_div(f_mul(constant(0.5), quad), det), lag.potential);
}

// ---------------------------------------------------------------------------
// precomputed symbolic partial tables
// ---------------------------------------------------------------------------

// Derivative slot x: 0 = t, 1..n = q_x. Used for all (t,q)-type partials.
struct MechSystem::NaturalTables {
    int n = 0;
    // M entries as a full (symmetric) n*n table plus first and second partials
    std::vector<ExprPtr> M;    // n*n
    std::vector<ExprPtr> M_d;  // (n+1) * n*n
    std::vector<ExprPtr> M_dd; // (n+1)*(n+1) * n*n
    std::vector<ExprPtr> b;    // n
    std::vector<ExprPtr> b_d;  // (n+1) * n
    std::vector<ExprPtr> b_dd; // (n+1)*(n+1) * n
    ExprPtr V;
    std::vector<ExprPtr> V_d;  // n+1
    std::vector<ExprPtr> V_dd; // (n+1)*(n+1)

    static std::string slot_name(int x) { return x == 0 ? "t" : coord_name(x); }

    const ExprPtr& Md(int x, int i, int j) const {
        return M_d[static_cast<std::size_t>(x * n * n + i * n + j)];
    }
    const ExprPtr& Mdd(int x, int y, int i, int j) const {
        return M_dd[static_cast<std::size_t>((x * (n + 1) + y) * n * n + i * n + j)];
    }
    const ExprPtr& bd(int x, int i) const { return b_d[static_cast<std::size_t>(x * n + i)]; }
    const ExprPtr& bdd(int x, int y, int i) const {
        return b_dd[static_cast<std::size_t>((x * (n + 1) + y) * n + i)];
    }

    explicit NaturalTables(const NaturalLagrangian& lag) : n(lag.n) {
        M.resize(static_cast<std::size_t>(n * n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                M[static_cast<std::size_t>(i * n + j)] = lag.mass(i, j);
        b = lag.coupling;
        V = lag.potential;

        M_d.resize(static_cast<std::size_t>((n + 1) * n * n));
        b_d.resize(static_cast<std::size_t>((n + 1) * n));
        V_d.resize(static_cast<std::size_t>(n + 1));
        for (int x = 0; x <= n; ++x) {
            const std::string vx = slot_name(x);
            for (int e = 0; e < n * n; ++e)
                M_d[static_cast<std::size_t>(x * n * n + e)] = diff(M[static_cast<std::size_t>(e)], vx);
            for (int i = 0; i < n; ++i)
                b_d[static_cast<std::size_t>(x * n + i)] = diff(b[static_cast<std::size_t>(i)], vx);
            V_d[static_cast<std::size_t>(x)] = diff(V, vx);
        }

        M_dd.resize(static_cast<std::size_t>((n + 1) * (n + 1) * n * n));
        b_dd.resize(static_cast<std::size_t>((n + 1) * (n + 1) * n));
        V_dd.resize(static_cast<std::size_t>((n + 1) * (n + 1)));
        for (int x = 0; x <= n; ++x) {
            for (int y = 0; y <= n; ++y) {
                const std::string vy = slot_name(y);
                for (int e = 0; e < n * n; ++e)
                    M_dd[static_cast<std::size_t>((x * (n + 1) + y) * n * n + e)] =
                        diff(M_d[static_cast<std::size_t>(x * n * n + e)], vy);
                for (int i = 0; i < n; ++i)
                    b_dd[static_cast<std::size_t>((x * (n + 1) + y) * n + i)] =
                        diff(b_d[static_cast<std::size_t>(x * n + i)], vy);
                V_dd[static_cast<std::size_t>(x * (n + 1) + y)] =
                    diff(V_d[static_cast<std::size_t>(x)], vy);
            }
        }
    }

    Mat eval_M(const Bindings& bd_) const { return eval_matrix_full(M, n, n, bd_); }
    Mat eval_Md(int x, const Bindings& bind) const {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = eval(Md(x, i, j), bind);
        return m;
    }
    Mat eval_Mdd(int x, int y, const Bindings& bind) const {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = eval(Mdd(x, y, i, j), bind);
        return m;
    }
    Vec eval_b(const Bindings& bind) const { return eval_vector(b, bind); }
    Vec eval_bd(int x, const Bindings& bind) const {
        Vec v(n);
        for (int i = 0; i < n; ++i)
            v(i) = eval(bd(x, i), bind);
        return v;
    }
    Vec eval_bdd(int x, int y, const Bindings& bind) const {
        Vec v(n);
        for (int i = 0; i < n; ++i)
            v(i) = eval(bdd(x, y, i), bind);
        return v;
    }
};

struct MechSystem::SymbolicH {
    int n = 0;
    ExprPtr H, Ht;
    std::vector<ExprPtr> Hq, Hp, Hpt, Hqt; // n each
    std::vector<ExprPtr> Hpp, Hpq, Hqq;    // n*n each

    SymbolicH(const NaturalLagrangian& lag) : n(lag.n) {
        H = legendre_to_hamiltonian(lag);
        Ht = diff(H, "t");
        for (int i = 1; i <= n; ++i) {
            Hq.push_back(diff(H, coord_name(i)));
            Hp.push_back(diff(H, momentum_name(i)));
        }
        for (int i = 0; i < n; ++i) {
            Hpt.push_back(diff(Hp[static_cast<std::size_t>(i)], "t"));
            Hqt.push_back(diff(Hq[static_cast<std::size_t>(i)], "t"));
            for (int j = 1; j <= n; ++j) {
                Hpp.push_back(diff(Hp[static_cast<std::size_t>(i)], momentum_name(j)));
                Hpq.push_back(diff(Hp[static_cast<std::size_t>(i)], coord_name(j)));
                Hqq.push_back(diff(Hq[static_cast<std::size_t>(i)], coord_name(j)));
            }
        }
    }
};

struct MechSystem::RowTables {
    // per row: symbolic t/q partials of a0 and of each coefficient a_i
    struct Row {
        ExprPtr a0_t;
        std::vector<ExprPtr> a0_q;  // n
        std::vector<ExprPtr> a_t;   // n
        std::vector<ExprPtr> a_q;   // n*n, (i,j) = d a_i / dq_j
    };
    std::vector<Row> rows;

    RowTables(const std::vector<ConstraintRow>& rows_in, int n) {
        for (const auto& r : rows_in) {
            Row row;
            row.a0_t = diff(r.a0, "t");
            for (int j = 1; j <= n; ++j)
                row.a0_q.push_back(diff(r.a0, coord_name(j)));
            for (int i = 0; i < n; ++i)
                row.a_t.push_back(diff(r.a[static_cast<std::size_t>(i)], "t"));
            for (int i = 0; i < n; ++i)
                for (int j = 1; j <= n; ++j)
                    row.a_q.push_back(diff(r.a[static_cast<std::size_t>(i)], coord_name(j)));
            rows.push_back(std::move(row));
        }
    }
};

// ---------------------------------------------------------------------------
// MechSystem
// ---------------------------------------------------------------------------

MechSystem::MechSystem(NaturalLagrangian lag, Force force, std::vector<ConstraintRow> rows,
                       ParamTable params, HamiltonianBackend backend)
    : lag_(std::move(lag)), force_(std::move(force)), rows_(std::move(rows)),
      params_(std::move(params)), n_(lag_.n) {
    if (n_ < 1)
        throw ModelError("dimension must be at least 1");
    if (lag_.mass_upper.size() != static_cast<std::size_t>(n_ * (n_ + 1) / 2))
        throw ModelError("mass matrix entry count does not match dimension");
    if (lag_.coupling.empty())
        lag_.coupling.assign(static_cast<std::size_t>(n_), zero());
    if (lag_.coupling.size() != static_cast<std::size_t>(n_))
        throw ModelError("momentum-linear coupling arity does not match dimension");
    if (!lag_.potential)
        lag_.potential = zero();
    if (force_.components.empty())
        force_ = Force::zero(n_);
    if (force_.components.size() != static_cast<std::size_t>(n_))
        throw ModelError("force arity does not match dimension");

    for (const auto& [name, value] : params_.entries()) {
        (void)value;
        if (variable(name)->var_kind != VarKind::Param)
            throw ScenarioError("parameter name '" + name + "' shadows a reserved coordinate name");
    }

    for (const auto& e : lag_.mass_upper)
        validate_names(*e, n_, params_, false);
    for (const auto& e : lag_.coupling)
        validate_names(*e, n_, params_, false);
    validate_names(*lag_.potential, n_, params_, false);
    for (const auto& e : force_.components)
        validate_names(*e, n_, params_, true);
    for (auto& row : rows_) {
        if (row.a.size() != static_cast<std::size_t>(n_))
            throw ModelError("constraint row arity does not match dimension");
        validate_names(*row.a0, n_, params_, false);
        for (const auto& e : row.a)
            validate_names(*e, n_, params_, false);
        if (row.kind == ConstraintRow::Kind::Holonomic)
            validate_names(*row.position, n_, params_, false);
    }

    // holonomic rows first, preserving relative order
    std::stable_partition(rows_.begin(), rows_.end(), [](const ConstraintRow& r) {
        return r.kind == ConstraintRow::Kind::Holonomic;
    });
    s_ = static_cast<int>(std::count_if(rows_.begin(), rows_.end(), [](const ConstraintRow& r) {
        return r.kind == ConstraintRow::Kind::Holonomic;
    }));

    backend_ = backend;
    if (backend_ == HamiltonianBackend::Auto)
        backend_ = n_ <= 4 ? HamiltonianBackend::Symbolic : HamiltonianBackend::SemiSymbolic;
    if (backend_ == HamiltonianBackend::Symbolic && n_ > 4)
        throw ModelError("symbolic Hamiltonian backend is limited to n <= 4");

    tables_ = std::make_shared<const NaturalTables>(lag_);
    if (backend_ == HamiltonianBackend::Symbolic)
        symbolic_ = std::make_shared<const SymbolicH>(lag_);
    row_tables_ = std::make_shared<const RowTables>(rows_, n_);
}

Bindings MechSystem::bind(double t, const Vec& q, const Vec& p) const {
    return Bindings{t, std::span<const double>(q.data(), static_cast<std::size_t>(q.size())),
                    std::span<const double>(p.data(), static_cast<std::size_t>(p.size())), &params_};
}

Bindings MechSystem::bind_config(double t, const Vec& q) const {
    return Bindings{t, std::span<const double>(q.data(), static_cast<std::size_t>(q.size())),
                    std::span<const double>(), &params_};
}

void MechSystem::check_mass_positive_definite(const Mat& m) const {
    if (!m.allFinite())
        throw ModelError("mass matrix evaluated to a non-finite value");
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success)
        throw ModelError("mass matrix is not positive definite at this point");
}

HamiltonianPoint MechSystem::hamiltonian(double t, const Vec& q, const Vec& p) const {
    Bindings bn = bind(t, q, p);
    check_mass_positive_definite(tables_->eval_M(bn));
    if (backend_ == HamiltonianBackend::Symbolic)
        return hamiltonian_symbolic(bn);
    return hamiltonian_semisymbolic(t, q, p);
}

HamiltonianPoint MechSystem::hamiltonian_symbolic(const Bindings& bn) const {
    const SymbolicH& s = *symbolic_;
    HamiltonianPoint out;
    out.H = eval(s.H, bn);
    out.Ht = eval(s.Ht, bn);
    out.Hq = eval_vector(s.Hq, bn);
    out.Hp = eval_vector(s.Hp, bn);
    out.Hpt = eval_vector(s.Hpt, bn);
    out.Hqt = eval_vector(s.Hqt, bn);
    out.Hpp = eval_matrix_full(s.Hpp, n_, n_, bn);
    out.Hpq = eval_matrix_full(s.Hpq, n_, n_, bn);
    out.Hqq = eval_matrix_full(s.Hqq, n_, n_, bn);
    return out;
}

HamiltonianPoint MechSystem::hamiltonian_semisymbolic(double t, const Vec& q, const Vec& p) const {
    const NaturalTables& tb = *tables_;
    Bindings bn = bind(t, q, p);
    const int n = n_;

    Mat M = tb.eval_M(bn);
    Eigen::LLT<Mat> llt(M);
    Mat W = llt.solve(Mat::Identity(n, n));
    Vec b = tb.eval_b(bn);
    Vec u = p - b;
    Vec Wu = W * u;

    HamiltonianPoint out;
    out.H = 0.5 * u.dot(Wu) + eval(tb.V, bn);
    out.Hp = Wu;
    out.Hpp = W;
    out.Hq = Vec(n);
    out.Hpq = Mat(n, n);
    out.Hpt = Vec(n);
    out.Hqq = Mat(n, n);
    out.Hqt = Vec(n);

    // slot 0 = t, slots 1..n = q
    std::vector<Mat> Mx(static_cast<std::size_t>(n + 1)), Wx(static_cast<std::size_t>(n + 1));
    std::vector<Vec> bx(static_cast<std::size_t>(n + 1));
    std::vector<double> Vx(static_cast<std::size_t>(n + 1));
    std::vector<double> Hx(static_cast<std::size_t>(n + 1));
    std::vector<Vec> Hpx(static_cast<std::size_t>(n + 1));
    for (int x = 0; x <= n; ++x) {
        auto xi = static_cast<std::size_t>(x);
        Mx[xi] = tb.eval_Md(x, bn);
        Wx[xi] = -W * Mx[xi] * W;
        bx[xi] = tb.eval_bd(x, bn);
        Vx[xi] = eval(tb.V_d[xi], bn);
        Hx[xi] = 0.5 * u.dot(Wx[xi] * u) - bx[xi].dot(Wu) + Vx[xi];
        Hpx[xi] = Wx[xi] * u - W * bx[xi];
    }
    out.Ht = Hx[0];
    out.Hpt = Hpx[0];
    for (int j = 0; j < n; ++j) {
        out.Hq(j) = Hx[static_cast<std::size_t>(j + 1)];
        out.Hpq.col(j) = Hpx[static_cast<std::size_t>(j + 1)];
    }

    auto second = [&](int x, int y) {
        auto xi = static_cast<std::size_t>(x);
        auto yi = static_cast<std::size_t>(y);
        Mat Mxy = tb.eval_Mdd(x, y, bn);
        Mat Wxy = W * Mx[yi] * W * Mx[xi] * W + W * Mx[xi] * W * Mx[yi] * W - W * Mxy * W;
        Vec bxy = tb.eval_bdd(x, y, bn);
        double Vxy = eval(tb.V_dd[static_cast<std::size_t>(x * (n + 1) + y)], bn);
        return 0.5 * u.dot(Wxy * u) - bx[yi].dot(Wx[xi] * u) - bx[xi].dot(Wx[yi] * u) -
               bxy.dot(Wu) + bx[xi].dot(W * bx[yi]) + Vxy;
    };
    for (int i = 0; i < n; ++i) {
        out.Hqt(i) = second(i + 1, 0);
        for (int j = 0; j < n; ++j)
            out.Hqq(i, j) = second(i + 1, j + 1);
    }
    return out;
}

ExprPtr MechSystem::hamiltonian_expr() const {
    if (backend_ != HamiltonianBackend::Symbolic)
        throw ModelError("the semi-symbolic backend has no Hamiltonian expression tree");
    return symbolic_->H;
}

LagrangianPoint MechSystem::lagrangian_point(double t, const Vec& q, const Vec& qdot) const {
    const NaturalTables& tb = *tables_;
    Bindings bn = bind_config(t, q);
    const int n = n_;
    Mat M = tb.eval_M(bn);
    check_mass_positive_definite(M);
    Vec b = tb.eval_b(bn);

    LagrangianPoint out;
    out.L = 0.5 * qdot.dot(M * qdot) + b.dot(qdot) - eval(tb.V, bn);
    out.Lqdot = M * qdot + b;
    out.Lt = 0.5 * qdot.dot(tb.eval_Md(0, bn) * qdot) + tb.eval_bd(0, bn).dot(qdot) -
             eval(tb.V_d[0], bn);
    out.Lq = Vec(n);
    for (int j = 0; j < n; ++j)
        out.Lq(j) = 0.5 * qdot.dot(tb.eval_Md(j + 1, bn) * qdot) +
                    tb.eval_bd(j + 1, bn).dot(qdot) -
                    eval(tb.V_d[static_cast<std::size_t>(j + 1)], bn);
    return out;
}

double MechSystem::lagrangian_value(double t, const Vec& q, const Vec& qdot) const {
    Bindings bn = bind_config(t, q);
    Mat M = tables_->eval_M(bn);
    return 0.5 * qdot.dot(M * qdot) + tables_->eval_b(bn).dot(qdot) - eval(tables_->V, bn);
}

Mat MechSystem::mass_matrix(double t, const Vec& q) const {
    return tables_->eval_M(bind_config(t, q));
}

Vec MechSystem::coupling_vector(double t, const Vec& q) const {
    return tables_->eval_b(bind_config(t, q));
}

Vec MechSystem::momentum_of_velocity(double t, const Vec& q, const Vec& qdot) const {
    Bindings bn = bind_config(t, q);
    return tables_->eval_M(bn) * qdot + tables_->eval_b(bn);
}

Vec MechSystem::velocity_of_momentum(double t, const Vec& q, const Vec& p) const {
    Bindings bn = bind(t, q, p);
    Mat M = tables_->eval_M(bn);
    check_mass_positive_definite(M);
    return Eigen::LLT<Mat>(M).solve(p - tables_->eval_b(bn));
}

Vec MechSystem::force_vector(double t, const Vec& q, const Vec& p) const {
    return eval_vector(force_.components, bind(t, q, p));
}

Mat MechSystem::a_matrix(double t, const Vec& q) const {
    Bindings bn = bind_config(t, q);
    Mat A(k(), n_);
    for (int l = 0; l < k(); ++l)
        for (int i = 0; i < n_; ++i)
            A(l, i) = eval(rows_[static_cast<std::size_t>(l)].a[static_cast<std::size_t>(i)], bn);
    return A;
}

Vec MechSystem::a0_vector(double t, const Vec& q) const {
    Bindings bn = bind_config(t, q);
    Vec a0(k());
    for (int l = 0; l < k(); ++l)
        a0(l) = eval(rows_[static_cast<std::size_t>(l)].a0, bn);
    return a0;
}

Vec MechSystem::holonomic_values(double t, const Vec& q) const {
    Bindings bn = bind_config(t, q);
    Vec f(s_);
    for (int l = 0; l < s_; ++l)
        f(l) = eval(rows_[static_cast<std::size_t>(l)].position, bn);
    return f;
}

MechSystem::RowPartials MechSystem::row_partials(double t, const Vec& q) const {
    Bindings bn = bind_config(t, q);
    const int kk = k();
    RowPartials out;
    out.a0 = Vec(kk);
    out.A = Mat(kk, n_);
    out.a0_t = Vec(kk);
    out.a0_q = Mat(kk, n_);
    out.A_t = Mat(kk, n_);
    out.A_q.resize(static_cast<std::size_t>(kk));
    for (int l = 0; l < kk; ++l) {
        const auto& row = rows_[static_cast<std::size_t>(l)];
        const auto& tab = row_tables_->rows[static_cast<std::size_t>(l)];
        out.a0(l) = eval(row.a0, bn);
        out.a0_t(l) = eval(tab.a0_t, bn);
        Mat aq(n_, n_);
        for (int i = 0; i < n_; ++i) {
            out.A(l, i) = eval(row.a[static_cast<std::size_t>(i)], bn);
            out.A_t(l, i) = eval(tab.a_t[static_cast<std::size_t>(i)], bn);
            for (int j = 0; j < n_; ++j)
                aq(i, j) = eval(tab.a_q[static_cast<std::size_t>(i * n_ + j)], bn);
        }
        for (int j = 0; j < n_; ++j)
            out.a0_q(l, j) = eval(tab.a0_q[static_cast<std::size_t>(j)], bn);
        out.A_q[static_cast<std::size_t>(l)] = std::move(aq);
    }
    return out;
}

} // namespace nhsym
