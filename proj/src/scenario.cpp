#include "scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nhsym {

namespace {

// ---------------------------------------------------------------------------
// raw line-oriented format: [section] headers, key = value entries, # comments
// ---------------------------------------------------------------------------

struct RawEntry {
    std::string key;
    std::string value;
    int line = 0;
    bool used = false;
};

struct RawSection {
    std::string name;
    int line = 0;
    std::vector<RawEntry> entries;

    const RawEntry* find(const std::string& key) const {
        for (const auto& e : entries)
            if (e.key == key)
                return &e;
        return nullptr;
    }
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct RawScenario {
    std::string origin;
    std::vector<RawSection> sections;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw ScenarioError(origin + ":" + std::to_string(line) + ": " + msg);
    }
};

RawScenario parse_raw(std::string_view text, const std::string& origin) {
    RawScenario raw;
    raw.origin = origin;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    RawSection* current = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::string t = trim(line);
        if (t.empty())
            continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                raw.fail(lineno, "unterminated section header");
            std::string name = trim(t.substr(1, t.size() - 2));
            if (name.empty())
                raw.fail(lineno, "empty section name");
            raw.sections.push_back(RawSection{name, lineno, {}});
            current = &raw.sections.back();
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            raw.fail(lineno, "expected 'key = value' or a [section] header");
        if (!current)
            raw.fail(lineno, "entry outside of any section");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            raw.fail(lineno, "empty key");
        if (value.empty())
            raw.fail(lineno, "empty value for key '" + key + "'");
        if (current->find(key))
            raw.fail(lineno, "duplicate key '" + key + "' in section [" + current->name + "]");
        current->entries.push_back(RawEntry{key, value, lineno, false});
    }
    return raw;
}

// ---------------------------------------------------------------------------
// assembly helpers
// ---------------------------------------------------------------------------

struct Assembler {
    const RawScenario& raw;

    [[noreturn]] void fail(const RawSection& sec, int line, const std::string& msg) const {
        raw.fail(line, "[" + sec.name + "] " + msg);
    }

    ExprPtr expr_of(const RawSection& sec, const RawEntry& e) const {
        try {
            return parse(e.value);
        } catch (const ParseError& err) {
            fail(sec, e.line, "key '" + e.key + "': " + err.what());
        }
    }

    double number_of(const RawSection& sec, const RawEntry& e) const {
        ExprPtr x = expr_of(sec, e);
        if (!is_constant(*x))
            fail(sec, e.line, "key '" + e.key + "' must be a constant");
        try {
            return const_value(*x);
        } catch (const Error& err) {
            fail(sec, e.line, "key '" + e.key + "': " + err.what());
        }
    }

    std::vector<double> number_list_of(const RawSection& sec, const RawEntry& e) const {
        std::vector<double> out;
        std::stringstream ss(e.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                fail(sec, e.line, "key '" + e.key + "': empty list element");
            try {
                ExprPtr x = parse(item);
                if (!is_constant(*x))
                    fail(sec, e.line, "key '" + e.key + "' must be a list of constants");
                out.push_back(const_value(*x));
            } catch (const ParseError& err) {
                fail(sec, e.line, "key '" + e.key + "': " + err.what());
            }
        }
        return out;
    }

    /// "M(1,2)" -> {1,2}; "a(3)" -> {3}
    static std::optional<std::vector<int>> indexed(const std::string& key,
                                                   const std::string& stem, int arity) {
        if (key.size() < stem.size() + 3 || key.compare(0, stem.size(), stem) != 0 ||
            key[stem.size()] != '(' || key.back() != ')')
            return std::nullopt;
        std::string inner = key.substr(stem.size() + 1, key.size() - stem.size() - 2);
        std::vector<int> idx;
        std::stringstream ss(inner);
        std::string part;
        while (std::getline(ss, part, ','))
            idx.push_back(std::atoi(trim(part).c_str()));
        if (static_cast<int>(idx.size()) != arity)
            return std::nullopt;
        return idx;
    }
};

const std::vector<std::string> kKnownChecks = {
    "conservation", "momentum",      "invariance", "membership",
    "weak_noether", "moving_energy", "generalized", "bracket"};

} // namespace

// ---------------------------------------------------------------------------
// scenario loading
// ---------------------------------------------------------------------------

Scenario load_scenario_text(std::string_view text, const std::string& origin) {
    RawScenario raw = parse_raw(text, origin);
    Assembler as{raw};
    Scenario sc;
    sc.source = origin;

    // pass 1: the [scenario] header fixes the dimension
    const RawSection* header = nullptr;
    for (const auto& sec : raw.sections)
        if (sec.name == "scenario")
            header = &sec;
    if (!header)
        throw ScenarioError(origin + ": missing [scenario] section");
    for (const auto& e : header->entries) {
        if (e.key == "name")
            sc.name = e.value;
        else if (e.key == "n")
            sc.n = static_cast<int>(as.number_of(*header, e));
        else
            as.fail(*header, e.line, "unknown key '" + e.key + "'");
    }
    if (sc.name.empty())
        as.fail(*header, header->line, "missing 'name'");
    if (sc.n < 1)
        as.fail(*header, header->line, "dimension 'n' must be at least 1");

    sc.lagrangian = NaturalLagrangian::make(sc.n);
    sc.q0.assign(static_cast<std::size_t>(sc.n), 0.0);
    sc.p0.assign(static_cast<std::size_t>(sc.n), 0.0);
    bool saw_lagrangian = false, saw_integration = false;
    bool saw_mass_entry = false;

    for (const auto& sec : raw.sections) {
        if (sec.name == "scenario")
            continue;
        if (sec.name == "params") {
            for (const auto& e : sec.entries) {
                if (variable(e.key)->var_kind != VarKind::Param)
                    as.fail(sec, e.line, "parameter '" + e.key + "' shadows a coordinate name");
                sc.params.set(e.key, as.number_of(sec, e));
            }
        } else if (sec.name == "lagrangian") {
            saw_lagrangian = true;
            for (const auto& e : sec.entries) {
                if (auto ij = Assembler::indexed(e.key, "M", 2)) {
                    int i = (*ij)[0], j = (*ij)[1];
                    if (i < 1 || j < 1 || i > sc.n || j > sc.n)
                        as.fail(sec, e.line, "mass index out of range in '" + e.key + "'");
                    if (i > j)
                        as.fail(sec, e.line, "only the upper triangle of M may be set ('" +
                                                 e.key + "')");
                    sc.lagrangian.mass_ref(i - 1, j - 1) = as.expr_of(sec, e);
                    saw_mass_entry = true;
                } else if (auto bi = Assembler::indexed(e.key, "b", 1)) {
                    int i = (*bi)[0];
                    if (i < 1 || i > sc.n)
                        as.fail(sec, e.line, "coupling index out of range in '" + e.key + "'");
                    sc.lagrangian.coupling[static_cast<std::size_t>(i - 1)] = as.expr_of(sec, e);
                } else if (e.key == "V") {
                    sc.lagrangian.potential = as.expr_of(sec, e);
                } else {
                    as.fail(sec, e.line, "unknown key '" + e.key + "'");
                }
            }
        } else if (sec.name == "force") {
            sc.force = Force::zero(sc.n);
            for (const auto& e : sec.entries) {
                auto fi = Assembler::indexed(e.key, "F", 1);
                if (!fi)
                    as.fail(sec, e.line, "unknown key '" + e.key + "'");
                int i = (*fi)[0];
                if (i < 1 || i > sc.n)
                    as.fail(sec, e.line, "force index out of range in '" + e.key + "'");
                sc.force.components[static_cast<std::size_t>(i - 1)] = as.expr_of(sec, e);
            }
        } else if (sec.name.rfind("constraint.", 0) == 0) {
            const RawEntry* kind = sec.find("kind");
            if (!kind)
                as.fail(sec, sec.line, "missing 'kind' (holonomic or kinematic)");
            if (kind->value == "holonomic") {
                const RawEntry* f = sec.find("f");
                if (!f)
                    as.fail(sec, sec.line, "holonomic row needs 'f'");
                for (const auto& e : sec.entries)
                    if (e.key != "kind" && e.key != "f")
                        as.fail(sec, e.line, "unknown key '" + e.key + "' for a holonomic row");
                sc.rows.push_back(ConstraintRow::holonomic(as.expr_of(sec, *f), sc.n));
            } else if (kind->value == "kinematic") {
                ExprPtr a0 = zero();
                std::vector<ExprPtr> a(static_cast<std::size_t>(sc.n), zero());
                for (const auto& e : sec.entries) {
                    if (e.key == "kind")
                        continue;
                    if (e.key == "a0") {
                        a0 = as.expr_of(sec, e);
                    } else if (auto ai = Assembler::indexed(e.key, "a", 1)) {
                        int i = (*ai)[0];
                        if (i < 1 || i > sc.n)
                            as.fail(sec, e.line, "coefficient index out of range in '" + e.key + "'");
                        a[static_cast<std::size_t>(i - 1)] = as.expr_of(sec, e);
                    } else {
                        as.fail(sec, e.line, "unknown key '" + e.key + "'");
                    }
                }
                sc.rows.push_back(ConstraintRow::kinematic(std::move(a0), std::move(a)));
            } else {
                as.fail(sec, kind->line, "kind must be 'holonomic' or 'kinematic'");
            }
        } else if (sec.name.rfind("symmetry.", 0) == 0) {
            SymmetryRequest req;
            req.spec.label = sec.name.substr(std::string("symmetry.").size());
            req.spec.tau = zero();
            req.spec.xi.assign(static_cast<std::size_t>(sc.n), zero());
            req.spec.gauge = zero();
            OneForm beta = OneForm::zero(sc.n);
            OneForm gamma = OneForm::zero(sc.n);
            bool has_beta = false, has_gamma = false, has_xi0 = false;
            req.xi0.assign(static_cast<std::size_t>(sc.n), zero());

            auto slot = [&](const std::string& key, const std::string& stem,
                            std::vector<ExprPtr>& target, const RawEntry& e) {
                auto i = Assembler::indexed(key, stem, 1);
                if (!i)
                    return false;
                if ((*i)[0] < 1 || (*i)[0] > sc.n)
                    as.fail(sec, e.line, "index out of range in '" + key + "'");
                target[static_cast<std::size_t>((*i)[0] - 1)] = as.expr_of(sec, e);
                return true;
            };

            for (const auto& e : sec.entries) {
                if (e.key == "tau") {
                    req.spec.tau = as.expr_of(sec, e);
                } else if (e.key == "gauge") {
                    req.spec.gauge = as.expr_of(sec, e);
                } else if (e.key == "mode") {
                    if (e.value == "full")
                        req.spec.mode = ProlongationMode::Full;
                    else if (e.value == "cotangent")
                        req.spec.mode = ProlongationMode::CotangentLift;
                    else
                        as.fail(sec, e.line, "mode must be 'full' or 'cotangent'");
                } else if (e.key == "checks") {
                    std::stringstream ss(e.value);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        item = trim(item);
                        if (std::find(kKnownChecks.begin(), kKnownChecks.end(), item) ==
                            kKnownChecks.end())
                            as.fail(sec, e.line, "unknown check '" + item + "'");
                        req.checks.push_back(item);
                    }
                } else if (e.key == "beta_t") {
                    beta.t_comp = as.expr_of(sec, e);
                    has_beta = true;
                } else if (e.key == "gamma_t") {
                    gamma.t_comp = as.expr_of(sec, e);
                    has_gamma = true;
                } else if (slot(e.key, "xi0", req.xi0, e)) {
                    has_xi0 = true;
                } else if (slot(e.key, "xi", req.spec.xi, e)) {
                } else if (slot(e.key, "beta_q", beta.q_comp, e) ||
                           slot(e.key, "beta_p", beta.p_comp, e)) {
                    has_beta = true;
                } else if (slot(e.key, "gamma_q", gamma.q_comp, e) ||
                           slot(e.key, "gamma_p", gamma.p_comp, e)) {
                    has_gamma = true;
                } else {
                    as.fail(sec, e.line, "unknown key '" + e.key + "'");
                }
            }
            if (has_beta)
                req.spec.beta = std::move(beta);
            if (has_gamma)
                req.gamma = std::move(gamma);

            bool wants_generalized = std::find(req.checks.begin(), req.checks.end(),
                                               "generalized") != req.checks.end();
            if (wants_generalized && !has_gamma)
                as.fail(sec, sec.line, "the 'generalized' check needs gamma_* components");
            if (has_gamma && !wants_generalized)
                as.fail(sec, sec.line, "gamma_* given but 'generalized' is not requested");
            bool wants_moving = std::find(req.checks.begin(), req.checks.end(),
                                          "moving_energy") != req.checks.end();
            if (has_xi0 && !wants_moving)
                as.fail(sec, sec.line, "xi0 given but 'moving_energy' is not requested");
            sc.symmetries.push_back(std::move(req));
        } else if (sec.name == "integration") {
            saw_integration = true;
            for (const auto& e : sec.entries) {
                if (e.key == "t0")
                    sc.t0 = as.number_of(sec, e);
                else if (e.key == "q0")
                    sc.q0 = as.number_list_of(sec, e);
                else if (e.key == "p0")
                    sc.p0 = as.number_list_of(sec, e);
                else if (e.key == "h")
                    sc.h = as.number_of(sec, e);
                else if (e.key == "steps")
                    sc.steps = static_cast<int>(as.number_of(sec, e));
                else if (e.key == "projection")
                    sc.projection = e.value == "on" || e.value == "true";
                else if (e.key == "seed")
                    sc.seed = static_cast<std::uint64_t>(as.number_of(sec, e));
                else
                    as.fail(sec, e.line, "unknown key '" + e.key + "'");
            }
        } else if (sec.name == "verify") {
            for (const auto& e : sec.entries) {
                if (e.key == "gyroscopic")
                    sc.check_gyroscopic = e.value == "on" || e.value == "true";
                else if (e.key == "subset_directions")
                    sc.subset_directions = static_cast<int>(as.number_of(sec, e));
                else if (e.key == "oracle_states")
                    sc.oracle_states = static_cast<int>(as.number_of(sec, e));
                else
                    as.fail(sec, e.line, "unknown key '" + e.key + "'");
            }
        } else if (sec.name == "tolerances") {
            for (const auto& e : sec.entries) {
                if (e.key == "pointwise")
                    sc.tol.pointwise = as.number_of(sec, e);
                else if (e.key == "conservation_rel")
                    sc.tol.conservation_rel = as.number_of(sec, e);
                else if (e.key == "membership")
                    sc.tol.membership = as.number_of(sec, e);
                else if (e.key == "invariance")
                    sc.tol.invariance = as.number_of(sec, e);
                else if (e.key == "oracle_rel")
                    sc.tol.oracle_rel = as.number_of(sec, e);
                else
                    as.fail(sec, e.line, "unknown key '" + e.key + "'");
            }
        } else {
            raw.fail(sec.line, "unknown section [" + sec.name + "]");
        }
    }

    if (!saw_lagrangian || !saw_mass_entry)
        throw ScenarioError(origin + ": missing [lagrangian] section with mass entries");
    if (!saw_integration)
        throw ScenarioError(origin + ": missing [integration] section");
    if (sc.q0.size() != static_cast<std::size_t>(sc.n) ||
        sc.p0.size() != static_cast<std::size_t>(sc.n))
        throw ScenarioError(origin + ": q0/p0 arity does not match n");
    if (!(sc.h > 0.0))
        throw ScenarioError(origin + ": step size h must be positive");
    if (sc.steps < 1)
        throw ScenarioError(origin + ": steps must be at least 1");

    // name validation against the declared dimension and parameter table
    try {
        for (const auto& e : sc.lagrangian.mass_upper)
            validate_names(*e, sc.n, sc.params, false);
        for (const auto& e : sc.lagrangian.coupling)
            validate_names(*e, sc.n, sc.params, false);
        validate_names(*sc.lagrangian.potential, sc.n, sc.params, false);
        for (const auto& e : sc.force.components)
            validate_names(*e, sc.n, sc.params, true);
        for (const auto& row : sc.rows) {
            validate_names(*row.a0, sc.n, sc.params, false);
            for (const auto& e : row.a)
                validate_names(*e, sc.n, sc.params, false);
        }
        for (const auto& req : sc.symmetries) {
            validate_symmetry(req.spec, sc.n, sc.params);
            for (const auto& e : req.xi0)
                validate_names(*e, sc.n, sc.params, false);
            if (req.gamma) {
                validate_names(*req.gamma->t_comp, sc.n, sc.params, true);
                for (const auto& e : req.gamma->q_comp)
                    validate_names(*e, sc.n, sc.params, true);
                for (const auto& e : req.gamma->p_comp)
                    validate_names(*e, sc.n, sc.params, true);
            }
        }
    } catch (const ScenarioError& err) {
        throw ScenarioError(origin + ": " + err.what());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ScenarioError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str(), path.string());
}

// ---------------------------------------------------------------------------
// preparation and execution
// ---------------------------------------------------------------------------

PreparedScenario prepare(const Scenario& sc) {
    MechSystem system(sc.lagrangian, sc.force, sc.rows, sc.params);
    PhaseState init;
    init.t = sc.t0;
    init.q = Eigen::Map<const Vec>(sc.q0.data(), sc.n);
    init.p = Eigen::Map<const Vec>(sc.p0.data(), sc.n);
    double violation = manifold_violation(system, init.t, init.q, init.p);
    if (violation > 1e-6)
        throw ScenarioError(sc.source + ": initial state violates the constraints by " +
                            std::to_string(violation) + " (must be within 1e-6)");
    init = project_to_manifold(system, init);
    return PreparedScenario{std::move(system), std::move(init)};
}

RunResult run_scenario(const Scenario& sc) {
    PreparedScenario prep = prepare(sc);
    const MechSystem& sys = prep.system;

    std::vector<SymmetryEngine> engines;
    engines.reserve(sc.symmetries.size());
    for (const auto& req : sc.symmetries)
        engines.emplace_back(req.spec, sys);

    IntegrateOptions iopt;
    iopt.projection = sc.projection;
    Trajectory traj = integrate(sys, prep.initial, sc.h, sc.steps, iopt);

    SampleWindow window;
    window.t0 = sc.t0;
    window.t1 = sc.t0 + sc.h * sc.steps;
    window.q_center = prep.initial.q;

    MembershipOptions mopt;
    mopt.tol = sc.tol.membership;
    mopt.seed = sc.seed + 17;

    RunResult result;
    result.report.scenario = sc.name;

    for (std::size_t i = 0; i < sc.symmetries.size(); ++i) {
        const SymmetryRequest& req = sc.symmetries[i];
        const SymmetryEngine& engine = engines[i];
        for (const std::string& check : req.checks) {
            if (check == "conservation") {
                SymmetryDrift drift;
                result.report.entries.push_back(
                    conservation_report(sys, engine, traj, sc.tol, &drift));
                result.report.drifts.push_back(drift);
            } else if (check == "momentum") {
                auto entries = momentum_equation_report(sys, engine, traj, sc.tol);
                result.report.entries.insert(result.report.entries.end(), entries.begin(),
                                             entries.end());
            } else if (check == "invariance") {
                result.report.entries.push_back(
                    invariance_report(sys, engine, window, 100, sc.seed + 29, sc.tol));
            } else if (check == "membership") {
                result.report.entries.push_back(membership_report(sys, engine, traj, mopt));
            } else if (check == "weak_noether") {
                result.report.entries.push_back(weak_noether_report(sys, engine, traj, sc.tol));
            } else if (check == "bracket") {
                result.report.entries.push_back(bracket_report(sys, engine, traj, sc.tol));
            } else if (check == "moving_energy") {
                SymmetryDrift drift;
                auto entries =
                    moving_energy_report(sys, engine, req.xi0, traj, mopt, sc.tol, &drift);
                result.report.entries.insert(result.report.entries.end(), entries.begin(),
                                             entries.end());
                result.report.drifts.push_back(drift);
            } else if (check == "generalized") {
                auto entries = generalized_report(sys, engine, *req.gamma, traj, sc.tol);
                result.report.entries.insert(result.report.entries.end(), entries.begin(),
                                             entries.end());
            }
        }
    }

    if (sc.check_gyroscopic)
        result.report.entries.push_back(
            gyroscopic_check(sys, window, 50, sc.seed + 41, sc.tol));
    if (sc.subset_directions > 0) {
        auto entries = subset_check(sys, window, sc.subset_directions, mopt, sc.seed + 53);
        result.report.entries.insert(result.report.entries.end(), entries.begin(), entries.end());
    }
    if (sc.oracle_states > 0)
        result.report.entries.push_back(
            multiplier_oracle_report(sys, traj, sc.oracle_states, sc.tol));

    summarize_trajectory(sys, traj, result.report);

    for (std::size_t i = 0; i < engines.size(); ++i) {
        result.j_labels.push_back(sc.symmetries[i].spec.label);
        std::vector<double> series;
        series.reserve(traj.samples.size());
        for (const auto& s : traj.samples)
            series.push_back(engines[i].noether(s.state));
        result.j_series.push_back(std::move(series));
    }
    result.trajectory = std::move(traj);
    return result;
}

// ---------------------------------------------------------------------------
// output files
// ---------------------------------------------------------------------------

namespace {

void append_g17(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string trajectory_csv(const Scenario& sc, const RunResult& result) {
    std::string out;
    out += "t";
    for (int i = 1; i <= sc.n; ++i)
        out += ",q" + std::to_string(i);
    for (int i = 1; i <= sc.n; ++i)
        out += ",p" + std::to_string(i);
    const int k = static_cast<int>(sc.rows.size());
    for (int l = 1; l <= k; ++l)
        out += ",lambda" + std::to_string(l);
    for (const auto& label : result.j_labels)
        out += "," + label + "_J";
    out += ",constraint_drift\n";

    for (std::size_t s = 0; s < result.trajectory.samples.size(); ++s) {
        const TrajectorySample& sample = result.trajectory.samples[s];
        append_g17(out, sample.state.t);
        for (int i = 0; i < sc.n; ++i) {
            out += ',';
            append_g17(out, sample.state.q(i));
        }
        for (int i = 0; i < sc.n; ++i) {
            out += ',';
            append_g17(out, sample.state.p(i));
        }
        for (int l = 0; l < k; ++l) {
            out += ',';
            append_g17(out, sample.lambda(l));
        }
        for (const auto& series : result.j_series) {
            out += ',';
            append_g17(out, series[s]);
        }
        out += ',';
        append_g17(out, sample.constraint_drift);
        out += '\n';
    }
    return out;
}

void write_outputs(const Scenario& sc, const RunResult& result,
                   const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto dump = [&](const char* name, const std::string& content) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f)
            throw Error("cannot write '" + (out_dir / name).string() + "'");
        f << content;
    };
    dump("trajectory.csv", trajectory_csv(sc, result));
    dump("report.txt", render_text(result.report));
    dump("report.json", render_json(result.report));
}

// ---------------------------------------------------------------------------
// builtins
// ---------------------------------------------------------------------------

namespace {

struct BuiltinEntry {
    const char* name;
    const char* summary;
    const char* text;
};

// Shared fragments of the charged-point-mass setup keep the builtin texts in
// sync; the scenario texts below are complete files in the documented format.

const BuiltinEntry kBuiltins[] = {
    {"example1-momentum",
     "charged point mass, moving affine row; lateral momentum-type integral "
     "p_y - m g ky t + eps x stays constant",
     R"scn(
[scenario]
name = example1-momentum
n = 3

[params]
m = 1
g = 9.81
eps = 0.5
kx = 0.2
ky = 0.5
kz = 0.84261498

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = 0

[force]
F(1) = m*g*kx + eps*p2/m
F(2) = m*g*ky - eps*p1/m
F(3) = m*g*kz

[constraint.1]
kind = kinematic
a0 = 0.1*cos(t)
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.lateral]
tau = 0
xi(1) = 0
xi(2) = 1
xi(3) = 0
gauge = m*g*ky*t - eps*q1
checks = conservation, momentum, membership

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1.1
h = 1e-3
steps = 10000
projection = on
seed = 20240601

[verify]
subset_directions = 20
oracle_states = 50
)scn"},

    {"example1-gauge",
     "same point mass, homogeneous row, no forces along the row: the scaled "
     "direction (f, 0, a y f) conserves p_x sqrt(1 + a^2 y^2)",
     R"scn(
[scenario]
name = example1-gauge
n = 3

[params]
m = 1
g = 9.81
eps = 0
kx = 0
ky = 1
kz = 0

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = 0

[force]
F(1) = m*g*kx + eps*p2/m
F(2) = m*g*ky - eps*p1/m
F(3) = m*g*kz

[constraint.1]
kind = kinematic
a0 = 0
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.gauge]
tau = 0
xi(1) = 1/sqrt(1+(1+0.5*sin(t))^2*q2^2)
xi(2) = 0
xi(3) = (1+0.5*sin(t))*q2/sqrt(1+(1+0.5*sin(t))^2*q2^2)
checks = conservation, momentum, invariance, membership

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1
h = 1e-3
steps = 10000
projection = on
seed = 20240602

[tolerances]
conservation_rel = 1e-6
)scn"},

    {"example1-gauge-control",
     "falsification control: with the magnetic term switched on the gauge "
     "integral is intentionally not conserved (expected exit 1)",
     R"scn(
[scenario]
name = example1-gauge-control
n = 3

[params]
m = 1
g = 9.81
eps = 0.3
kx = 0
ky = 1
kz = 0

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = 0

[force]
F(1) = m*g*kx + eps*p2/m
F(2) = m*g*ky - eps*p1/m
F(3) = m*g*kz

[constraint.1]
kind = kinematic
a0 = 0
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.gauge]
tau = 0
xi(1) = 1/sqrt(1+(1+0.5*sin(t))^2*q2^2)
xi(2) = 0
xi(3) = (1+0.5*sin(t))*q2/sqrt(1+(1+0.5*sin(t))^2*q2^2)
checks = conservation, momentum, invariance, membership

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1
h = 1e-3
steps = 10000
projection = on
seed = 20240603

[tolerances]
conservation_rel = 1e-6
)scn"},

    {"example1-xdir-control",
     "falsification control: the bare x-direction is outside the "
     "reaction annihilator, so the force-only momentum balance fails "
     "(expected exit 1)",
     R"scn(
[scenario]
name = example1-xdir-control
n = 3

[params]
m = 1
g = 9.81
eps = 0.5
kx = 0.2
ky = 0.5
kz = 0.84261498

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = 0

[force]
F(1) = m*g*kx + eps*p2/m
F(2) = m*g*ky - eps*p1/m
F(3) = m*g*kz

[constraint.1]
kind = kinematic
a0 = 0.1*cos(t)
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.xdir]
tau = 0
xi(1) = 1
xi(2) = 0
xi(3) = 0
checks = momentum, membership

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1.1
h = 1e-3
steps = 2000
projection = on
seed = 20240604
)scn"},

    {"example1-vector-potential",
     "same physics with the magnetic coupling moved into the Lagrangian "
     "b-term: the lateral direction becomes a weak symmetry with gauge "
     "m g ky t",
     R"scn(
[scenario]
name = example1-vector-potential
n = 3

[params]
m = 1
g = 9.81
eps = 0.4
kx = 0.2
ky = 0.5
kz = 0.84261498

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
b(2) = eps*q1
V = -(m*g*(kx*q1+ky*q2+kz*q3))

[constraint.1]
kind = kinematic
a0 = 0.1*cos(t)
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.lateral]
tau = 0
xi(1) = 0
xi(2) = 1
xi(3) = 0
gauge = m*g*ky*t
checks = conservation, weak_noether, membership

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1.1
h = 1e-3
steps = 10000
projection = on
seed = 20240605
)scn"},

    {"example2-energy",
     "gravity in the potential, gyroscopic magnetic force, homogeneous "
     "moving row: the energy is a conserved moving-energy integral",
     R"scn(
[scenario]
name = example2-energy
n = 3

[params]
m = 1
g = 9.81
eps = 0.3
kx = 0.2
ky = 0.5
kz = 0.84261498

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = -(m*g*(kx*q1+ky*q2+kz*q3))

[force]
F(1) = eps*p2/m
F(2) = -(eps*p1/m)
F(3) = 0

[constraint.1]
kind = kinematic
a0 = 0
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.energy]
tau = 1
xi(1) = 0
xi(2) = 0
xi(3) = 0
checks = moving_energy

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1
h = 1e-3
steps = 10000
projection = on
seed = 20240606

[verify]
gyroscopic = on
subset_directions = 20
oracle_states = 50
)scn"},

    {"example2-affine-control",
     "falsification control: with an inhomogeneous row the reaction does "
     "work and the energy visibly drifts (expected exit 1)",
     R"scn(
[scenario]
name = example2-affine-control
n = 3

[params]
m = 1
g = 9.81
eps = 0.3
kx = 0.2
ky = 0.5
kz = 0.84261498

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = -(m*g*(kx*q1+ky*q2+kz*q3))

[force]
F(1) = eps*p2/m
F(2) = -(eps*p1/m)
F(3) = 0

[constraint.1]
kind = kinematic
a0 = 0.1*cos(t)
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.energy]
tau = 1
xi(1) = 0
xi(2) = 0
xi(3) = 0
xi0(1) = -(0.1*cos(t))*(1+0.5*sin(t))*q2/(1+((1+0.5*sin(t))*q2)^2)
xi0(2) = 0
xi0(3) = (0.1*cos(t))/(1+((1+0.5*sin(t))*q2)^2)
checks = moving_energy

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1.1
h = 1e-3
steps = 10000
projection = on
seed = 20240607
)scn"},

    {"free-particle",
     "unconstrained sanity case: straight-line motion, conserved momenta "
     "and commuting symmetry flows",
     R"scn(
[scenario]
name = free-particle
n = 3

[params]
m = 1

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = 0

[symmetry.xdir]
tau = 0
xi(1) = 1
xi(2) = 0
xi(3) = 0
checks = conservation, momentum, membership, weak_noether, bracket

[symmetry.time]
tau = 1
xi(1) = 0
xi(2) = 0
xi(3) = 0
checks = conservation, weak_noether, bracket

[integration]
t0 = 0
q0 = 0, 0, 0
p0 = 1, 0.5, -0.25
h = 1e-3
steps = 2000
projection = on
seed = 20240608
)scn"},

    {"oscillator-rotation",
     "planar anharmonic oscillator with a rotation-invariant potential: "
     "angular momentum and energy are conserved, flows commute",
     R"scn(
[scenario]
name = oscillator-rotation
n = 2

[params]
omega = 1

[lagrangian]
M(1,1) = 1
M(2,2) = 1
V = 0.5*omega^2*(q1^2+q2^2) + 0.1*(q1^2+q2^2)^2

[symmetry.rotation]
tau = 0
xi(1) = -q2
xi(2) = q1
checks = conservation, momentum, invariance, membership, weak_noether, bracket

[symmetry.time]
tau = 1
xi(1) = 0
xi(2) = 0
checks = conservation, weak_noether, bracket

[integration]
t0 = 0
q0 = 1, 0
p0 = 0, 1.2
h = 1e-3
steps = 10000
projection = on
seed = 20240609

[tolerances]
pointwise = 1e-9
)scn"},

    {"example1-gamma-synthetic",
     "force-free gauge direction balanced by a correction 1-form "
     "proportional to the constraint defect: both relaxed conditions hold "
     "and the integral survives",
     R"scn(
[scenario]
name = example1-gamma-synthetic
n = 3

[params]
m = 1

[lagrangian]
M(1,1) = m
M(2,2) = m
M(3,3) = m
V = 0

[constraint.1]
kind = kinematic
a0 = 0
a(1) = (1+0.5*sin(t))*q2
a(2) = 0
a(3) = -1

[symmetry.gauge]
tau = 0
xi(1) = 1/sqrt(1+(1+0.5*sin(t))^2*q2^2)
xi(2) = 0
xi(3) = (1+0.5*sin(t))*q2/sqrt(1+(1+0.5*sin(t))^2*q2^2)
gamma_t = (1+(1+0.5*sin(t))^2*q2^2)^(-3/2)*((1+0.5*sin(t))*p2/m+0.5*cos(t)*q2)*(p3-(1+0.5*sin(t))*q2*p1)
checks = conservation, generalized, membership

[integration]
t0 = 0
q0 = 0, 1, 0
p0 = 1, 0.5, 1
h = 1e-3
steps = 10000
projection = on
seed = 20240610

[tolerances]
pointwise = 1e-9
conservation_rel = 1e-6
)scn"},
};

} // namespace

const std::vector<BuiltinInfo>& builtin_scenarios() {
    static const std::vector<BuiltinInfo> infos = [] {
        std::vector<BuiltinInfo> v;
        for (const auto& b : kBuiltins)
            v.push_back({b.name, b.summary});
        return v;
    }();
    return infos;
}

bool is_builtin(const std::string& name) {
    for (const auto& b : kBuiltins)
        if (name == b.name)
            return true;
    return false;
}

Scenario load_builtin(const std::string& name) {
    for (const auto& b : kBuiltins)
        if (name == b.name)
            return load_scenario_text(b.text, "builtin:" + name);
    throw ScenarioError("unknown builtin scenario '" + name + "' (see list-builtins)");
}

std::string list_builtins_text() {
    std::string out;
    for (const auto& b : kBuiltins) {
        out += b.name;
        out += "\n    ";
        out += b.summary;
        out += "\n";
    }
    return out;
}

} // namespace nhsym
