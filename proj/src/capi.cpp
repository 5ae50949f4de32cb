#include "nhsym/nhsym.h"

#include <string>

#include "scenario.hpp"

using namespace nhsym;

struct nhsym_expr {
    ExprPtr expr;
    std::string formatted;
};

struct nhsym_scenario {
    Scenario scenario;
};

struct nhsym_run {
    Scenario scenario;
    RunResult result;
    std::string text;
    std::string json;
};

namespace {

thread_local std::string g_last_error;

nhsym_status fail(nhsym_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

/// Run `fn`, translating exceptions into status codes.
template <typename Fn> nhsym_status guarded(Fn&& fn) {
    try {
        fn();
        return NHSYM_OK;
    } catch (const ParseError& e) {
        return fail(NHSYM_ERROR_PARSE, e.what());
    } catch (const DomainError& e) {
        return fail(NHSYM_ERROR_DOMAIN, e.what());
    } catch (const ModelError& e) {
        return fail(NHSYM_ERROR_MODEL, e.what());
    } catch (const IntegrationError& e) {
        return fail(NHSYM_ERROR_INTEGRATION, e.what());
    } catch (const ScenarioError& e) {
        return fail(NHSYM_ERROR_SCENARIO, e.what());
    } catch (const std::exception& e) {
        return fail(NHSYM_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(NHSYM_ERROR_INTERNAL, "unknown error");
    }
}

} // namespace

extern "C" {

const char* nhsym_version(void) { return "1.0.0"; }

const char* nhsym_last_error(void) { return g_last_error.c_str(); }

/* ------------------------------ expressions ---------------------------- */

nhsym_status nhsym_expr_parse(const char* source, nhsym_expr** out) {
    if (!source || !out)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new nhsym_expr{parse(source), {}}; });
}

nhsym_status nhsym_expr_diff(const nhsym_expr* e, const char* variable, nhsym_expr** out) {
    if (!e || !variable || !out)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new nhsym_expr{diff(e->expr, variable), {}}; });
}

const char* nhsym_expr_format(nhsym_expr* e) {
    if (!e)
        return "";
    if (e->formatted.empty())
        e->formatted = format(e->expr);
    return e->formatted.c_str();
}

nhsym_status nhsym_expr_eval(const nhsym_expr* e, double t, const double* q, int nq,
                             const double* p, int np, const char* const* param_names,
                             const double* param_values, int nparams, double* out) {
    if (!e || !out || (nq > 0 && !q) || (np > 0 && !p) ||
        (nparams > 0 && (!param_names || !param_values)))
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    return guarded([&] {
        ParamTable params;
        for (int i = 0; i < nparams; ++i)
            params.set(param_names[i], param_values[i]);
        Bindings b{t, std::span<const double>(q, static_cast<std::size_t>(nq)),
                   std::span<const double>(p, static_cast<std::size_t>(np)), &params};
        *out = eval(e->expr, b);
    });
}

void nhsym_expr_free(nhsym_expr* e) { delete e; }

/* ------------------------------- scenarios ----------------------------- */

nhsym_status nhsym_scenario_open(const char* name_or_path, nhsym_scenario** out) {
    if (!name_or_path || !out)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        if (is_builtin(name_or_path))
            *out = new nhsym_scenario{load_builtin(name_or_path)};
        else
            *out = new nhsym_scenario{load_scenario(name_or_path)};
    });
}

nhsym_status nhsym_scenario_load_file(const char* path, nhsym_scenario** out) {
    if (!path || !out)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new nhsym_scenario{load_scenario(path)}; });
}

nhsym_status nhsym_scenario_load_builtin(const char* name, nhsym_scenario** out) {
    if (!name || !out)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] { *out = new nhsym_scenario{load_builtin(name)}; });
}

const char* nhsym_scenario_name(const nhsym_scenario* s) {
    return s ? s->scenario.name.c_str() : "";
}

nhsym_status nhsym_scenario_set_step(nhsym_scenario* s, double h) {
    if (!s)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null scenario");
    if (!(h > 0.0))
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "step size must be positive");
    s->scenario.h = h;
    return NHSYM_OK;
}

nhsym_status nhsym_scenario_set_steps(nhsym_scenario* s, long steps) {
    if (!s)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null scenario");
    if (steps < 1)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "steps must be at least 1");
    s->scenario.steps = static_cast<int>(steps);
    return NHSYM_OK;
}

nhsym_status nhsym_scenario_set_seed(nhsym_scenario* s, unsigned long long seed) {
    if (!s)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null scenario");
    s->scenario.seed = seed;
    return NHSYM_OK;
}

nhsym_status nhsym_scenario_validate(const nhsym_scenario* s) {
    if (!s)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null scenario");
    return guarded([&] { prepare(s->scenario); });
}

void nhsym_scenario_free(nhsym_scenario* s) { delete s; }

int nhsym_builtin_count(void) { return static_cast<int>(builtin_scenarios().size()); }

const char* nhsym_builtin_name(int index) {
    const auto& infos = builtin_scenarios();
    if (index < 0 || index >= static_cast<int>(infos.size()))
        return "";
    return infos[static_cast<std::size_t>(index)].name.c_str();
}

const char* nhsym_builtin_summary(int index) {
    const auto& infos = builtin_scenarios();
    if (index < 0 || index >= static_cast<int>(infos.size()))
        return "";
    return infos[static_cast<std::size_t>(index)].summary.c_str();
}

const char* nhsym_builtin_listing(void) {
    static const std::string listing = list_builtins_text();
    return listing.c_str();
}

/* --------------------------------- runs -------------------------------- */

nhsym_status nhsym_scenario_run(const nhsym_scenario* s, const char* out_dir, nhsym_run** out) {
    if (!s || !out)
        return fail(NHSYM_ERROR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    return guarded([&] {
        auto run = std::make_unique<nhsym_run>();
        run->scenario = s->scenario;
        run->result = run_scenario(run->scenario);
        if (out_dir)
            write_outputs(run->scenario, run->result, out_dir);
        *out = run.release();
    });
}

int nhsym_run_passed(const nhsym_run* r) { return r && r->result.passed() ? 1 : 0; }

int nhsym_run_check_count(const nhsym_run* r) {
    return r ? static_cast<int>(r->result.report.entries.size()) : 0;
}

const char* nhsym_run_check_name(const nhsym_run* r, int index) {
    if (!r || index < 0 || index >= nhsym_run_check_count(r))
        return "";
    return r->result.report.entries[static_cast<std::size_t>(index)].name.c_str();
}

int nhsym_run_check_passed(const nhsym_run* r, int index) {
    if (!r || index < 0 || index >= nhsym_run_check_count(r))
        return 0;
    return r->result.report.entries[static_cast<std::size_t>(index)].pass ? 1 : 0;
}

double nhsym_run_check_residual(const nhsym_run* r, int index) {
    if (!r || index < 0 || index >= nhsym_run_check_count(r))
        return 0.0;
    return r->result.report.entries[static_cast<std::size_t>(index)].max_residual;
}

double nhsym_run_check_tolerance(const nhsym_run* r, int index) {
    if (!r || index < 0 || index >= nhsym_run_check_count(r))
        return 0.0;
    return r->result.report.entries[static_cast<std::size_t>(index)].tolerance;
}

const char* nhsym_run_report_text(nhsym_run* r) {
    if (!r)
        return "";
    if (r->text.empty())
        r->text = render_text(r->result.report);
    return r->text.c_str();
}

const char* nhsym_run_report_json(nhsym_run* r) {
    if (!r)
        return "";
    if (r->json.empty())
        r->json = render_json(r->result.report);
    return r->json.c_str();
}

void nhsym_run_free(nhsym_run* r) { delete r; }

} // extern "C"
