/* nhsym - time-dependent constrained mechanics with conservation-law
 * verification. C interface over the C++ core: opaque handles, integer
 * status codes, thread-local error messages.
 *
 * Every function returning nhsym_status sets the thread-local message
 * retrievable through nhsym_last_error() on failure. Handles are created
 * through the corresponding *_free function's counterpart and are not
 * thread-safe individually; distinct handles may be used from distinct
 * threads concurrently.
 */

#ifndef NHSYM_H
#define NHSYM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nhsym_status {
    NHSYM_OK = 0,
    NHSYM_ERROR_INVALID_ARGUMENT = 1,
    NHSYM_ERROR_PARSE = 2,  /* expression syntax */
    NHSYM_ERROR_DOMAIN = 3, /* numeric domain (sqrt of negative, ...) */
    NHSYM_ERROR_MODEL = 4,  /* indefinite mass matrix, rank-deficient rows, ... */
    NHSYM_ERROR_INTEGRATION = 5,
    NHSYM_ERROR_SCENARIO = 6, /* scenario file or builtin validation */
    NHSYM_ERROR_IO = 7,
    NHSYM_ERROR_INTERNAL = 8
} nhsym_status;

const char* nhsym_version(void);

/* Message describing the most recent failure on this thread. */
const char* nhsym_last_error(void);

/* ---------------------------------------------------------------- */
/* expressions                                                       */
/* ---------------------------------------------------------------- */

typedef struct nhsym_expr nhsym_expr;

/* Grammar: +, -, *, /, ^ (constant integer/rational exponent), unary minus,
 * sqrt/sin/cos/exp/ln, variables t, q1..qn, p1..pn and parameter names. */
nhsym_status nhsym_expr_parse(const char* source, nhsym_expr** out);

nhsym_status nhsym_expr_diff(const nhsym_expr* e, const char* variable, nhsym_expr** out);

/* Printed form; parses back to the same tree. Owned by the handle. */
const char* nhsym_expr_format(nhsym_expr* e);

nhsym_status nhsym_expr_eval(const nhsym_expr* e, double t, const double* q, int nq,
                             const double* p, int np, const char* const* param_names,
                             const double* param_values, int nparams, double* out);

void nhsym_expr_free(nhsym_expr* e);

/* ---------------------------------------------------------------- */
/* scenarios                                                         */
/* ---------------------------------------------------------------- */

typedef struct nhsym_scenario nhsym_scenario;

/* Resolve a builtin name first, then fall back to a file path. */
nhsym_status nhsym_scenario_open(const char* name_or_path, nhsym_scenario** out);
nhsym_status nhsym_scenario_load_file(const char* path, nhsym_scenario** out);
nhsym_status nhsym_scenario_load_builtin(const char* name, nhsym_scenario** out);

const char* nhsym_scenario_name(const nhsym_scenario* s);

/* Overrides applied before running (CLI flags --h, --steps, --seed). */
nhsym_status nhsym_scenario_set_step(nhsym_scenario* s, double h);
nhsym_status nhsym_scenario_set_steps(nhsym_scenario* s, long steps);
nhsym_status nhsym_scenario_set_seed(nhsym_scenario* s, unsigned long long seed);

/* Build the system and admit the initial state without integrating. */
nhsym_status nhsym_scenario_validate(const nhsym_scenario* s);

void nhsym_scenario_free(nhsym_scenario* s);

int nhsym_builtin_count(void);
const char* nhsym_builtin_name(int index);
const char* nhsym_builtin_summary(int index);
/* One name per line with an indented summary; static storage. */
const char* nhsym_builtin_listing(void);

/* ---------------------------------------------------------------- */
/* runs                                                              */
/* ---------------------------------------------------------------- */

typedef struct nhsym_run nhsym_run;

/* Integrate and evaluate every requested check. When out_dir is non-NULL,
 * trajectory.csv, report.txt and report.json are written under it. */
nhsym_status nhsym_scenario_run(const nhsym_scenario* s, const char* out_dir, nhsym_run** out);

/* 1 when every requested check passed. */
int nhsym_run_passed(const nhsym_run* r);

int nhsym_run_check_count(const nhsym_run* r);
const char* nhsym_run_check_name(const nhsym_run* r, int index);
int nhsym_run_check_passed(const nhsym_run* r, int index);
double nhsym_run_check_residual(const nhsym_run* r, int index);
double nhsym_run_check_tolerance(const nhsym_run* r, int index);

/* Rendered reports; owned by the handle. */
const char* nhsym_run_report_text(nhsym_run* r);
const char* nhsym_run_report_json(nhsym_run* r);

void nhsym_run_free(nhsym_run* r);

#ifdef __cplusplus
}
#endif

#endif /* NHSYM_H */
