#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace nhsym {

// Symbolic expressions over the variables t, q1..qn, p1..pn and named scalar
// parameters. Trees are immutable after construction and safe to share
// between threads; all mutable evaluation state lives in Bindings.

enum class UnaryOp { Neg, Sqrt, Sin, Cos, Exp, Ln };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class VarKind { Time, Coord, Momentum, Param };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Constant, Variable, Unary, Binary };

    Kind kind;
    double value = 0.0;              // Constant
    std::string name;                // Variable
    VarKind var_kind = VarKind::Param;
    int var_index = 0;               // 1-based coordinate/momentum index
    UnaryOp uop = UnaryOp::Neg;
    BinaryOp bop = BinaryOp::Add;
    ExprPtr a;                       // unary child / binary lhs
    ExprPtr b;                       // binary rhs
};

/// Scalar parameter table, looked up by name during evaluation.
class ParamTable {
public:
    void set(const std::string& name, double value);
    const double* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }
    const std::vector<std::pair<std::string, double>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, double>> entries_; // kept sorted by name
};

/// Everything an expression may refer to at one evaluation point.
struct Bindings {
    double t = 0.0;
    std::span<const double> q;
    std::span<const double> p;
    const ParamTable* params = nullptr;
};

// ---- node construction (no folding beyond negated literals) ----

ExprPtr constant(double v);
ExprPtr variable(std::string name);
ExprPtr unary(UnaryOp op, ExprPtr child);
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);

// ---- constant-folding builders, used by diff() and by generators ----

ExprPtr f_neg(ExprPtr x);
ExprPtr f_add(ExprPtr x, ExprPtr y);
ExprPtr f_sub(ExprPtr x, ExprPtr y);
ExprPtr f_mul(ExprPtr x, ExprPtr y);
ExprPtr f_div(ExprPtr x, ExprPtr y);
ExprPtr f_pow(ExprPtr base, ExprPtr exponent);
ExprPtr f_unary(UnaryOp op, ExprPtr x);

ExprPtr zero();
ExprPtr one();

// ---- core operations ----

/// Parse the documented infix grammar. Precedence ^ > unary- > * / > + -,
/// left associative except ^ (right associative). Throws ParseError.
ExprPtr parse(std::string_view source);

/// Evaluate to IEEE double. Throws DomainError naming the offending
/// subexpression, or Error for an unbound variable.
double eval(const Expr& e, const Bindings& b);
inline double eval(const ExprPtr& e, const Bindings& b) { return eval(*e, b); }

/// Exact partial derivative with respect to a variable name ("t", "q2",
/// a parameter name, ...). Output is constant-folded.
ExprPtr diff(const ExprPtr& e, const std::string& var);

/// Print so that parse(format(e)) is structurally equal to e.
std::string format(const Expr& e);
inline std::string format(const ExprPtr& e) { return format(*e); }

/// Structural equality (constants compared bit-for-bit).
bool equal(const Expr& x, const Expr& y);
inline bool equal(const ExprPtr& x, const ExprPtr& y) { return equal(*x, *y); }

/// True if no Variable node occurs in e.
bool is_constant(const Expr& e);
inline bool is_constant(const ExprPtr& e) { return is_constant(*e); }

/// Evaluate an expression containing no variables. Throws otherwise.
double const_value(const Expr& e);
inline double const_value(const ExprPtr& e) { return const_value(*e); }

/// True if e mentions the given variable name.
bool depends_on(const Expr& e, const std::string& var);
inline bool depends_on(const ExprPtr& e, const std::string& var) { return depends_on(*e, var); }

/// Collect distinct variable names in order of first appearance.
std::vector<std::string> collect_variables(const Expr& e);

/// Check that every variable is t, q1..qn, p1..pn or a declared parameter.
/// `allow_momenta` gates p-variables (mass matrix, potential and constraint
/// coefficients live on (t,q) only). Throws ScenarioError on violation.
void validate_names(const Expr& e, int n, const ParamTable& params, bool allow_momenta);

} // namespace nhsym
