#include "expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>

namespace nhsym {

namespace {

bool bits_equal(double x, double y) {
    return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
}

// "q12" -> (Coord, 12); "p3" -> (Momentum, 3); "t" -> Time; anything else Param.
std::pair<VarKind, int> classify_name(const std::string& name) {
    if (name == "t")
        return {VarKind::Time, 0};
    if (name.size() >= 2 && (name[0] == 'q' || name[0] == 'p')) {
        bool digits = true;
        for (std::size_t i = 1; i < name.size(); ++i)
            digits = digits && name[i] >= '0' && name[i] <= '9';
        if (digits && name[1] != '0') {
            int idx = std::atoi(name.c_str() + 1);
            return {name[0] == 'q' ? VarKind::Coord : VarKind::Momentum, idx};
        }
    }
    return {VarKind::Param, 0};
}

} // namespace

void ParamTable::set(const std::string& name, double value) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const auto& e, const std::string& s) { return e.first < s; });
    if (it != entries_.end() && it->first == name)
        it->second = value;
    else
        entries_.insert(it, {name, value});
}

const double* ParamTable::find(const std::string& name) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const auto& e, const std::string& s) { return e.first < s; });
    if (it != entries_.end() && it->first == name)
        return &it->second;
    return nullptr;
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

ExprPtr constant(double v) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Constant;
    e->value = v;
    return e;
}

ExprPtr variable(std::string name) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Variable;
    auto [kind, idx] = classify_name(name);
    e->var_kind = kind;
    e->var_index = idx;
    e->name = std::move(name);
    return e;
}

ExprPtr unary(UnaryOp op, ExprPtr child) {
    // Negated literals collapse so that format/parse round-trips: the parser
    // produces nonnegative literals and this fold is its inverse.
    if (op == UnaryOp::Neg && child->kind == Expr::Kind::Constant)
        return constant(-child->value);
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Unary;
    e->uop = op;
    e->a = std::move(child);
    return e;
}

ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->bop = op;
    e->a = std::move(lhs);
    e->b = std::move(rhs);
    return e;
}

ExprPtr zero() {
    static const ExprPtr z = constant(0.0);
    return z;
}

ExprPtr one() {
    static const ExprPtr o = constant(1.0);
    return o;
}

// ---------------------------------------------------------------------------
// folding builders
// ---------------------------------------------------------------------------

namespace {

bool is_const(const ExprPtr& e, double v) {
    return e->kind == Expr::Kind::Constant && e->value == v;
}

bool is_any_const(const ExprPtr& e) { return e->kind == Expr::Kind::Constant; }

// Fold two literals unless the result is non-finite (keep the tree printable).
ExprPtr fold2(BinaryOp op, const ExprPtr& x, const ExprPtr& y, double v) {
    if (std::isfinite(v))
        return constant(v);
    return binary(op, x, y);
}

} // namespace

ExprPtr f_neg(ExprPtr x) {
    if (x->kind == Expr::Kind::Constant)
        return constant(-x->value);
    if (x->kind == Expr::Kind::Unary && x->uop == UnaryOp::Neg)
        return x->a;
    return unary(UnaryOp::Neg, std::move(x));
}

ExprPtr f_add(ExprPtr x, ExprPtr y) {
    if (is_const(x, 0.0)) return y;
    if (is_const(y, 0.0)) return x;
    if (is_any_const(x) && is_any_const(y)) return fold2(BinaryOp::Add, x, y, x->value + y->value);
    return binary(BinaryOp::Add, std::move(x), std::move(y));
}

ExprPtr f_sub(ExprPtr x, ExprPtr y) {
    if (is_const(y, 0.0)) return x;
    if (is_const(x, 0.0)) return f_neg(std::move(y));
    if (is_any_const(x) && is_any_const(y)) return fold2(BinaryOp::Sub, x, y, x->value - y->value);
    return binary(BinaryOp::Sub, std::move(x), std::move(y));
}

ExprPtr f_mul(ExprPtr x, ExprPtr y) {
    if (is_const(x, 0.0) || is_const(y, 0.0)) return zero();
    if (is_const(x, 1.0)) return y;
    if (is_const(y, 1.0)) return x;
    if (is_const(x, -1.0)) return f_neg(std::move(y));
    if (is_const(y, -1.0)) return f_neg(std::move(x));
    if (is_any_const(x) && is_any_const(y)) return fold2(BinaryOp::Mul, x, y, x->value * y->value);
    return binary(BinaryOp::Mul, std::move(x), std::move(y));
}

ExprPtr f_div(ExprPtr x, ExprPtr y) {
    if (is_const(x, 0.0) && !is_const(y, 0.0)) return zero();
    if (is_const(y, 1.0)) return x;
    if (is_any_const(x) && is_any_const(y) && y->value != 0.0)
        return fold2(BinaryOp::Div, x, y, x->value / y->value);
    return binary(BinaryOp::Div, std::move(x), std::move(y));
}

ExprPtr f_pow(ExprPtr base, ExprPtr exponent) {
    if (is_const(exponent, 0.0)) return one();
    if (is_const(exponent, 1.0)) return base;
    if (is_any_const(base) && is_any_const(exponent))
        return fold2(BinaryOp::Pow, base, exponent, std::pow(base->value, exponent->value));
    return binary(BinaryOp::Pow, std::move(base), std::move(exponent));
}

ExprPtr f_unary(UnaryOp op, ExprPtr x) {
    if (op == UnaryOp::Neg)
        return f_neg(std::move(x));
    if (x->kind == Expr::Kind::Constant) {
        double c = x->value;
        double v = 0.0;
        bool ok = true;
        switch (op) {
        case UnaryOp::Sqrt: ok = c >= 0.0; v = std::sqrt(c); break;
        case UnaryOp::Sin: v = std::sin(c); break;
        case UnaryOp::Cos: v = std::cos(c); break;
        case UnaryOp::Exp: v = std::exp(c); break;
        case UnaryOp::Ln: ok = c > 0.0; v = std::log(c); break;
        case UnaryOp::Neg: break;
        }
        if (ok && std::isfinite(v))
            return constant(v);
    }
    return unary(op, std::move(x));
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    std::string_view src;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t'))
            ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos >= src.size();
    }

    char peek() {
        skip_ws();
        return pos < src.size() ? src[pos] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(pos, msg); }

    ExprPtr parse_expr() {
        ExprPtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = binary(BinaryOp::Add, lhs, parse_term());
            else if (accept('-'))
                lhs = binary(BinaryOp::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    ExprPtr parse_term() {
        ExprPtr lhs = parse_factor();
        for (;;) {
            if (accept('*'))
                lhs = binary(BinaryOp::Mul, lhs, parse_factor());
            else if (accept('/'))
                lhs = binary(BinaryOp::Div, lhs, parse_factor());
            else
                return lhs;
        }
    }

    ExprPtr parse_factor() {
        if (accept('-'))
            return unary(UnaryOp::Neg, parse_factor());
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        skip_ws();
        if (accept('^')) {
            std::size_t exp_pos = pos;
            ExprPtr exponent = parse_factor(); // right associative, sign allowed
            if (!is_constant(*exponent))
                throw ParseError(exp_pos, "non-constant exponent (only constant integer or "
                                          "rational exponents are supported)");
            return binary(BinaryOp::Pow, base, exponent);
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        if (pos >= src.size())
            fail("unexpected end of input; expected number, name, '(' or '-'");
        char c = src[pos];
        if (c == '(') {
            ++pos;
            ExprPtr inner = parse_expr();
            if (!accept(')'))
                fail("expected ')'");
            return inner;
        }
        if ((c >= '0' && c <= '9') || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_name();
        fail(std::string("unexpected character '") + c + "'; expected number, name, '(' or '-'");
    }

    ExprPtr parse_number() {
        std::size_t start = pos;
        bool mantissa_digit = false;
        while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') {
            ++pos;
            mantissa_digit = true;
        }
        if (pos < src.size() && src[pos] == '.') {
            ++pos;
            while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') {
                ++pos;
                mantissa_digit = true;
            }
        }
        if (!mantissa_digit)
            throw ParseError(start, "malformed number");
        if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
            std::size_t mark = pos;
            ++pos;
            if (pos < src.size() && (src[pos] == '+' || src[pos] == '-'))
                ++pos;
            bool exp_digit = false;
            while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') {
                ++pos;
                exp_digit = true;
            }
            if (!exp_digit)
                pos = mark; // "2e" is the number 2 followed by the name "e"
        }
        double v = 0.0;
        auto res = std::from_chars(src.data() + start, src.data() + pos, v);
        if (res.ec != std::errc())
            throw ParseError(start, "malformed number");
        return constant(v);
    }

    ExprPtr parse_name() {
        std::size_t start = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
            ++pos;
        std::string name(src.substr(start, pos - start));
        skip_ws();
        if (pos < src.size() && src[pos] == '(') {
            UnaryOp op;
            if (name == "sqrt") op = UnaryOp::Sqrt;
            else if (name == "sin") op = UnaryOp::Sin;
            else if (name == "cos") op = UnaryOp::Cos;
            else if (name == "exp") op = UnaryOp::Exp;
            else if (name == "ln") op = UnaryOp::Ln;
            else throw ParseError(start, "unknown function '" + name + "' (supported: sqrt, sin, cos, exp, ln)");
            ++pos;
            ExprPtr arg = parse_expr();
            if (!accept(')'))
                fail("expected ')' closing call to '" + name + "'");
            return unary(op, arg);
        }
        return variable(std::move(name));
    }
};

} // namespace

ExprPtr parse(std::string_view source) {
    Parser p{source};
    ExprPtr e = p.parse_expr();
    if (!p.at_end())
        p.fail("trailing input; expected operator or end of expression");
    return e;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void domain_fail(const std::string& what, const Expr& node) {
    throw DomainError(what + " in '" + format(node) + "'");
}

} // namespace

double eval(const Expr& e, const Bindings& b) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        return e.value;
    case Expr::Kind::Variable:
        switch (e.var_kind) {
        case VarKind::Time:
            return b.t;
        case VarKind::Coord:
            if (e.var_index < 1 || static_cast<std::size_t>(e.var_index) > b.q.size())
                throw Error("unbound coordinate '" + e.name + "'");
            return b.q[static_cast<std::size_t>(e.var_index - 1)];
        case VarKind::Momentum:
            if (e.var_index < 1 || static_cast<std::size_t>(e.var_index) > b.p.size())
                throw Error("unbound momentum '" + e.name + "'");
            return b.p[static_cast<std::size_t>(e.var_index - 1)];
        case VarKind::Param: {
            const double* v = b.params ? b.params->find(e.name) : nullptr;
            if (!v)
                throw Error("unbound parameter '" + e.name + "'");
            return *v;
        }
        }
        throw Error("corrupt variable node");
    case Expr::Kind::Unary: {
        double x = eval(*e.a, b);
        switch (e.uop) {
        case UnaryOp::Neg: return -x;
        case UnaryOp::Sqrt:
            if (x < 0.0) domain_fail("square root of negative value", e);
            return std::sqrt(x);
        case UnaryOp::Sin: return std::sin(x);
        case UnaryOp::Cos: return std::cos(x);
        case UnaryOp::Exp: return std::exp(x);
        case UnaryOp::Ln:
            if (x <= 0.0) domain_fail("logarithm of non-positive value", e);
            return std::log(x);
        }
        throw Error("corrupt unary node");
    }
    case Expr::Kind::Binary: {
        double x = eval(*e.a, b);
        double y = eval(*e.b, b);
        switch (e.bop) {
        case BinaryOp::Add: return x + y;
        case BinaryOp::Sub: return x - y;
        case BinaryOp::Mul: return x * y;
        case BinaryOp::Div:
            if (y == 0.0) domain_fail("division by zero", e);
            return x / y;
        case BinaryOp::Pow:
            if (x == 0.0 && y < 0.0) domain_fail("zero raised to a negative power", e);
            if (x < 0.0 && y != std::rint(y))
                domain_fail("negative base raised to a non-integer power", e);
            return std::pow(x, y);
        }
        throw Error("corrupt binary node");
    }
    }
    throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// differentiation
// ---------------------------------------------------------------------------

ExprPtr diff(const ExprPtr& e, const std::string& var) {
    switch (e->kind) {
    case Expr::Kind::Constant:
        return zero();
    case Expr::Kind::Variable:
        return e->name == var ? one() : zero();
    case Expr::Kind::Unary: {
        ExprPtr du = diff(e->a, var);
        switch (e->uop) {
        case UnaryOp::Neg:
            return f_neg(du);
        case UnaryOp::Sqrt:
            // u' / (2 sqrt u)
            return f_div(du, f_mul(constant(2.0), unary(UnaryOp::Sqrt, e->a)));
        case UnaryOp::Sin:
            return f_mul(du, unary(UnaryOp::Cos, e->a));
        case UnaryOp::Cos:
            return f_neg(f_mul(du, unary(UnaryOp::Sin, e->a)));
        case UnaryOp::Exp:
            return f_mul(du, unary(UnaryOp::Exp, e->a));
        case UnaryOp::Ln:
            return f_div(du, e->a);
        }
        throw Error("corrupt unary node");
    }
    case Expr::Kind::Binary: {
        switch (e->bop) {
        case BinaryOp::Add:
            return f_add(diff(e->a, var), diff(e->b, var));
        case BinaryOp::Sub:
            return f_sub(diff(e->a, var), diff(e->b, var));
        case BinaryOp::Mul:
            return f_add(f_mul(diff(e->a, var), e->b), f_mul(e->a, diff(e->b, var)));
        case BinaryOp::Div:
            // (u'v - uv') / v^2
            return f_div(f_sub(f_mul(diff(e->a, var), e->b), f_mul(e->a, diff(e->b, var))),
                         f_pow(e->b, constant(2.0)));
        case BinaryOp::Pow: {
            // c u^(c-1) u', exponent is constant by construction
            double c = const_value(*e->b);
            return f_mul(f_mul(constant(c), f_pow(e->a, constant(c - 1.0))), diff(e->a, var));
        }
        }
        throw Error("corrupt binary node");
    }
    }
    throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

enum Prec { PrecAdd = 1, PrecMul = 2, PrecNeg = 3, PrecPow = 4, PrecAtom = 5 };

int precedence_of(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        return e.value < 0.0 || bits_equal(e.value, -0.0) ? PrecNeg : PrecAtom;
    case Expr::Kind::Variable:
        return PrecAtom;
    case Expr::Kind::Unary:
        return e.uop == UnaryOp::Neg ? PrecNeg : PrecAtom; // calls self-delimit
    case Expr::Kind::Binary:
        switch (e.bop) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return PrecAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return PrecMul;
        case BinaryOp::Pow: return PrecPow;
        }
    }
    return PrecAtom;
}

void print_number(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v); // shortest round-trip form
    out.append(buf, res.ptr);
}

const char* unary_name(UnaryOp op) {
    switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Ln: return "ln";
    }
    return "?";
}

void print_expr(std::string& out, const Expr& e);

void print_child(std::string& out, const Expr& child, bool parens) {
    if (parens) {
        out.push_back('(');
        print_expr(out, child);
        out.push_back(')');
    } else {
        print_expr(out, child);
    }
}

void print_expr(std::string& out, const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        print_number(out, e.value);
        return;
    case Expr::Kind::Variable:
        out += e.name;
        return;
    case Expr::Kind::Unary:
        if (e.uop == UnaryOp::Neg) {
            out.push_back('-');
            print_child(out, *e.a, precedence_of(*e.a) < PrecNeg);
        } else {
            out += unary_name(e.uop);
            out.push_back('(');
            print_expr(out, *e.a);
            out.push_back(')');
        }
        return;
    case Expr::Kind::Binary: {
        int prec = precedence_of(e);
        char op_char = 0;
        switch (e.bop) {
        case BinaryOp::Add: op_char = '+'; break;
        case BinaryOp::Sub: op_char = '-'; break;
        case BinaryOp::Mul: op_char = '*'; break;
        case BinaryOp::Div: op_char = '/'; break;
        case BinaryOp::Pow: op_char = '^'; break;
        }
        if (e.bop == BinaryOp::Pow) {
            // right associative: parenthesize an operator-shaped base
            print_child(out, *e.a, precedence_of(*e.a) <= PrecPow);
            out.push_back(op_char);
            print_child(out, *e.b, precedence_of(*e.b) < PrecPow);
        } else {
            // left associative: a right child at the same level keeps its shape
            print_child(out, *e.a, precedence_of(*e.a) < prec);
            out.push_back(op_char);
            print_child(out, *e.b, precedence_of(*e.b) <= prec);
        }
        return;
    }
    }
}

} // namespace

std::string format(const Expr& e) {
    std::string out;
    print_expr(out, e);
    return out;
}

// ---------------------------------------------------------------------------
// queries
// ---------------------------------------------------------------------------

bool equal(const Expr& x, const Expr& y) {
    if (x.kind != y.kind)
        return false;
    switch (x.kind) {
    case Expr::Kind::Constant:
        return bits_equal(x.value, y.value);
    case Expr::Kind::Variable:
        return x.name == y.name;
    case Expr::Kind::Unary:
        return x.uop == y.uop && equal(*x.a, *y.a);
    case Expr::Kind::Binary:
        return x.bop == y.bop && equal(*x.a, *y.a) && equal(*x.b, *y.b);
    }
    return false;
}

bool is_constant(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Constant: return true;
    case Expr::Kind::Variable: return false;
    case Expr::Kind::Unary: return is_constant(*e.a);
    case Expr::Kind::Binary: return is_constant(*e.a) && is_constant(*e.b);
    }
    return false;
}

double const_value(const Expr& e) {
    Bindings empty;
    return eval(e, empty);
}

bool depends_on(const Expr& e, const std::string& var) {
    switch (e.kind) {
    case Expr::Kind::Constant: return false;
    case Expr::Kind::Variable: return e.name == var;
    case Expr::Kind::Unary: return depends_on(*e.a, var);
    case Expr::Kind::Binary: return depends_on(*e.a, var) || depends_on(*e.b, var);
    }
    return false;
}

namespace {

void collect_into(const Expr& e, std::vector<std::string>& out) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        return;
    case Expr::Kind::Variable:
        if (std::find(out.begin(), out.end(), e.name) == out.end())
            out.push_back(e.name);
        return;
    case Expr::Kind::Unary:
        collect_into(*e.a, out);
        return;
    case Expr::Kind::Binary:
        collect_into(*e.a, out);
        collect_into(*e.b, out);
        return;
    }
}

} // namespace

std::vector<std::string> collect_variables(const Expr& e) {
    std::vector<std::string> out;
    collect_into(e, out);
    return out;
}

void validate_names(const Expr& e, int n, const ParamTable& params, bool allow_momenta) {
    switch (e.kind) {
    case Expr::Kind::Constant:
        return;
    case Expr::Kind::Variable:
        switch (e.var_kind) {
        case VarKind::Time:
            return;
        case VarKind::Coord:
            if (e.var_index > n)
                throw ScenarioError("coordinate '" + e.name + "' exceeds dimension " +
                                    std::to_string(n));
            return;
        case VarKind::Momentum:
            if (!allow_momenta)
                throw ScenarioError("momentum '" + e.name + "' is not allowed here "
                                    "(expression must depend on (t,q) only)");
            if (e.var_index > n)
                throw ScenarioError("momentum '" + e.name + "' exceeds dimension " +
                                    std::to_string(n));
            return;
        case VarKind::Param:
            if (!params.contains(e.name))
                throw ScenarioError("undeclared parameter '" + e.name + "'");
            return;
        }
        return;
    case Expr::Kind::Unary:
        validate_names(*e.a, n, params, allow_momenta);
        return;
    case Expr::Kind::Binary:
        validate_names(*e.a, n, params, allow_momenta);
        validate_names(*e.b, n, params, allow_momenta);
        return;
    }
}

} // namespace nhsym
