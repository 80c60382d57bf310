#include "mixedpde/expression.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <numbers>
#include <variant>

#include "mixedpde/errors.hpp"

namespace mixedpde {

namespace {

enum class Op { Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Log };

}  // namespace

struct Expression::Node {
    struct Constant {
        double value;
    };
    struct Variable {};
    struct Apply {
        Op op;
        std::shared_ptr<const Node> lhs;
        std::shared_ptr<const Node> rhs;  // null for unary ops
    };
    std::variant<Constant, Variable, Apply> data;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_constant(double v) {
    return std::make_shared<const Expression::Node>(Expression::Node{Expression::Node::Constant{v}});
}

const double* constant_value(const NodePtr& n) {
    if (auto* c = std::get_if<Expression::Node::Constant>(&n->data)) return &c->value;
    return nullptr;
}

double apply_scalar(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div: return a / b;
        case Op::Pow: return std::pow(a, b);
        case Op::Neg: return -a;
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Exp: return std::exp(a);
        case Op::Sqrt: return std::sqrt(a);
        case Op::Log: return std::log(a);
    }
    return 0.0;
}

// Constant subtrees are folded at construction.
NodePtr make_apply(Op op, NodePtr lhs, NodePtr rhs = nullptr) {
    const double* a = constant_value(lhs);
    const double* b = rhs ? constant_value(rhs) : nullptr;
    if (a && (!rhs || b)) return make_constant(apply_scalar(op, *a, b ? *b : 0.0));
    if (op == Op::Mul && ((a && *a == 0.0) || (b && *b == 0.0))) return make_constant(0.0);
    if ((op == Op::Add && a && *a == 0.0)) return rhs;
    if ((op == Op::Add || op == Op::Sub) && b && *b == 0.0) return lhs;
    return std::make_shared<const Expression::Node>(
        Expression::Node{Expression::Node::Apply{op, std::move(lhs), std::move(rhs)}});
}

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    NodePtr parse() {
        auto n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression \"" + std::string(s_) + "\" at " + std::to_string(pos_) + ": " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_apply(Op::Add, lhs, term());
            else if (accept('-')) lhs = make_apply(Op::Sub, lhs, term());
            else return lhs;
        }
    }
    NodePtr term() {
        auto lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_apply(Op::Mul, lhs, unary());
            else if (accept('/')) lhs = make_apply(Op::Div, lhs, unary());
            else return lhs;
        }
    }
    NodePtr unary() {
        if (accept('-')) return make_apply(Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }
    NodePtr power() {
        auto base = primary();
        if (accept('^')) return make_apply(Op::Pow, base, unary());
        return base;
    }
    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (accept('(')) {
            auto n = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view name = s_.substr(start, pos_ - start);
            if (name == "x") {
                return std::make_shared<const Expression::Node>(Expression::Node{Expression::Node::Variable{}});
            }
            if (name == "pi") return make_constant(std::numbers::pi);
            Op op;
            if (name == "sin") op = Op::Sin;
            else if (name == "cos") op = Op::Cos;
            else if (name == "exp") op = Op::Exp;
            else if (name == "sqrt") op = Op::Sqrt;
            else if (name == "log") op = Op::Log;
            else fail("unknown identifier '" + std::string(name) + "'");
            if (!accept('(')) fail("expected '(' after " + std::string(name));
            auto arg = expr();
            if (!accept(')')) fail("expected ')'");
            return make_apply(op, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
    NodePtr number() {
        const std::string rest(s_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        const auto used = static_cast<std::size_t>(end - rest.c_str());
        if (used == 0) fail("bad number");
        pos_ += used;
        return make_constant(v);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

// --- Taylor arithmetic -----------------------------------------------------

Taylor t_mul(const Taylor& a, const Taylor& b) {
    Taylor c(a.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k)
        for (std::size_t j = 0; j <= k; ++j) c[k] += a[j] * b[k - j];
    return c;
}

Taylor t_div(const Taylor& a, const Taylor& b) {
    Taylor c(a.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        double s = a[k];
        for (std::size_t j = 1; j <= k; ++j) s -= b[j] * c[k - j];
        c[k] = s / b[0];
    }
    return c;
}

Taylor t_exp(const Taylor& a) {
    Taylor e(a.size(), 0.0);
    e[0] = std::exp(a[0]);
    for (std::size_t k = 1; k < e.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * e[k - j];
        e[k] = s / static_cast<double>(k);
    }
    return e;
}

Taylor t_log(const Taylor& a) {
    Taylor l(a.size(), 0.0);
    l[0] = std::log(a[0]);
    for (std::size_t k = 1; k < l.size(); ++k) {
        double s = static_cast<double>(k) * a[k];
        for (std::size_t j = 1; j < k; ++j) s -= static_cast<double>(j) * l[j] * a[k - j];
        l[k] = s / (static_cast<double>(k) * a[0]);
    }
    return l;
}

void t_sincos(const Taylor& a, Taylor& s, Taylor& c) {
    s.assign(a.size(), 0.0);
    c.assign(a.size(), 0.0);
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (std::size_t k = 1; k < a.size(); ++k) {
        double ss = 0.0, cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
            const double ja = static_cast<double>(j) * a[j];
            ss += ja * c[k - j];
            cc -= ja * s[k - j];
        }
        s[k] = ss / static_cast<double>(k);
        c[k] = cc / static_cast<double>(k);
    }
}

// a^p for constant real p, a[0] > 0 (or integer p handled separately).
Taylor t_pow_real(const Taylor& a, double p) {
    Taylor b(a.size(), 0.0);
    b[0] = std::pow(a[0], p);
    for (std::size_t k = 1; k < b.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j)
            s += ((p + 1.0) * static_cast<double>(j) - static_cast<double>(k)) * a[j] * b[k - j];
        b[k] = s / (static_cast<double>(k) * a[0]);
    }
    return b;
}

Taylor t_pow_int(Taylor base, long long e) {
    const bool invert = e < 0;
    unsigned long long u = static_cast<unsigned long long>(invert ? -e : e);
    Taylor r(base.size(), 0.0);
    r[0] = 1.0;
    while (u) {
        if (u & 1ULL) r = t_mul(r, base);
        u >>= 1;
        if (u) base = t_mul(base, base);
    }
    if (invert) {
        Taylor one(r.size(), 0.0);
        one[0] = 1.0;
        return t_div(one, r);
    }
    return r;
}

Taylor eval_taylor(const NodePtr& n, double x0, std::size_t len) {
    using N = Expression::Node;
    if (auto* c = std::get_if<N::Constant>(&n->data)) {
        Taylor t(len, 0.0);
        t[0] = c->value;
        return t;
    }
    if (std::holds_alternative<N::Variable>(n->data)) {
        Taylor t(len, 0.0);
        t[0] = x0;
        if (len > 1) t[1] = 1.0;
        return t;
    }
    const auto& ap = std::get<N::Apply>(n->data);
    if (ap.op == Op::Pow) {
        Taylor base = eval_taylor(ap.lhs, x0, len);
        if (const double* p = constant_value(ap.rhs)) {
            const double r = std::round(*p);
            if (r == *p && std::abs(r) < 1e6) return t_pow_int(std::move(base), static_cast<long long>(r));
            return t_pow_real(base, *p);
        }
        return t_exp(t_mul(eval_taylor(ap.rhs, x0, len), t_log(base)));
    }
    Taylor a = eval_taylor(ap.lhs, x0, len);
    switch (ap.op) {
        case Op::Neg:
            for (auto& v : a) v = -v;
            return a;
        case Op::Sin: {
            Taylor s, c;
            t_sincos(a, s, c);
            return s;
        }
        case Op::Cos: {
            Taylor s, c;
            t_sincos(a, s, c);
            return c;
        }
        case Op::Exp: return t_exp(a);
        case Op::Log: return t_log(a);
        case Op::Sqrt: return t_pow_real(a, 0.5);
        default: break;
    }
    Taylor b = eval_taylor(ap.rhs, x0, len);
    switch (ap.op) {
        case Op::Add:
            for (std::size_t i = 0; i < len; ++i) a[i] += b[i];
            return a;
        case Op::Sub:
            for (std::size_t i = 0; i < len; ++i) a[i] -= b[i];
            return a;
        case Op::Mul: return t_mul(a, b);
        case Op::Div: return t_div(a, b);
        default: break;
    }
    return a;
}

double eval_scalar(const NodePtr& n, double x) {
    using N = Expression::Node;
    if (auto* c = std::get_if<N::Constant>(&n->data)) return c->value;
    if (std::holds_alternative<N::Variable>(n->data)) return x;
    const auto& ap = std::get<N::Apply>(n->data);
    const double a = eval_scalar(ap.lhs, x);
    const double b = ap.rhs ? eval_scalar(ap.rhs, x) : 0.0;
    return apply_scalar(ap.op, a, b);
}

}  // namespace

Expression::Expression() : Expression(make_constant(0.0), "0") {}

Expression::Expression(std::shared_ptr<const Node> root, std::string text)
    : root_(std::move(root)), text_(std::move(text)) {}

Expression Expression::parse(std::string_view text) {
    return Expression(Parser(text).parse(), std::string(text));
}

Expression Expression::constant(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return Expression(make_constant(value), buf);
}

double Expression::operator()(double x) const { return eval_scalar(root_, x); }

Taylor Expression::taylor(double x0, int order) const {
    return eval_taylor(root_, x0, static_cast<std::size_t>(order < 0 ? 0 : order) + 1);
}

double Expression::derivative(double x0, int d) const {
    if (d == 0) return (*this)(x0);
    const Taylor t = taylor(x0, d);
    double fact = 1.0;
    for (int i = 2; i <= d; ++i) fact *= i;
    return t[static_cast<std::size_t>(d)] * fact;
}

bool Expression::is_constant() const { return constant_value(root_) != nullptr; }

bool Expression::is_identically_zero() const {
    const double* c = constant_value(root_);
    return c && *c == 0.0;
}

}  // namespace mixedpde
