#pragma once

/// Holomorphic expression trees over D in one variable t.
///
/// Nodes are immutable and shared. Builders fold constants and drop neutral
/// elements so that repeated differentiation stays small.

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "splitnum.hpp"

namespace dmin {

class HoloExpr {
public:
    enum class Op { constant, var, add, sub, neg, mul, pow, scale, exp };

    HoloExpr() : HoloExpr(DNum{0.0}) {}
    HoloExpr(DNum c) : n_(std::make_shared<Node>(Node{Op::constant, c, 0, {}, {}})) {}
    HoloExpr(double c) : HoloExpr(DNum{c}) {}

    static HoloExpr var() { return HoloExpr(std::make_shared<Node>(Node{Op::var, {}, 0, {}, {}})); }

    Op op() const { return n_->op; }
    DNum value() const { return n_->c; }  // constant payload or scale factor
    int exponent() const { return n_->n; }
    const HoloExpr& lhs() const { return *n_->a; }
    const HoloExpr& rhs() const { return *n_->b; }

    bool is_constant() const { return op() == Op::constant; }
    bool is_constant(DNum c) const { return is_constant() && value() == c; }

    // ---- builders --------------------------------------------------------

    friend HoloExpr operator+(const HoloExpr& x, const HoloExpr& y) {
        if (x.is_constant() && y.is_constant()) return x.value() + y.value();
        if (x.is_constant(0.0)) return y;
        if (y.is_constant(0.0)) return x;
        return make(Op::add, {}, 0, x, y);
    }
    friend HoloExpr operator-(const HoloExpr& x, const HoloExpr& y) {
        if (x.is_constant() && y.is_constant()) return x.value() - y.value();
        if (y.is_constant(0.0)) return x;
        if (x.is_constant(0.0)) return -y;
        return make(Op::sub, {}, 0, x, y);
    }
    friend HoloExpr operator-(const HoloExpr& x) {
        if (x.is_constant()) return -x.value();
        if (x.op() == Op::neg) return x.lhs();
        return make(Op::neg, {}, 0, x, {});
    }
    friend HoloExpr operator*(const HoloExpr& x, const HoloExpr& y) {
        if (x.is_constant()) return scale(x.value(), y);
        if (y.is_constant()) return scale(y.value(), x);
        return make(Op::mul, {}, 0, x, y);
    }
    friend HoloExpr scale(DNum c, const HoloExpr& x) {
        if (x.is_constant()) return c * x.value();
        if (c == DNum{0.0}) return DNum{0.0};
        if (c == DNum{1.0}) return x;
        if (c == DNum{-1.0}) return -x;
        if (x.op() == Op::scale) return scale(c * x.value(), x.lhs());
        return make(Op::scale, c, 0, x, {});
    }
    friend HoloExpr pow(const HoloExpr& x, int n) {
        if (n < 0) throw UnsupportedExpressionError("negative powers are not part of the grammar");
        if (n == 0) return DNum{1.0};
        if (n == 1) return x;
        if (x.is_constant()) return dmin::pow(x.value(), n);
        return make(Op::pow, {}, n, x, {});
    }
    friend HoloExpr exp(const HoloExpr& x) {
        if (x.is_constant()) return dmin::exp(x.value());
        return make(Op::exp, {}, 0, x, {});
    }

    // ---- evaluation ------------------------------------------------------

    DNum operator()(DNum t) const { return eval_node(*n_, t); }

    /// Exact symbolic d/dt. The t-bar derivative is identically zero.
    HoloExpr derivative() const {
        switch (op()) {
            case Op::constant: return DNum{0.0};
            case Op::var: return DNum{1.0};
            case Op::add: return lhs().derivative() + rhs().derivative();
            case Op::sub: return lhs().derivative() - rhs().derivative();
            case Op::neg: return -lhs().derivative();
            case Op::mul: return lhs().derivative() * rhs() + lhs() * rhs().derivative();
            case Op::pow:
                return scale(DNum(exponent()), pow(lhs(), exponent() - 1)) * lhs().derivative();
            case Op::scale: return scale(value(), lhs().derivative());
            case Op::exp: return *this * lhs().derivative();
        }
        return DNum{0.0};
    }

    /// Replace t by k*t + c.
    HoloExpr substitute(DNum k, DNum c = {}) const {
        switch (op()) {
            case Op::constant: return *this;
            case Op::var: return scale(k, var()) + c;
            case Op::add: return lhs().substitute(k, c) + rhs().substitute(k, c);
            case Op::sub: return lhs().substitute(k, c) - rhs().substitute(k, c);
            case Op::neg: return -lhs().substitute(k, c);
            case Op::mul: return lhs().substitute(k, c) * rhs().substitute(k, c);
            case Op::pow: return pow(lhs().substitute(k, c), exponent());
            case Op::scale: return scale(value(), lhs().substitute(k, c));
            case Op::exp: return exp(lhs().substitute(k, c));
        }
        return *this;
    }

    /// The tree of s -> conj(f(conj s)): every constant is conjugated.
    HoloExpr conj_coefficients() const {
        switch (op()) {
            case Op::constant: return conj(value());
            case Op::var: return *this;
            case Op::add: return lhs().conj_coefficients() + rhs().conj_coefficients();
            case Op::sub: return lhs().conj_coefficients() - rhs().conj_coefficients();
            case Op::neg: return -lhs().conj_coefficients();
            case Op::mul: return lhs().conj_coefficients() * rhs().conj_coefficients();
            case Op::pow: return pow(lhs().conj_coefficients(), exponent());
            case Op::scale: return scale(conj(value()), lhs().conj_coefficients());
            case Op::exp: return exp(lhs().conj_coefficients());
        }
        return *this;
    }

    std::string str() const { return render(*this, 0); }

private:
    struct Node {
        Op op;
        DNum c;
        int n;
        std::shared_ptr<const HoloExpr> a;
        std::shared_ptr<const HoloExpr> b;
    };

    explicit HoloExpr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    static HoloExpr make(Op op, DNum c, int n, const HoloExpr& a, const HoloExpr& b) {
        const bool binary = op == Op::add || op == Op::sub || op == Op::mul;
        return HoloExpr(std::make_shared<Node>(
            Node{op, c, n, std::make_shared<const HoloExpr>(a), binary ? std::make_shared<const HoloExpr>(b) : nullptr}));
    }

    static DNum eval_node(const Node& n, DNum t) {
        switch (n.op) {
            case Op::constant: return n.c;
            case Op::var: return t;
            case Op::add: return (*n.a)(t) + (*n.b)(t);
            case Op::sub: return (*n.a)(t) - (*n.b)(t);
            case Op::neg: return -(*n.a)(t);
            case Op::mul: return (*n.a)(t) * (*n.b)(t);
            case Op::pow: return dmin::pow((*n.a)(t), n.n);
            case Op::scale: return n.c * (*n.a)(t);
            case Op::exp: return dmin::exp((*n.a)(t));
        }
        return {};
    }

    static std::string render_const(DNum c) {
        if (c.im == 0.0) return format_real(c.re);
        if (c.re == 0.0) return c.im == 1.0 ? "j" : format_real(c.im) + "*j";
        return "(" + format_real(c.re) + (std::signbit(c.im) ? "-" : "+") +
               (std::fabs(c.im) == 1.0 ? std::string("j") : format_real(std::fabs(c.im)) + "*j") + ")";
    }

    // prec: 0 sum, 1 product, 2 power base
    static std::string render(const HoloExpr& e, int prec) {
        auto wrap = [&](std::string s, int mine) { return mine < prec ? "(" + s + ")" : s; };
        switch (e.op()) {
            case Op::constant: {
                std::string s = render_const(e.value());
                return (prec >= 2 && s[0] == '-') ? "(" + s + ")" : s;
            }
            case Op::var: return "t";
            case Op::add: return wrap(render(e.lhs(), 0) + " + " + render(e.rhs(), 0), 0);
            case Op::sub: return wrap(render(e.lhs(), 0) + " - " + render(e.rhs(), 1), 0);
            case Op::neg: return wrap("-" + render(e.lhs(), 1), 0);
            case Op::mul: return wrap(render(e.lhs(), 1) + "*" + render(e.rhs(), 2), 1);
            case Op::pow: {
                std::string s = render(e.lhs(), 3) + "^" + std::to_string(e.exponent());
                return prec >= 3 ? "(" + s + ")" : s;
            }
            case Op::scale: return wrap(render_const(e.value()) + "*" + render(e.lhs(), 2), 1);
            case Op::exp: return "exp(" + render(e.lhs(), 0) + ")";
        }
        return {};
    }

    std::shared_ptr<const Node> n_;
};

// ---- parser ----------------------------------------------------------------
//
// expr    := term (('+' | '-') term)*
// term    := unary ('*' unary)*
// unary   := ('+' | '-') unary | power
// power   := primary ('^' integer)?
// primary := number | 'j' | 't' | 'exp' '(' expr ')' | '(' expr ')'

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : s_(src) {}

    HoloExpr parse() {
        HoloExpr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
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
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression: " + msg, 1, static_cast<int>(pos_) + 1);
    }

    HoloExpr expr() {
        HoloExpr e = term();
        for (;;) {
            if (accept('+')) e = e + term();
            else if (accept('-')) e = e - term();
            else return e;
        }
    }
    HoloExpr term() {
        HoloExpr e = unary();
        while (accept('*')) e = e * unary();
        return e;
    }
    HoloExpr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }
    HoloExpr power() {
        HoloExpr base = primary();
        if (!accept('^')) return base;
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be a non-negative integer literal");
        return pow(base, std::stoi(std::string(s_.substr(start, pos_ - start))));
    }
    HoloExpr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(s_.substr(pos_));
            char* stop = nullptr;
            const double v = std::strtod(rest.c_str(), &stop);
            if (stop == rest.c_str()) fail("malformed number");
            pos_ += static_cast<std::size_t>(stop - rest.c_str());
            return DNum(v);
        }
        if (c == '(') {
            ++pos_;
            HoloExpr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string_view id = s_.substr(start, pos_ - start);
            if (id == "t") return HoloExpr::var();
            if (id == "j") return j_unit;
            if (id == "exp") {
                if (!accept('(')) fail("expected '(' after exp");
                HoloExpr e = expr();
                if (!accept(')')) fail("expected ')'");
                return exp(e);
            }
            pos_ = start;
            fail("unknown identifier '" + std::string(id) + "'");
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

inline HoloExpr parse_expr(std::string_view src) { return ExprParser(src).parse(); }

// ---- exponential-polynomial normal form ------------------------------------

/// Sum of c * t^n * exp(lambda t).
struct ExpPoly {
    struct Key {
        int n;
        DNum lambda;
        bool operator<(const Key& o) const {
            if (n != o.n) return n < o.n;
            if (lambda.re != o.lambda.re) return lambda.re < o.lambda.re;
            return lambda.im < o.lambda.im;
        }
    };
    std::map<Key, DNum> terms;

    void add(int n, DNum lambda, DNum c) {
        DNum& slot = terms[{n, lambda}];
        slot += c;
    }
};

inline ExpPoly to_exppoly(const HoloExpr& e) {
    using Op = HoloExpr::Op;
    ExpPoly r;
    auto mul = [](const ExpPoly& x, const ExpPoly& y) {
        ExpPoly p;
        for (const auto& [kx, cx] : x.terms)
            for (const auto& [ky, cy] : y.terms) p.add(kx.n + ky.n, kx.lambda + ky.lambda, cx * cy);
        return p;
    };
    switch (e.op()) {
        case Op::constant: r.add(0, {}, e.value()); return r;
        case Op::var: r.add(1, {}, DNum{1.0}); return r;
        case Op::add:
        case Op::sub: {
            r = to_exppoly(e.lhs());
            const double sgn = e.op() == Op::add ? 1.0 : -1.0;
            for (const auto& [k, c] : to_exppoly(e.rhs()).terms) r.add(k.n, k.lambda, sgn * c);
            return r;
        }
        case Op::neg:
            for (const auto& [k, c] : to_exppoly(e.lhs()).terms) r.add(k.n, k.lambda, -c);
            return r;
        case Op::scale:
            for (const auto& [k, c] : to_exppoly(e.lhs()).terms) r.add(k.n, k.lambda, e.value() * c);
            return r;
        case Op::mul: return mul(to_exppoly(e.lhs()), to_exppoly(e.rhs()));
        case Op::pow: {
            const ExpPoly base = to_exppoly(e.lhs());
            r.add(0, {}, DNum{1.0});
            for (int i = 0; i < e.exponent(); ++i) r = mul(r, base);
            return r;
        }
        case Op::exp: {
            // Only exp(alpha t + beta) is integrable in closed form here.
            DNum alpha{}, beta{};
            for (const auto& [k, c] : to_exppoly(e.lhs()).terms) {
                if (!(k.lambda == DNum{}) || k.n > 1)
                    throw UnsupportedExpressionError("exp of a non-linear argument: " + e.lhs().str());
                (k.n == 0 ? beta : alpha) += c;
            }
            r.add(0, alpha, dmin::exp(beta));
            return r;
        }
    }
    return r;
}

inline HoloExpr from_exppoly(const ExpPoly& p) {
    HoloExpr sum = DNum{0.0};
    const HoloExpr t = HoloExpr::var();
    for (const auto& [k, c] : p.terms) {
        if (c == DNum{0.0}) continue;
        HoloExpr term = pow(t, k.n);
        if (!(k.lambda == DNum{})) term = term * exp(scale(k.lambda, t));
        sum = sum + scale(c, term);
    }
    return sum;
}

/// Primitive with zero integration constant at the symbolic level (no constant term added).
inline HoloExpr antiderivative(const HoloExpr& e) {
    ExpPoly out;
    for (const auto& [k, c] : to_exppoly(e).terms) {
        if (k.lambda == DNum{}) {
            out.add(k.n + 1, {}, c / double(k.n + 1));
            continue;
        }
        if (on_null_cone(k.lambda))
            throw UnsupportedExpressionError("exp rate on the null cone has no closed-form primitive");
        // int t^n e^{lt} = e^{lt} sum_k (-1)^k n!/(n-k)! t^{n-k} / l^{k+1}
        const DNum inv = invert(k.lambda);
        DNum coef = c * inv;
        for (int m = k.n; m >= 0; --m) {
            out.add(m, k.lambda, coef);
            coef = coef * (-double(m)) * inv;
        }
    }
    return from_exppoly(out);
}

}  // namespace dmin
