#pragma once

/// Double numbers t = u + jv with j^2 = 1.
///
/// Values are stored as (re, im). The null basis q = (1-j)/2, qbar = (1+j)/2
/// diagonalises multiplication: t = a q + b qbar with a = u - v, b = u + v,
/// and every algebraic operation acts on (a, b) component-wise.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace dmin {

/// Null-cone tolerance shared by every classification in the library.
inline constexpr double tau0 = 1e-9;

struct DNum {
    double re = 0.0;
    double im = 0.0;

    constexpr DNum() = default;
    constexpr DNum(double r, double i = 0.0) : re(r), im(i) {}

    constexpr DNum& operator+=(DNum o) { re += o.re; im += o.im; return *this; }
    constexpr DNum& operator-=(DNum o) { re -= o.re; im -= o.im; return *this; }
    constexpr DNum& operator*=(DNum o) {
        const double r = re * o.re + im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    constexpr DNum& operator*=(double s) { re *= s; im *= s; return *this; }

    friend constexpr bool operator==(DNum x, DNum y) { return x.re == y.re && x.im == y.im; }
};

inline constexpr DNum j_unit{0.0, 1.0};
inline constexpr DNum q_unit{0.5, -0.5};
inline constexpr DNum qbar_unit{0.5, 0.5};

constexpr DNum operator+(DNum x, DNum y) { return x += y; }
constexpr DNum operator-(DNum x, DNum y) { return x -= y; }
constexpr DNum operator-(DNum x) { return {-x.re, -x.im}; }
constexpr DNum operator*(DNum x, DNum y) { return x *= y; }
constexpr DNum operator*(DNum x, double s) { return x *= s; }
constexpr DNum operator*(double s, DNum x) { return x *= s; }
constexpr DNum operator/(DNum x, double s) { return {x.re / s, x.im / s}; }

constexpr DNum mul(DNum x, DNum y) { return x * y; }
constexpr DNum conj(DNum x) { return {x.re, -x.im}; }
constexpr double modulus_sq(DNum x) { return x.re * x.re - x.im * x.im; }

struct NullPair {
    double a;
    double b;
};

constexpr NullPair null_decompose(DNum t) { return {t.re - t.im, t.re + t.im}; }
constexpr DNum null_compose(double a, double b) { return {0.5 * (a + b), 0.5 * (b - a)}; }
constexpr DNum null_compose(NullPair p) { return null_compose(p.a, p.b); }

/// min(|a|,|b|) <= tol * max(1,|a|,|b|).
inline bool on_null_cone(DNum t, double tol = tau0) {
    const auto [a, b] = null_decompose(t);
    const double lo = std::fmin(std::fabs(a), std::fabs(b));
    const double hi = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
    return lo <= tol * hi;
}

inline bool in_dplus(DNum t) {
    const auto [a, b] = null_decompose(t);
    return a > 0.0 && b > 0.0;
}

/// Largest null-component magnitude; the natural sup-norm on D.
inline double abs_max(DNum t) { return std::fmax(std::fabs(t.re), std::fabs(t.im)); }

inline DNum exp(DNum t) {
    const auto [a, b] = null_decompose(t);
    return null_compose(std::exp(a), std::exp(b));
}

/// e^{j theta} = cosh theta + j sinh theta.
inline DNum exp_j(double theta) { return {std::cosh(theta), std::sinh(theta)}; }

inline DNum invert(DNum t) {
    if (on_null_cone(t)) throw NullDivisorError("invert: value lies on the null cone");
    const auto [a, b] = null_decompose(t);
    return null_compose(1.0 / a, 1.0 / b);
}

inline DNum operator/(DNum x, DNum y) { return x * invert(y); }

inline DNum pow(DNum t, int n) {
    DNum r{1.0};
    DNum base = n < 0 ? invert(t) : t;
    for (unsigned k = static_cast<unsigned>(n < 0 ? -n : n); k; k >>= 1) {
        if (k & 1u) r *= base;
        base *= base;
    }
    return r;
}

struct PolarForm {
    DNum delta;  // one of +1, -1, +j, -j
    double rho;
    double theta;
};

inline DNum from_polar(const PolarForm& p) { return p.delta * (p.rho * exp_j(p.theta)); }

/// t = delta * rho * e^{j theta} with rho e^{j theta} in D+.
inline PolarForm polar_decompose(DNum t) {
    if (on_null_cone(t)) throw NullDivisorError("polar_decompose: value lies on the null cone");
    const auto [a, b] = null_decompose(t);
    const double sa = a > 0 ? 1.0 : -1.0;
    const double sb = b > 0 ? 1.0 : -1.0;
    const double fa = std::fabs(a), fb = std::fabs(b);
    return {null_compose(sa, sb), std::sqrt(fa) * std::sqrt(fb), 0.5 * std::log(fb / fa)};
}

inline DNum sqrt_dplus(DNum t) {
    if (!in_dplus(t)) throw DomainError("sqrt_dplus: argument not in D+");
    const auto [a, b] = null_decompose(t);
    return null_compose(std::sqrt(a), std::sqrt(b));
}

inline DNum fourth_root_dplus(DNum t) {
    if (!in_dplus(t)) throw DomainError("fourth_root_dplus: argument not in D+");
    const auto [a, b] = null_decompose(t);
    return null_compose(std::sqrt(std::sqrt(a)), std::sqrt(std::sqrt(b)));
}

/// Shortest text that reads back to the same double.
inline std::string format_real(double x) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

/// "u+jv" or "u-jv".
inline std::string to_string(DNum t) {
    std::string s = format_real(t.re);
    s += std::signbit(t.im) ? "-j" : "+j";
    s += format_real(std::fabs(t.im));
    return s;
}

inline std::ostream& operator<<(std::ostream& os, DNum t) { return os << to_string(t); }

/// Accepts "u", "jv", "j", "u+jv", "u-jv", "u+j", with optional leading sign.
inline DNum parse_dnum(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != ' ' && c != '\t') s += c;
    if (s.empty()) throw ParseError("empty double number", 1, 1);

    const char* p = s.c_str();
    const char* end = p + s.size();
    auto fail = [&](const char* at) {
        throw ParseError("malformed double number '" + s + "'", 1, static_cast<int>(at - s.c_str()) + 1);
    };
    auto read_imag = [&](const char* at, double sign) -> double {
        // at points just past 'j'
        if (at == end) return sign;
        if (*at == '+' || *at == '-') fail(at);
        char* stop = nullptr;
        const double v = std::strtod(at, &stop);
        if (stop == at || stop != end) fail(at);
        return sign * v;
    };

    double sign = 1.0;
    const char* cur = p;
    if (*cur == '+' || *cur == '-') {
        if (*cur == '-') sign = -1.0;
        ++cur;
    }
    if (cur < end && *cur == 'j') return {0.0, read_imag(cur + 1, sign)};

    char* stop = nullptr;
    const double re = std::strtod(p, &stop);
    if (stop == p) fail(p);
    if (stop == end) return {re, 0.0};
    if ((*stop == '+' || *stop == '-') && stop + 1 < end && stop[1] == 'j')
        return {re, read_imag(stop + 2, *stop == '-' ? -1.0 : 1.0)};
    fail(stop);
    return {};
}

}  // namespace dmin
