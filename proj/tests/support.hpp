#pragma once

#include <cmath>
#include <random>

#include <dmin/splitnum.hpp>

namespace dmin::test {

/// |a - b| <= tol * max(1, |a|, |b|)
inline bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
}
inline bool close(DNum a, DNum b, double tol) { return close(a.re, b.re, tol) && close(a.im, b.im, tol); }

inline double rel_err(double a, double b) {
    return std::fabs(a - b) / std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
}
inline double rel_err(DNum a, DNum b) { return std::fmax(rel_err(a.re, b.re), rel_err(a.im, b.im)); }

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long long seed) : gen(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
    DNum dnum(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi)}; }
    /// Both null components positive, magnitudes in [lo, hi].
    DNum dplus(double lo, double hi) { return null_compose(uniform(lo, hi), uniform(lo, hi)); }
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen); }
};

}  // namespace dmin::test


#include <vector>

#include <dmin/geom4.hpp>

namespace dmin::test {

/// Random product of elementary motions; `anti` appends the coordinate swap.
inline Motion random_motion(Rng& rng, bool proper_only = false, bool anti = false) {
    std::vector<MotionStep> steps;
    const int n = 2 + rng.pick(4);
    const int mixed[4][2] = {{0, 1}, {0, 3}, {2, 1}, {2, 3}};
    for (int s = 0; s < n; ++s) {
        switch (rng.pick(proper_only ? 3 : 4)) {
            case 0: steps.push_back(MotionStep::rotate(1, 3, rng.uniform(-3, 3))); break;
            case 1: steps.push_back(MotionStep::rotate(0, 2, rng.uniform(-3, 3))); break;
            case 2: {
                const auto& p = mixed[rng.pick(4)];
                steps.push_back(MotionStep::boost(p[0], p[1], rng.uniform(-1, 1)));
                break;
            }
            default: steps.push_back(MotionStep::flip(rng.pick(4))); break;
        }
    }
    if (anti) steps.push_back(MotionStep::swap());
    return make_motion(steps, {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
}

inline Vec4D random_vec(Rng& rng, double lo = -2, double hi = 2) {
    return {rng.dnum(lo, hi), rng.dnum(lo, hi), rng.dnum(lo, hi), rng.dnum(lo, hi)};
}

}  // namespace dmin::test
