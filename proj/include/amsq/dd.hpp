#pragma once

// Double-double arithmetic (~32 significant digits). Used by the spectral
// solver when the alternating eigenvalue sum cancels more digits than plain
// doubles can absorb. Only the operations the solver needs are provided.

#include <cmath>
#include <cstdint>
#include <limits>

namespace amsq::dd {

struct Real {
    double hi = 0.0;
    double lo = 0.0;

    constexpr Real() = default;
    constexpr Real(double h) : hi(h), lo(0.0) {}
    constexpr Real(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace detail {

inline Real two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline Real quick_two_sum(double a, double b) {
    double s = a + b;
    double err = b - (s - a);
    return {s, err};
}

inline Real two_prod(double a, double b) {
    double p = a * b;
    double err = std::fma(a, b, -p);
    return {p, err};
}

} // namespace detail

inline Real operator+(Real a, Real b) {
    Real s = detail::two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return detail::quick_two_sum(s.hi, lo);
}

inline Real operator-(Real a) { return {-a.hi, -a.lo}; }
inline Real operator-(Real a, Real b) { return a + (-b); }

inline Real operator*(Real a, Real b) {
    Real p = detail::two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(p.hi, lo);
}

inline Real operator/(Real a, Real b) {
    double q1 = a.hi / b.hi;
    Real r = a - b * Real(q1);
    double q2 = r.hi / b.hi;
    r = r - b * Real(q2);
    double q3 = r.hi / b.hi;
    Real q = detail::quick_two_sum(q1, q2);
    return q + Real(q3);
}

inline Real& operator+=(Real& a, Real b) { a = a + b; return a; }
inline Real& operator-=(Real& a, Real b) { a = a - b; return a; }
inline Real& operator*=(Real& a, Real b) { a = a * b; return a; }
inline Real& operator/=(Real& a, Real b) { a = a / b; return a; }

inline bool operator<(Real a, Real b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(Real a, Real b) { return b < a; }
inline bool operator<=(Real a, Real b) { return !(b < a); }
inline bool operator>=(Real a, Real b) { return !(a < b); }
inline bool operator==(Real a, Real b) { return a.hi == b.hi && a.lo == b.lo; }

inline Real fabs(Real a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

inline Real sqrt(Real a) {
    if (a.hi == 0.0) return {0.0, 0.0};
    double y = std::sqrt(a.hi);
    Real yy(y);
    // one Newton step in dd: y + (a - y^2) / (2y)
    Real corr = (a - yy * yy) / (yy + yy);
    return yy + corr;
}

inline constexpr Real k_ln2{0.6931471805599453, 2.3190468138462996e-17};
inline constexpr Real k_half_ln_2pi{0.9189385332046728, -3.8782941580672414e-17};

inline Real exp(Real a) {
    // exp(a) = 2^k * exp(r), r = a - k ln2, |r| <= ln2/2
    if (a.hi > 709.0) return {std::numeric_limits<double>::infinity(), 0.0};
    if (a.hi < -745.0) return {0.0, 0.0};
    double k = std::round(a.hi / k_ln2.hi);
    Real r = a - k_ln2 * Real(k);
    // Taylor series; |r| <= 0.347 needs ~30 terms for 1e-33
    Real sum(1.0), term(1.0);
    for (int n = 1; n <= 32; ++n) {
        term = term * r / Real(double(n));
        sum += term;
        if (std::fabs(term.hi) < 1e-35 * std::fabs(sum.hi)) break;
    }
    return sum * Real(std::ldexp(1.0, int(k)));
}

inline Real log(Real a) {
    // Newton iteration on exp(y) = a from a double seed
    double y0 = std::log(a.hi);
    Real y(y0);
    y = y + a * exp(-y) - Real(1.0);
    y = y + a * exp(-y) - Real(1.0);
    return y;
}

inline Real lgamma(Real x) {
    // Stirling series for x >= 32, shifted up otherwise. x > 0 required.
    Real shift(0.0);
    while (x.hi < 32.0) {
        shift += log(x);
        x += Real(1.0);
    }
    static const Real bern[] = {
        // B_{2n} / (2n (2n-1)), n = 1..14, split to double-double
        {0.08333333333333333, 4.625929269271485e-18},
        {-0.002777777777777778, 1.0601087908747154e-19},
        {0.0007936507936507937, 6.883823317368282e-22},
        {-0.0005952380952380953, 5.36938218754726e-20},
        {0.0008417508417508417, 3.6870174889237694e-20},
        {-0.0019175269175269176, 1.0675702776872475e-19},
        {0.00641025641025641, 2.2240044563805217e-19},
        {-0.029550653594771242, 4.861760957508855e-19},
        {0.17964437236883057, -6.401600482710946e-19},
        {-1.3924322169059011, 1.5837056989230303e-17},
        {13.402864044168393, -6.154114101993966e-16},
        {-156.84828462600203, 9.391823141715389e-15},
        {2193.1033333333335, -1.3339255626002948e-13},
        {-36108.77125372499, 5.897583353514365e-13}};
    Real inv = Real(1.0) / x;
    Real inv2 = inv * inv;
    Real p = inv;
    Real series(0.0);
    for (const Real& b : bern) {
        series += b * p;
        p *= inv2;
        if (std::fabs((b * p).hi) < 1e-36) break;
    }
    Real lg = (x - Real(0.5)) * log(x) - x + k_half_ln_2pi + series;
    return lg - shift;
}

} // namespace amsq::dd

namespace amsq {

// ADL-friendly shims so templated code can call unqualified exp/log/... on
// either double or dd::Real.
using std::exp;
using std::fabs;
using std::lgamma;
using std::log;
using std::sqrt;

inline double to_double(double x) { return x; }
inline double to_double(dd::Real x) { return double(x); }

} // namespace amsq
