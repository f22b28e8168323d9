#pragma once

// Exact steady-state solution of the fluid buffer: closed-form eigenvalues
// theta_j = -sigma(j/N), Krawtchouk-type polynomial values h_k(theta_j),
// product coefficients a_j, and the spectral sums for F_k(x) and f_k(x).
//
// The alternating spectral sum can cancel 10-40 decimal digits (F_k(0) = 0
// for k > floor(c) holds only through cancellation), so the whole pipeline
// is templated on the working real type: plain double, or dd::Real for a
// doubled mantissa.

#include <cmath>
#include <vector>

#include "amsq/params.hpp"
#include "amsq/signed_log.hpp"

namespace amsq {

// sigma(x) > 0 on [0, 1-gamma); theta_j = -sigma(j/N). Poles at x = gamma
// and x = 1 - gamma. gamma and rho are re-derived from the exact inputs
// (lambda, c, N) in the working precision so the double-double path is not
// capped by double-rounded constants.
template <class R = double>
R sigma(const Model& m, R x) {
    using std::sqrt;
    const R lam(m.lambda()), one(1.0);
    const R g = R(m.c()) / R(double(m.n()));
    const R rho = g - lam + lam * g;
    R denom = R(2.0) * (g - x) * (one - g - x);
    if (to_double(denom) == 0.0)
        throw error(errc::domain, "sigma pole at x = gamma or x = 1-gamma");
    R disc = rho * rho + R(4.0) * lam * (one - x) * x;
    return (rho + R(2.0) * (lam - one) * (one - x) * x + (one - R(2.0) * x) * sqrt(disc)) / denom;
}

template <class R = double>
std::vector<R> eigenvalues(const Model& m) {
    std::vector<R> th(m.spectrum_size());
    for (int j = 0; j < m.spectrum_size(); ++j)
        th[j] = -sigma<R>(m, R(double(j)) / R(double(m.n())));
    return th;
}

namespace detail {

template <class R>
R lchoose(R n, int k) {
    using std::lgamma;
    return lgamma(n + R(1.0)) - lgamma(R(double(k) + 1.0)) - lgamma(n - R(double(k) - 1.0));
}

// log C(n, k) for integer n >= k >= 0
inline double lchoose_int(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

template <class R>
R lchoose_int_r(int n, int k) {
    using std::lgamma;
    return lgamma(R(n + 1.0)) - lgamma(R(k + 1.0)) - lgamma(R(n - k + 1.0));
}

} // namespace detail

// h_k evaluated at the j-th eigenvalue, where the binomial exponents
// N V(theta_j) = j and N (1 - V(theta_j)) = N - j are integers and the sum
// has at most min(N-k, j) + 1 nonzero terms.
template <class R = double>
struct HPolyResult {
    BasicSignedLog<R> value;
    double digits_lost = 0.0;
};

template <class R = double>
HPolyResult<R> h_poly_at_eigen(const Model& m, int k, int j, R theta_j) {
    using std::log;
    using std::sqrt;
    const int n = m.n();
    const R lam(m.lambda()), one(1.0);
    R disc = sqrt((theta_j + one - lam) * (theta_j + one - lam) + R(4.0) * lam);
    R r1 = (disc + (lam - one - theta_j)) / (R(2.0) * lam);
    R r2 = (disc - (lam - one - theta_j)) / (R(2.0) * lam);
    R lr1 = log(r1), lr2 = log(r2);
    SignedLogSum<R> sum;
    for (int i = 0; i <= n - k; ++i) {
        if (i > j || n - k - i > n - j || n - k - i < 0) continue;
        R lm = detail::lchoose_int_r<R>(j, i) + detail::lchoose_int_r<R>(n - j, n - k - i) +
               R(double(i)) * lr1 + R(double(n - k - i)) * lr2;
        sum.add(BasicSignedLog<R>::from_log(i % 2 ? -1 : 1, lm));
    }
    auto res = sum.evaluate();
    return {res.value, res.digits_lost};
}

// Generalized h_k(theta) at arbitrary real theta (diagnostic mode): the
// exponents N V and N (1-V) are no longer integers, so the coefficients use
// log-gamma with sign tracking.
inline SignedLog h_poly_general(const Model& m, int k, double theta) {
    const int n = m.n();
    const double lam = m.lambda();
    double disc = std::sqrt((theta + 1 - lam) * (theta + 1 - lam) + 4 * lam);
    double V = 0.5 * (1.0 + ((2 * m.d.gamma - 1) * theta - lam - 1) / disc);
    double r1 = (disc + (lam - 1 - theta)) / (2 * lam);
    double r2 = (disc - (lam - 1 - theta)) / (2 * lam);
    double a = n * V, b = n * (1.0 - V);
    auto signed_lgamma = [](double x, int& sign) {
        int sgn = 0;
        double v = ::lgamma_r(x, &sgn);
        sign = sgn;
        return v;
    };
    SignedLogSum<double> sum;
    for (int i = 0; i <= n - k; ++i) {
        // C(a, i) C(b, n-k-i) (-r1)^i r2^(n-k-i)
        int s1, s2, s3, s4;
        double lm = signed_lgamma(a + 1, s1) - detail::lchoose_int(i, 0) - std::lgamma(i + 1.0) -
                    signed_lgamma(a - i + 1, s2) + signed_lgamma(b + 1, s3) -
                    std::lgamma(n - k - i + 1.0) - signed_lgamma(b - (n - k - i) + 1, s4);
        int sgn = s1 * s2 * s3 * s4 * (i % 2 ? -1 : 1);
        lm += i * std::log(r1) + (n - k - i) * std::log(r2);
        sum.add(SignedLog::from_log(sgn, lm));
    }
    return sum.evaluate().value;
}

// Stationary (x -> infinity) mass: binomial(N, lambda/(1+lambda)).
template <class R = double>
BasicSignedLog<R> stationary_log(const Model& m, int k) {
    using std::log;
    const R lam(m.lambda());
    R lm = detail::lchoose_int_r<R>(m.n(), k) + R(double(k)) * log(lam) -
           R(double(m.n())) * log(R(1.0) + lam);
    return BasicSignedLog<R>::from_log(1, lm);
}

inline double stationary(const Model& m, int k) { return stationary_log<double>(m, k).value(); }

enum class Precision { Double, DoubleDouble };

struct EvalFlags {
    double digits_lost = 0.0;   // decimal digits consumed by cancellation
    bool cancellation = false;  // fewer than `budget` significant digits survived
};

// Immutable exact solution: eigenvalues, coefficients a_j and the matrix of
// h_k(theta_j). Evaluations at (k, x) are pure.
template <class R = double>
struct BasicSpectralSolution {
    Model model;
    std::vector<R> thetas;
    std::vector<BasicSignedLog<R>> coeffs;              // a_j
    std::vector<std::vector<BasicSignedLog<R>>> hmat;   // [k][j]
    double h_digits_lost = 0.0;                         // worst internal h loss
    double cancellation_budget = 6.0;                   // significant digits that must survive

    int count() const { return int(thetas.size()); }

    struct Value {
        double value = 0.0;
        SignedLog log_value;
        EvalFlags flags;
    };

    Value sum_terms(int k, double x, bool density) const {
        using std::log;
        SignedLogSum<R> sum;
        if (!density) sum.add(stationary_log<R>(model, k));
        for (int j = 0; j < count(); ++j) {
            const auto& h = hmat[k][j];
            if (h.is_zero() || coeffs[j].is_zero()) continue;
            int sgn = coeffs[j].sign * h.sign;
            R lm = coeffs[j].log_mag + h.log_mag + thetas[j] * R(x);
            if (density) {
                using std::fabs;
                sgn = -sgn; // extra factor theta_j < 0
                lm += log(fabs(thetas[j]));
            }
            sum.add(BasicSignedLog<R>::from_log(sgn, lm));
        }
        auto res = sum.evaluate();
        Value v;
        v.log_value = SignedLog::from_log(res.value.sign, to_double(res.value.log_mag));
        v.value = v.log_value.value();
        double precision_digits = std::is_same_v<R, double> ? 15.9 : 31.8;
        v.flags.digits_lost = res.digits_lost + h_digits_lost;
        v.flags.cancellation = precision_digits - v.flags.digits_lost < cancellation_budget;
        return v;
    }

    // F_k(x) = F_k(inf) + sum_j a_j e^{theta_j x} h_k(theta_j)
    Value cdf(int k, double x) const { return sum_terms(k, x, false); }
    // f_k(x) = sum_j a_j theta_j e^{theta_j x} h_k(theta_j), x > 0
    Value density(int k, double x) const { return sum_terms(k, x, true); }
};

namespace detail {

// lgamma(i) for integer i in [1, n+2], accumulated as a running sum of
// logs; two orders of magnitude cheaper than per-call lgamma in the
// double-double instantiation.
template <class R>
std::vector<R> lgamma_int_table(int n) {
    using std::log;
    std::vector<R> t(size_t(n) + 3, R(0.0));
    for (int i = 2; i <= n + 2; ++i) t[i] = t[i - 1] + log(R(double(i - 1)));
    return t;
}

} // namespace detail

namespace detail {

// Shared spectral context: eigenvalues, coefficients a_j, per-eigenvalue
// log R1/R2 and the integer lgamma table for the binomial sums.
template <class R>
struct SpectralContext {
    std::vector<R> thetas;
    std::vector<BasicSignedLog<R>> coeffs;
    std::vector<R> lr1, lr2;
    std::vector<R> lg;  // lgamma(i), i = 1..n+2

    explicit SpectralContext(const Model& m) : thetas(eigenvalues<R>(m)) {
        using std::fabs;
        using std::log;
        using std::sqrt;
        const int cnt = int(thetas.size());
        const R lam(m.lambda()), one(1.0);
        R base = R(double(m.n())) * (log(lam) - log(R(1.0) + lam));
        coeffs.resize(cnt);
        for (int j = 0; j < cnt; ++j) {
            int sgn = -1;
            R lm = base;
            for (int i = 0; i < cnt; ++i) {
                if (i == j) continue;
                R diff = thetas[i] - thetas[j];
                double rel = std::fabs(to_double(diff)) /
                             std::max(std::fabs(to_double(thetas[i])),
                                      std::fabs(to_double(thetas[j])));
                if (rel < 1e-12)
                    throw error(errc::degenerate_spectrum, "eigenvalues coincide within 1e-12");
                sgn *= (to_double(thetas[i]) < 0 ? -1 : 1) * (to_double(diff) < 0 ? -1 : 1);
                lm += log(fabs(thetas[i])) - log(fabs(diff));
            }
            coeffs[j] = BasicSignedLog<R>::from_log(sgn, lm);
        }
        lr1.resize(cnt);
        lr2.resize(cnt);
        for (int j = 0; j < cnt; ++j) {
            R t = thetas[j];
            R disc = sqrt((t + one - lam) * (t + one - lam) + R(4.0) * lam);
            lr1[j] = log((disc + (lam - one - t)) / (R(2.0) * lam));
            lr2[j] = log((disc - (lam - one - t)) / (R(2.0) * lam));
        }
        lg = lgamma_int_table<R>(m.n());
    }

    R lch(int nn, int kk) const { return lg[nn + 1] - lg[kk + 1] - lg[nn - kk + 1]; }

    // h_k(theta_j) row for one k
    std::vector<BasicSignedLog<R>> h_row(const Model& m, int k, double* digits_lost) const {
        const int n = m.n(), cnt = int(thetas.size());
        std::vector<BasicSignedLog<R>> row(cnt);
        for (int j = 0; j < cnt; ++j) {
            SignedLogSum<R> sum;
            for (int i = std::max(0, j - k); i <= std::min(n - k, j); ++i) {
                R lm = lch(j, i) + lch(n - j, n - k - i) + R(double(i)) * lr1[j] +
                       R(double(n - k - i)) * lr2[j];
                sum.add(BasicSignedLog<R>::from_log(i % 2 ? -1 : 1, lm));
            }
            auto res = sum.evaluate();
            row[j] = res.value;
            if (digits_lost) *digits_lost = std::max(*digits_lost, res.digits_lost);
        }
        return row;
    }
};

} // namespace detail

template <class R>
BasicSpectralSolution<R> build_solution_t(const Model& m) {
    BasicSpectralSolution<R> s{m, {}, {}, {}};
    detail::SpectralContext<R> ctx(m);
    s.thetas = ctx.thetas;
    s.coeffs = ctx.coeffs;
    s.hmat.resize(m.n() + 1);
    for (int k = 0; k <= m.n(); ++k) s.hmat[k] = ctx.h_row(m, k, &s.h_digits_lost);
    return s;
}

// Single-row evaluation without materializing the full h matrix; for
// large-N spot checks.
template <class R>
typename BasicSpectralSolution<R>::Value exact_row_value(const Model& m, int k, double x,
                                                         bool density) {
    detail::SpectralContext<R> ctx(m);
    BasicSpectralSolution<R> s{m, ctx.thetas, ctx.coeffs, {}};
    s.hmat.assign(size_t(k) + 1, {});
    s.hmat[k] = ctx.h_row(m, k, &s.h_digits_lost);
    return s.sum_terms(k, x, density);
}

using SpectralSolution = BasicSpectralSolution<double>;
using SpectralSolutionDD = BasicSpectralSolution<dd::Real>;

inline SpectralSolution build_solution(const Model& m) { return build_solution_t<double>(m); }
inline SpectralSolutionDD build_solution_dd(const Model& m) { return build_solution_t<dd::Real>(m); }

// Generator matrices of D F'(x) = M F(x): diagonal D with entries (j - c)
// and the tridiagonal birth-death generator M. Cross-check material for the
// closed-form spectrum; row-major (N+1) x (N+1).
struct GeneratorMatrices {
    int n = 0;
    std::vector<double> d_diag;
    std::vector<double> m_dense;

    double m(int i, int j) const { return m_dense[size_t(i) * (n + 1) + j]; }
};

inline GeneratorMatrices generator_oracle(const Model& m) {
    const int n = m.n();
    GeneratorMatrices g;
    g.n = n;
    g.d_diag.resize(n + 1);
    g.m_dense.assign(size_t(n + 1) * (n + 1), 0.0);
    for (int j = 0; j <= n; ++j) g.d_diag[j] = j - m.c();
    auto at = [&](int i, int j) -> double& { return g.m_dense[size_t(i) * (n + 1) + j]; };
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (j == i + 1 && i <= n - 1) at(i, j) = j;                       // death into state i
            else if (j == i) at(i, j) = -(m.lambda() * (n - j) + j);
            else if (j == i - 1 && i >= 1) at(i, j) = m.lambda() * (n - j);   // birth into state i
        }
    }
    return g;
}

} // namespace amsq
