#pragma once

// Scalar root finding and Richardson-extrapolated finite differences.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace amsq {

enum class errc {
    ok,
    unstable,
    integer_c,
    out_of_range,
    domain,
    branch,
    complex_saddle,
    singular,
    pole,
    degenerate_spectrum,
    cancellation,
    no_convergence,
    out_of_region,
    near_coalescence,
    slow_convergence,
};

inline const char* errc_name(errc e) {
    switch (e) {
        case errc::ok: return "OK";
        case errc::unstable: return "UNSTABLE";
        case errc::integer_c: return "INTEGER_C";
        case errc::out_of_range: return "OUT_OF_RANGE";
        case errc::domain: return "DOMAIN";
        case errc::branch: return "BRANCH";
        case errc::complex_saddle: return "COMPLEX";
        case errc::singular: return "SINGULAR";
        case errc::pole: return "POLE";
        case errc::degenerate_spectrum: return "DEGENERATE_SPECTRUM";
        case errc::cancellation: return "CANCELLATION";
        case errc::no_convergence: return "NO_CONVERGENCE";
        case errc::out_of_region: return "OUT_OF_REGION";
        case errc::near_coalescence: return "NEAR_COALESCENCE";
        case errc::slow_convergence: return "SLOW_CONVERGENCE";
    }
    return "UNKNOWN";
}

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

  private:
    errc code_;
};

// Hybrid bisection/secant on a bracketing interval. f(lo) and f(hi) must
// have opposite signs.
template <class F>
double find_root(F&& f, double lo, double hi, double xtol = 1e-15, int max_iter = 250) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::isnan(flo) || std::isnan(fhi) || flo * fhi > 0.0)
        throw error(errc::no_convergence, "root not bracketed");
    for (int it = 0; it < max_iter; ++it) {
        double mid;
        // secant candidate on even rounds, bisection on odd rounds so the
        // bracket provably halves every other step
        double denom = fhi - flo;
        if (it % 2 == 0 && denom != 0.0) {
            mid = hi - fhi * (hi - lo) / denom;
            if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        } else {
            mid = 0.5 * (lo + hi);
        }
        // keep strictly interior to guarantee progress
        double span = hi - lo;
        mid = std::min(std::max(mid, lo + 0.001 * span), hi - 0.001 * span);
        double fm = f(mid);
        if (fm == 0.0 || span < xtol * std::max(1.0, std::fabs(mid))) return mid;
        if (std::isnan(fm)) {
            mid = 0.5 * (lo + hi);
            fm = f(mid);
            if (std::isnan(fm)) throw error(errc::no_convergence, "nan inside bracket");
        }
        if (flo * fm < 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Expands [anchor - step, anchor) downwards until f changes sign.
template <class F>
std::optional<std::pair<double, double>> expand_bracket_down(F&& f, double anchor, double step,
                                                             double limit, int max_steps = 200) {
    double hi = anchor;
    double fhi = f(hi);
    for (int i = 0; i < max_steps && hi > limit; ++i) {
        double lo = std::max(hi - step, limit);
        double flo = f(lo);
        if (!std::isnan(flo) && flo * fhi <= 0.0) return std::make_pair(lo, hi);
        hi = lo;
        fhi = flo;
        step *= 2.0;
    }
    return std::nullopt;
}

// Central difference with two Richardson extrapolation levels.
template <class F>
double derivative(F&& f, double x, double h) {
    auto d = [&](double hh) { return (f(x + hh) - f(x - hh)) / (2.0 * hh); };
    double d1 = d(h), d2 = d(h / 2), d3 = d(h / 4);
    double r1 = (4.0 * d2 - d1) / 3.0;
    double r2 = (4.0 * d3 - d2) / 3.0;
    return r2 + (r2 - r1) / 15.0;
}

template <class F>
double second_derivative(F&& f, double x, double h) {
    auto d = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
    double d1 = d(h), d2 = d(h / 2);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace amsq
