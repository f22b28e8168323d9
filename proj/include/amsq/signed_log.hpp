#pragma once

// Sign + log-magnitude representation. The spectral coefficients span
// hundreds of orders of magnitude and alternate in sign, so products are
// accumulated here and sums are materialized in the linear domain after
// factoring out the largest magnitude.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "amsq/dd.hpp"

namespace amsq {

template <class R>
struct BasicSignedLog {
    int sign = 0;       // -1, 0, +1
    R log_mag = R(-std::numeric_limits<double>::infinity());

    static BasicSignedLog zero() { return {}; }
    static BasicSignedLog from_log(int s, R lm) { return {s, lm}; }

    bool is_zero() const { return sign == 0; }

    BasicSignedLog operator*(const BasicSignedLog& o) const {
        if (sign == 0 || o.sign == 0) return zero();
        return {sign * o.sign, log_mag + o.log_mag};
    }
    BasicSignedLog operator/(const BasicSignedLog& o) const {
        return {sign * o.sign, log_mag - o.log_mag};
    }

    double value() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(to_double(log_mag));
    }
    double log10_mag() const { return to_double(log_mag) / 2.302585092994046; }
};

using SignedLog = BasicSignedLog<double>;

template <class R>
BasicSignedLog<R> signed_log_of(R x) {
    using std::fabs;
    using std::log;
    if (to_double(x) == 0.0) return BasicSignedLog<R>::zero();
    int s = to_double(x) > 0.0 ? 1 : -1;
    return {s, log(fabs(x))};
}

// Neumaier-compensated accumulator.
template <class R>
struct CompensatedSum {
    R sum = R(0.0);
    R comp = R(0.0);

    void add(R v) {
        using std::fabs;
        R t = sum + v;
        if (fabs(sum) >= fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    R total() const { return sum + comp; }
};

// Sum of signed-log terms, materialized relative to the largest magnitude.
// `digits_lost` reports how many decimal digits the cancellation consumed.
template <class R>
struct SignedLogSum {
    std::vector<BasicSignedLog<R>> terms;

    void add(BasicSignedLog<R> t) {
        if (t.sign != 0) terms.push_back(t);
    }

    struct Result {
        BasicSignedLog<R> value;
        double digits_lost = 0.0;
    };

    Result evaluate() const {
        using std::exp;
        using std::fabs;
        using std::log;
        if (terms.empty()) return {BasicSignedLog<R>::zero(), 0.0};
        R max_lm = terms.front().log_mag;
        for (const auto& t : terms)
            if (max_lm < t.log_mag) max_lm = t.log_mag;
        CompensatedSum<R> acc;
        for (const auto& t : terms)
            acc.add(R(double(t.sign)) * exp(t.log_mag - max_lm));
        R s = acc.total();
        if (to_double(s) == 0.0) {
            // cancelled below working precision
            return {BasicSignedLog<R>::zero(), std::numeric_limits<double>::infinity()};
        }
        double lost = -std::log10(std::min(1.0, std::fabs(to_double(s))));
        BasicSignedLog<R> v{to_double(s) > 0 ? 1 : -1, max_lm + log(fabs(s))};
        return {v, lost};
    }
};

} // namespace amsq
