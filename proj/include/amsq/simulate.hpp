#pragma once

// Event-driven Monte Carlo simulation of N on-off sources driving the
// fluid buffer; the independent oracle for the analytic solvers. Between
// jumps of the source count Z the buffer moves linearly at rate Z - c
// (reflected at 0), so occupation times below each grid level are exact
// per interval; the estimator has no discretization bias.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "amsq/params.hpp"
#include "amsq/spectral.hpp"

namespace amsq {

struct SimConfig {
    double horizon = 1e6;    // simulated time per replication
    double warmup = -1.0;    // < 0: default to 5% of horizon
    int replications = 32;
    std::uint64_t seed = 1;
    std::vector<double> x_grid;  // sorted ascending
    double confidence = 0.99;

    double effective_warmup() const { return warmup < 0.0 ? 0.05 * horizon : warmup; }
};

struct SimEstimate {
    int n = 0;
    std::vector<double> x_grid;
    // joint[k][i] = P[Z = k, X <= x_grid[i]]
    std::vector<std::vector<double>> joint;
    std::vector<std::vector<double>> half_widths;
    std::vector<double> marginal_z;            // P[Z = k]
    std::vector<double> marginal_half_width;
    std::vector<double> p_positive;            // P[Z = k, X > 0]
    std::vector<double> p_positive_half_width;
    double confidence = 0.99;
    int replications = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Replication r draws from an mt19937_64 seeded by splitmix64 iterated
// r+1 times from the user seed; streams are reproducible and independent
// of execution order.
inline std::mt19937_64 replication_rng(std::uint64_t seed, int replication) {
    std::uint64_t s = seed;
    std::uint64_t derived = 0;
    for (int i = 0; i <= replication; ++i) derived = splitmix64(s);
    return std::mt19937_64(derived);
}

// two-sided Student-t quantile (upper p) via the normal quantile with a
// Cornish-Fisher degrees-of-freedom correction; adequate for CI widths
inline double t_quantile(double p, int dof) {
    // Acklam-style inverse normal
    auto inv_norm = [](double u) {
        static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
        static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
        static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00, 2.938163982698783e+00};
        static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
        double q, r;
        if (u < 0.02425) {
            q = std::sqrt(-2 * std::log(u));
            return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        if (u > 1 - 0.02425) {
            q = std::sqrt(-2 * std::log(1 - u));
            return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
                   ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
        }
        q = u - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    };
    double z = inv_norm(p);
    double g1 = (z * z * z + z) / 4.0;
    double g2 = (5 * z * z * z * z * z + 16 * z * z * z + 3 * z) / 96.0;
    double v = dof;
    return z + g1 / v + g2 / (v * v);
}

struct RepAccumulator {
    double time = 0.0;
    std::vector<double> z_time;                 // time with Z = k
    std::vector<std::vector<double>> joint;     // time with Z = k and X <= x_i
    std::vector<double> positive;               // time with Z = k and X > 0

    RepAccumulator(int n, size_t grid) : z_time(n + 1, 0.0), positive(n + 1, 0.0) {
        joint.assign(n + 1, std::vector<double>(grid, 0.0));
    }
};

// Occupation time of {X(t) <= level} on an interval of length tau where X
// moves linearly from x0 at rate `drift` with reflection at 0.
inline double time_below(double x0, double drift, double tau, double level) {
    if (drift == 0.0) return x0 <= level ? tau : 0.0;
    if (drift < 0.0) {
        // decreasing toward 0, then stays (reflection handled by caller
        // splitting at the hit time; here x stays >= 0 the whole interval)
        if (x0 <= level) return tau;
        double t_cross = (x0 - level) / (-drift);
        return t_cross >= tau ? 0.0 : tau - t_cross;
    }
    if (x0 > level) return 0.0;
    double t_cross = (level - x0) / drift;
    return std::min(tau, t_cross);
}

} // namespace detail

inline SimEstimate run_simulation(const Model& m, const SimConfig& cfg) {
    const int n = m.n();
    const double c = m.c(), lam = m.lambda();
    const size_t grid = cfg.x_grid.size();
    std::vector<detail::RepAccumulator> reps;
    reps.reserve(cfg.replications);

    for (int r = 0; r < cfg.replications; ++r) {
        auto rng = detail::replication_rng(cfg.seed, r);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        auto exp_draw = [&](double rate) { return -std::log1p(-unif(rng)) / rate; };

        detail::RepAccumulator acc(n, grid);
        // start from the stationary source count, empty buffer
        std::binomial_distribution<int> binom(n, lam / (lam + 1.0));
        int z = binom(rng);
        double x = 0.0;
        double t = 0.0;
        const double warmup = cfg.effective_warmup();
        const double horizon = cfg.horizon;

        while (t < horizon) {
            double rate = lam * (n - z) + z;
            double tau = exp_draw(rate);
            if (t + tau > horizon) tau = horizon - t;
            double drift = z - c;

            // process the interval [t, t + tau), splitting at the buffer
            // hit time when draining to zero
            double seg_start = t;
            double seg_x = x;
            double remaining = tau;
            while (remaining > 0.0) {
                double seg = remaining;
                double d = drift;
                if (seg_x == 0.0 && drift < 0.0) d = 0.0;  // stays empty
                else if (d < 0.0) {
                    double hit = seg_x / (-d);
                    if (hit < seg) seg = hit;
                }
                double obs_start = std::max(seg_start, warmup);
                double obs_len = (seg_start + seg) - obs_start;
                if (obs_len > 0.0) {
                    acc.time += obs_len;
                    acc.z_time[z] += obs_len;
                    double x_at_obs = seg_x + d * (obs_start - seg_start);
                    for (size_t i = 0; i < grid; ++i)
                        acc.joint[z][i] += detail::time_below(x_at_obs, d, obs_len, cfg.x_grid[i]);
                    // segments were split at zero hits, so X > 0 throughout
                    // any moving segment; an empty-and-draining segment has
                    // d == 0 and stays at zero
                    if (d != 0.0 || x_at_obs > 0.0) acc.positive[z] += obs_len;
                }
                seg_x = std::max(0.0, seg_x + d * seg);
                seg_start += seg;
                remaining -= seg;
            }
            x = seg_x;
            t += tau;
            if (t >= horizon) break;

            // jump of Z
            double birth = lam * (n - z);
            if (unif(rng) * rate < birth) ++z;
            else --z;
        }
        reps.push_back(std::move(acc));
    }

    // merge replication means; order-insensitive by construction
    SimEstimate est;
    est.n = n;
    est.x_grid = cfg.x_grid;
    est.confidence = cfg.confidence;
    est.replications = cfg.replications;
    est.joint.assign(n + 1, std::vector<double>(grid, 0.0));
    est.half_widths.assign(n + 1, std::vector<double>(grid, 0.0));
    est.marginal_z.assign(n + 1, 0.0);
    est.marginal_half_width.assign(n + 1, 0.0);
    est.p_positive.assign(n + 1, 0.0);
    est.p_positive_half_width.assign(n + 1, 0.0);

    const int R = cfg.replications;
    double tq = detail::t_quantile(0.5 + cfg.confidence / 2.0, std::max(1, R - 1));
    auto ci = [&](auto&& extract, double& mean_out, double& hw_out) {
        double mean = 0.0;
        for (int r = 0; r < R; ++r) mean += extract(reps[r]);
        mean /= R;
        double var = 0.0;
        for (int r = 0; r < R; ++r) {
            double d = extract(reps[r]) - mean;
            var += d * d;
        }
        var = R > 1 ? var / (R - 1) : 0.0;
        mean_out = mean;
        hw_out = tq * std::sqrt(var / R);
    };

    // A state never observed across all replications leaves the batch CI
    // degenerate at [0, 0]; replace it with the one-sided zero-event bound
    // on the visit rate, -ln(1 - confidence) / T_total visits, times the
    // mean sojourn of that state.
    double t_total = R * (cfg.horizon - cfg.effective_warmup());
    auto zero_bound = [&](int k) {
        double sojourn = 1.0 / (lam * (n - k) + k);
        return -std::log1p(-cfg.confidence) * sojourn / t_total;
    };
    for (int k = 0; k <= n; ++k) {
        ci([&](const detail::RepAccumulator& a) { return a.z_time[k] / a.time; },
           est.marginal_z[k], est.marginal_half_width[k]);
        if (est.marginal_z[k] == 0.0 && est.marginal_half_width[k] == 0.0)
            est.marginal_half_width[k] = zero_bound(k);
        ci([&](const detail::RepAccumulator& a) { return a.positive[k] / a.time; },
           est.p_positive[k], est.p_positive_half_width[k]);
        if (est.p_positive[k] == 0.0 && est.p_positive_half_width[k] == 0.0)
            est.p_positive_half_width[k] = zero_bound(k);
        for (size_t i = 0; i < grid; ++i) {
            ci([&](const detail::RepAccumulator& a) { return a.joint[k][i] / a.time; },
               est.joint[k][i], est.half_widths[k][i]);
            if (est.joint[k][i] == 0.0 && est.half_widths[k][i] == 0.0)
                est.half_widths[k][i] = zero_bound(k);
        }
    }
    return est;
}

struct CompareCell {
    int k = 0;
    double x = 0.0;
    double exact = 0.0;
    double estimate = 0.0;
    double half_width = 0.0;
    double z_score = 0.0;
    bool covered = false;
    bool excluded = false;  // deep tail, validated analytically instead
};

struct CompareReport {
    std::vector<CompareCell> cells;
    int considered = 0;
    int covered = 0;
    double coverage = 1.0;
    double max_abs_z = 0.0;
    double deep_tail_cutoff = 1e-12;
};

template <class R>
CompareReport compare_simulation(const SimEstimate& est, const BasicSpectralSolution<R>& exact,
                                 double deep_tail_cutoff = 1e-12) {
    CompareReport rep;
    rep.deep_tail_cutoff = deep_tail_cutoff;
    for (int k = 0; k <= est.n; ++k) {
        for (size_t i = 0; i < est.x_grid.size(); ++i) {
            CompareCell cell;
            cell.k = k;
            cell.x = est.x_grid[i];
            cell.exact = exact.cdf(k, cell.x).value;
            cell.estimate = est.joint[k][i];
            cell.half_width = est.half_widths[k][i];
            cell.excluded = std::fabs(cell.exact) < deep_tail_cutoff;
            double dev = std::fabs(cell.estimate - cell.exact);
            cell.covered = cell.half_width == 0.0 ? dev == 0.0 : dev <= cell.half_width;
            cell.z_score = cell.half_width > 0.0 ? (cell.estimate - cell.exact) / cell.half_width
                                                 : (dev == 0.0 ? 0.0 : 1e9);
            if (!cell.excluded) {
                ++rep.considered;
                if (cell.covered) ++rep.covered;
                rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(cell.z_score));
            }
            rep.cells.push_back(cell);
        }
    }
    rep.coverage = rep.considered ? double(rep.covered) / rep.considered : 1.0;
    return rep;
}

} // namespace amsq
