#pragma once

// Closed-form asymptotic approximations to F_k(x) and f_k(x) in the eleven
// regions of the scaled strip {(y, z) = (x/N, k/N)}, plus the special
// functions the corner layers need.
//
// Deviation regions (R2, R3, III, VI) approximate F_k(x) - F_k(inf), which
// is always <= 0; the amplitude is computed from |.| magnitudes and the
// sign is fixed by that semantics. Densities are the region formulas
// multiplied by the governing saddle, which makes them positive.

#include <cmath>
#include <vector>

#include "amsq/saddle.hpp"

namespace amsq {

// ---- special functions -------------------------------------------------

inline double log_gamma(double x) {
    if (!(x > 0.0)) throw error(errc::domain, "log_gamma: x must be positive");
    return std::lgamma(x);
}

// Integer-order Bessel J_n for any real argument, via the reflection
// identities J_{-n}(x) = (-1)^n J_n(x) and J_n(-x) = (-1)^n J_n(x).
inline double bessel_j(int n, double x) {
    int sign = 1;
    if (n < 0) {
        n = -n;
        if (n & 1) sign = -sign;
    }
    if (x < 0.0) {
        x = -x;
        if (n & 1) sign = -sign;
    }
    return sign * std::cyl_bessel_j(double(n), x);
}

inline double normal_cdf(double v) { return 0.5 * std::erfc(-v / std::sqrt(2.0)); }

// ---- scaled coordinates ------------------------------------------------

struct ScaledPoint {
    double y = 0.0;       // x / N
    double z = 0.0;       // k / N
    double chi = 0.0;     // x N, corner scale
    double l = 0.0;       // k - floor(c), corner offset
    int j = 0;            // N - k, top boundary offset
    double vtrans = 0.0;  // (y - Y0(z)) sqrt(N / Y2(z))
    double s = 0.0;       // theta / N  (filled by callers that have a saddle)
    double s_star = 0.0;  // (z - gamma) / x, Region VII saddle
};

inline ScaledPoint scaled_point(const Model& m, int k, double x) {
    ScaledPoint p;
    const double N = m.n();
    p.y = x / N;
    p.z = double(k) / N;
    p.chi = x * N;
    p.l = k - m.d.c_floor;
    p.j = m.n() - k;
    double y2 = curve_y2(m, p.z);
    if (y2 > 0.0) p.vtrans = (p.y - curve_y0(m, p.z)) * std::sqrt(N / y2);
    if (x > 0.0) p.s_star = (p.z - m.d.gamma) / x;
    return p;
}

struct ApproxResult {
    SignedLog value;        // F_k(x), or F_k(x) - F_k(inf) in deviation regions
    RegionTag region = RegionTag::R1;
    bool is_deviation = false;
    std::optional<double> saddle;
    bool near_coalescence = false;
};

namespace detail {

// Total d^2/dtheta^2 of y theta + mu + eta(W_branch(theta), theta, z) at
// the saddle; the Hessian factor of the iterated saddle-point evaluation.
inline double psi_tt(const Model& m, Branch b, double y, double theta, double z) {
    double lower = in_coalescence_window(m, z) ? theta_star(m, z)
                                               : std::numeric_limits<double>::quiet_NaN();
    double h = fd_step(theta, lower, 1e-3);
    return second_derivative(
        [&](double t) { return y * t + psi_saddle_part(m, b, t, z); }, theta, h);
}

inline double psi0_tt(const Model& m, double y, double theta) {
    double h = fd_step(theta, m.d.theta0, 1e-3);
    return second_derivative([&](double t) { return psi0(m, y, t); }, theta, h);
}

inline double log_lambda_ratio_n(const Model& m) {
    return m.n() * (std::log(m.lambda()) - std::log(1.0 + m.lambda()));
}

} // namespace detail

// ---- interior (Theorem regions R1, R2, R3) ------------------------------

inline ApproxResult interior_G(const Model& m, Branch b, double y, double z,
                               const RootResult& root) {
    const double N = m.n();
    double T = root.theta;
    WSaddles ws = saddle_w(m, T, z);
    double w = w_branch(ws, b);
    double eww = eta_ww(m, b, T, z);
    double ptt = detail::psi_tt(m, b, y, T, z);
    double Psi = y * T + psi_saddle_part(m, b, T, z);
    double lm = -std::log(2.0 * M_PI * N) + detail::log_lambda_ratio_n(m) -
                std::log(std::fabs(T)) - std::log(std::fabs(w)) +
                0.5 * std::log(std::fabs(m.d.theta0 / (T - m.d.theta0))) -
                0.5 * std::log(std::fabs(eww)) - 0.5 * std::log(std::fabs(ptt)) + N * Psi;
    ApproxResult r;
    r.saddle = T;
    r.near_coalescence = root.near_coalescence;
    if (b == Branch::minus && T > 0.0) {
        r.region = RegionTag::R1;
        r.is_deviation = false;
        r.value = SignedLog::from_log(1, lm);
    } else {
        r.region = b == Branch::minus ? RegionTag::R2 : RegionTag::R3;
        r.is_deviation = true;
        r.value = SignedLog::from_log(-1, lm);
    }
    return r;
}

inline ApproxResult interior_G1(const Model& m, double y, double z) {
    RootResult root = solve_theta(m, y, z);
    if (std::fabs(root.theta) < 1e-8)
        throw error(errc::singular, "interior_G1: Theta ~ 0, use Region II");
    return interior_G(m, Branch::minus, y, z, root);
}

inline ApproxResult interior_G2(const Model& m, double y, double z) {
    RootResult root = solve_theta_plus(m, y, z);
    return interior_G(m, Branch::plus, y, z, root);
}

// ---- Region I: corner layer at (0, gamma) -------------------------------

// Residue series shared by the corner CDF, density and conditional-law
// weights. Terms are indexed by j >= 0 with a_j = j + 1 - alpha; the
// density weight is a^(j-1) and each CDF/mass weight gains a factor a/phi.
struct CornerSeries {
    SignedLog sum;            // sum of the series with the requested weights
    int terms_used = 0;
    double truncation = 0.0;  // |last term| / |partial sum|
};

enum class CornerWeight { density, cdf_deviation };

inline CornerSeries corner_series(const Model& m, double l, double chi, CornerWeight wt,
                                  int max_terms = 200) {
    const double alpha = m.d.alpha, phi = m.d.phi, rho = m.d.rho, beta = m.d.beta;
    const double g = m.d.gamma, lam = m.lambda();
    SignedLogSum<double> sum;
    double partial_max = -std::numeric_limits<double>::infinity();
    double last_rel = 1.0;
    int used = 0, consecutive_small = 0;
    for (int j = 0; j < max_terms; ++j) {
        double a = j + 1.0 - alpha;
        double bes = bessel_j(int(std::lround(l)) - j - 1, (alpha - 1.0 - j) * beta / phi);
        double lm = -phi * chi / a + a * (rho - phi) / phi + (j - 1.0) * std::log(a) -
                    std::lgamma(j + 1.0) + a * std::log(2.0 * lam * (1.0 - g) / beta);
        int sgn = 1;
        if (bes == 0.0) sgn = 0;
        else {
            sgn = bes > 0 ? 1 : -1;
            lm += std::log(std::fabs(bes));
        }
        if (wt == CornerWeight::cdf_deviation) lm += std::log(a / phi);
        if (sgn != 0) {
            sum.add(SignedLog::from_log(sgn, lm));
            partial_max = std::max(partial_max, lm);
            last_rel = std::exp(lm - partial_max);
        } else {
            last_rel = 0.0;
        }
        used = j + 1;
        consecutive_small = (last_rel < 1e-14) ? consecutive_small + 1 : 0;
        if (j > int(std::fabs(l)) + 2 && consecutive_small >= 2) break;
    }
    auto res = sum.evaluate();
    if (used >= max_terms && consecutive_small < 2)
        throw error(errc::slow_convergence, "corner series: no convergence in 200 terms");
    return {res.value, used, last_rel};
}

// Density f_k(x) in Region I, k = floor(c) + l, chi = x N.
inline ApproxResult corner_I_density(const Model& m, int k, double x) {
    const double N = m.n();
    ScaledPoint p = scaled_point(m, k, x);
    CornerSeries s = corner_series(m, p.l, p.chi, CornerWeight::density);
    const double g = m.d.gamma;
    double lpref = 0.5 * std::log(N / (2.0 * M_PI)) +
                   0.5 * std::log(m.d.rho * m.d.phi / (g * (1.0 - g))) +
                   (p.l - m.d.alpha) * std::log(m.d.beta / (2.0 * g)) +
                   N * phi_entropy(m, g);
    ApproxResult r;
    r.region = RegionTag::I;
    r.value = SignedLog::from_log(s.sum.sign, s.sum.log_mag + lpref);
    return r;
}

// F_k(x) in Region I: exact stationary mass plus the series deviation.
inline ApproxResult corner_I(const Model& m, int k, double x) {
    const double N = m.n();
    ScaledPoint p = scaled_point(m, k, x);
    CornerSeries s = corner_series(m, p.l, p.chi, CornerWeight::cdf_deviation);
    const double g = m.d.gamma;
    double lpref = 0.5 * std::log(N / (2.0 * M_PI)) +
                   0.5 * std::log(m.d.rho * m.d.phi / (g * (1.0 - g))) +
                   (p.l - m.d.alpha) * std::log(m.d.beta / (2.0 * g)) +
                   N * phi_entropy(m, g) - std::log(N);
    SignedLogSum<double> comb;
    comb.add(stationary_log<double>(m, k));
    comb.add(SignedLog::from_log(-s.sum.sign, s.sum.log_mag + lpref));
    ApproxResult r;
    r.region = RegionTag::I;
    r.value = comb.evaluate().value;
    return r;
}

// Region-I mass M2(k) = F_k(inf) - F_k(0) via the same series at chi = 0.
inline SignedLog corner_I_mass(const Model& m, int k) {
    ScaledPoint p = scaled_point(m, k, 0.0);
    CornerSeries s = corner_series(m, p.l, 0.0, CornerWeight::cdf_deviation);
    const double g = m.d.gamma;
    double lpref = 0.5 * std::log(m.n() / (2.0 * M_PI)) +
                   0.5 * std::log(m.d.rho * m.d.phi / (g * (1.0 - g))) +
                   (p.l - m.d.alpha) * std::log(m.d.beta / (2.0 * g)) +
                   m.n() * phi_entropy(m, g) - std::log(double(m.n()));
    return SignedLog::from_log(s.sum.sign, s.sum.log_mag + lpref);
}

// ---- Region II: transition layer along y = Y0(z) ------------------------

inline ApproxResult transition_II(const Model& m, double y, double z) {
    if (!(z > m.d.gamma) || !(z < 1.0))
        throw error(errc::domain, "transition_II: gamma < z < 1 required");
    const double N = m.n();
    double y2 = curve_y2(m, z);
    double v = (y - curve_y0(m, z)) * std::sqrt(N / y2);
    double lm = -0.5 * std::log(2.0 * M_PI * N * z * (1.0 - z)) + N * phi_entropy(m, z) +
                std::log(normal_cdf(v));
    ApproxResult r;
    r.region = RegionTag::II;
    r.value = SignedLog::from_log(1, lm);
    return r;
}

inline SignedLog transition_II_density(const Model& m, double y, double z) {
    const double N = m.n();
    double y2 = curve_y2(m, z);
    double v = (y - curve_y0(m, z)) * std::sqrt(N / y2);
    double lm = -std::log(2.0 * M_PI * N) - 0.5 * std::log(z * (1.0 - z) * y2) +
                N * phi_entropy(m, z) - 0.5 * v * v;
    return SignedLog::from_log(1, lm);
}

// ---- Region III: boundary z = 0, k = O(1) --------------------------------

inline ApproxResult boundary_III(const Model& m, int k, double y) {
    const double N = m.n();
    RootResult root = solve_theta0(m, y);
    double T = root.theta;
    double ptt = detail::psi0_tt(m, y, T);
    double lm = k * std::log(N) - std::lgamma(k + 1.0) + detail::log_lambda_ratio_n(m) -
                0.5 * std::log(2.0 * M_PI * N) - std::log(std::fabs(T)) +
                0.5 * std::log(std::fabs(m.d.theta0 / (T - m.d.theta0))) +
                k * std::log(std::fabs(m.lambda() - m.d.gamma * T)) + N * psi0(m, y, T) -
                0.5 * std::log(std::fabs(ptt));
    ApproxResult r;
    r.region = RegionTag::III;
    r.is_deviation = true;
    r.saddle = T;
    r.value = SignedLog::from_log(-1, lm);
    return r;
}

// ---- Regions IV / VI: boundary z = 1, j = N - k = O(1) -------------------

inline ApproxResult boundary_IV(const Model& m, int j, double y) {
    const double N = m.n();
    RootResult root = solve_theta1(m, y);
    double T = root.theta;
    if (std::fabs(T) < 1e-8)
        throw error(errc::singular, "boundary_IV: Theta1 ~ 0, use Region V");
    double mpp = mu_second(m, T);
    double lm = j * std::log(N) - std::lgamma(j + 1.0) - 0.5 * std::log(2.0 * M_PI * N) +
                detail::log_lambda_ratio_n(m) - std::log(std::fabs(T)) +
                0.5 * std::log(std::fabs(m.d.theta0 / (T - m.d.theta0))) +
                j * std::log(std::fabs((1.0 + (1.0 - m.d.gamma) * T) / m.lambda())) +
                N * (y * T + mu_abs(m, T)) - 0.5 * std::log(std::fabs(mpp));
    ApproxResult r;
    r.saddle = T;
    if (T > 0.0) {
        r.region = RegionTag::IV;
        r.is_deviation = false;
        r.value = SignedLog::from_log(1, lm);
    } else {
        r.region = RegionTag::VI;
        r.is_deviation = true;
        r.value = SignedLog::from_log(-1, lm);
    }
    return r;
}

inline ApproxResult boundary_VI(const Model& m, int j, double y) {
    if (!(y > curve_y0(m, 1.0)))
        throw error(errc::out_of_region, "boundary_VI: y > Y0(1) required");
    return boundary_IV(m, j, y);
}

// ---- Region V: corner at (Y0(1), 1) --------------------------------------

inline ApproxResult corner_V(const Model& m, int j, double y) {
    const double N = m.n();
    double v = (y - curve_y0(m, 1.0)) * std::sqrt(N / curve_y2(m, 1.0));
    double lm = -std::lgamma(j + 1.0) + j * std::log(N / m.lambda()) +
                detail::log_lambda_ratio_n(m) + std::log(normal_cdf(v));
    ApproxResult r;
    r.region = RegionTag::V;
    r.value = SignedLog::from_log(1, lm);
    return r;
}

inline SignedLog corner_V_density(const Model& m, int j, double y) {
    const double N = m.n();
    double y2 = curve_y2(m, 1.0);
    double v = (y - curve_y0(m, 1.0)) * std::sqrt(N / y2);
    double lm = -std::lgamma(j + 1.0) + j * std::log(N / m.lambda()) +
                detail::log_lambda_ratio_n(m) - 0.5 * v * v -
                0.5 * std::log(2.0 * M_PI * N * y2);
    return SignedLog::from_log(1, lm);
}

// ---- Region VII: boundary y = 0, gamma < z < 1, x = O(1) -----------------

inline ApproxResult boundary_VII(const Model& m, double x, double z) {
    const double g = m.d.gamma;
    if (!(z > g) || !(z < 1.0))
        throw error(errc::singular, "boundary_VII: gamma < z < 1 required");
    if (!(x > 0.0)) throw error(errc::domain, "boundary_VII: x > 0 required");
    const double N = m.n(), lam = m.lambda(), rho = m.d.rho, phi = m.d.phi, alpha = m.d.alpha;
    double u = z - g;
    double lm = -1.5 * std::log(2.0 * M_PI * N) + 0.5 * std::log(rho / (phi * g * (1.0 - z))) -
                std::log(u) + std::lgamma(x * phi / u + 1.0 - alpha) +
                alpha * std::log(x * phi / u) +
                N * (u * (std::log(x) + 1.0 - 2.0 * std::log(u) - std::log(N)) +
                     z * std::log(lam) - (1.0 - z) * std::log(1.0 - z) - std::log(lam + 1.0) -
                     g * std::log(g)) +
                x * phi / u * std::log(g / (phi * u * N)) +
                (2.0 * lam * (1.0 - g) / u + lam - 1.0) * x;
    ApproxResult r;
    r.region = RegionTag::VII;
    r.saddle = u / x;  // S* = (z - gamma)/x
    r.value = SignedLog::from_log(1, lm);
    return r;
}

// ---- Region VIII: corner at (0, 1), j = O(1), x = O(1) -------------------

inline ApproxResult corner_VIII(const Model& m, int j, double x) {
    if (!(x > 0.0)) throw error(errc::domain, "corner_VIII: x > 0 required");
    const double N = m.n(), lam = m.lambda(), g = m.d.gamma;
    const double rho = m.d.rho, phi = m.d.phi, alpha = m.d.alpha;
    double u = 1.0 - g;
    double lm = 2.0 * j * std::log(N) - std::lgamma(j + 1.0) + detail::log_lambda_ratio_n(m) -
                std::log(2.0 * M_PI * N) + 0.5 * std::log(rho / (phi * g)) - std::log(u) +
                N * (u * (std::log(x) + 1.0 - 2.0 * std::log(u) - std::log(N)) -
                     g * std::log(g)) +
                alpha * std::log(x * phi / u) + std::lgamma(x * phi / u + 1.0 - alpha) +
                j * std::log(u * u / (lam * x)) + x * phi / u * std::log(g / (phi * u * N)) +
                (3.0 * lam - 1.0) * x;
    ApproxResult r;
    r.region = RegionTag::VIII;
    r.saddle = u / x;  // S*(x, 1)
    r.value = SignedLog::from_log(1, lm);
    return r;
}

// ---- density dispatcher --------------------------------------------------

struct DensityApprox {
    SignedLog value;
    RegionTag region;
    std::optional<double> saddle;
};

// f_k(x) by classifying the scaled point and multiplying the region formula
// by its governing saddle (Regions I, II and V carry their own density
// forms). The transition/corner layers default to one standard width here:
// differentiating the layer's normal-CDF form loses accuracy in the Gaussian
// tails, so the interior formulas take over beyond |V| = 1.
inline DensityApprox density_approx(const Model& m, int k, double x,
                                    ClassifyConfig cfg = {1.0, 1.0, 1.0, 2.0}) {
    const double N = m.n();
    double y = x / N, z = double(k) / N;
    RegionVerdict v = classify(m, y, z, cfg);
    DensityApprox out;
    out.region = v.tag;
    auto times_saddle = [&](const ApproxResult& a, double saddle) {
        out.saddle = saddle;
        return SignedLog::from_log(a.value.sign * (saddle < 0 ? -1 : 1),
                                   a.value.log_mag + std::log(std::fabs(saddle)));
    };
    switch (v.tag) {
        case RegionTag::R1:
        case RegionTag::R2: {
            auto a = interior_G1(m, y, z);
            out.value = times_saddle(a, *a.saddle);
            break;
        }
        case RegionTag::R3: {
            auto a = interior_G2(m, y, z);
            out.value = times_saddle(a, *a.saddle);
            break;
        }
        case RegionTag::I: {
            auto a = corner_I_density(m, k, x);
            out.value = a.value;
            break;
        }
        case RegionTag::II:
            out.value = transition_II_density(m, y, z);
            break;
        case RegionTag::III: {
            auto a = boundary_III(m, k, y);
            out.value = times_saddle(a, *a.saddle);
            break;
        }
        case RegionTag::IV:
        case RegionTag::VI: {
            auto a = boundary_IV(m, m.n() - k, y);
            out.value = times_saddle(a, *a.saddle);
            break;
        }
        case RegionTag::V:
            out.value = corner_V_density(m, m.n() - k, y);
            break;
        case RegionTag::VII: {
            auto a = boundary_VII(m, x, z);
            out.value = times_saddle(a, *a.saddle * N);
            break;
        }
        case RegionTag::VIII: {
            auto a = corner_VIII(m, m.n() - k, x);
            out.value = times_saddle(a, *a.saddle * N);
            break;
        }
    }
    return out;
}

} // namespace amsq
