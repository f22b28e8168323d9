#pragma once

// The four scalar saddle equations (Theta, Theta+, Theta0, Theta1), the
// region-boundary curves Y0, Y1, Y*, Y2, and classification of scaled
// points (y, z) into the eleven asymptotic regions.

#include <cmath>
#include <optional>

#include "amsq/kernel.hpp"

namespace amsq {

struct CurveValues {
    double y0 = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> y1;      // Theta = theta0 curve, gamma <= z < gamma^2/delta
    std::optional<double> ystar;   // saddle coalescence curve, gamma < z < gamma^2/delta
    double y2 = std::numeric_limits<double>::quiet_NaN();
};

inline double curve_zeta(const Model& m) {
    const double lam = m.lambda(), g = m.d.gamma;
    return lam * lam * (g - 1.0) + 2.0 * lam - g;
}

// Y0(z): locus where the dominant saddle crosses the pole at 0; the phase
// transition curve of the joint distribution.
inline double curve_y0(const Model& m, double z) {
    const double lam = m.lambda(), g = m.d.gamma, rho = m.d.rho;
    double zl = z * lam + z - lam;
    if (!(zl > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (z - g) / (lam + 1.0) - rho / ((lam + 1.0) * (lam + 1.0)) * std::log(zl / rho);
}

// Y2(z): curvature of the exponent along Theta = 0; the transition-layer
// variance scale.
inline double curve_y2(const Model& m, double z) {
    const double lam = m.lambda(), g = m.d.gamma, rho = m.d.rho;
    double zeta = curve_zeta(m);
    double zl = z * lam + z - lam;
    if (!(zl > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    double l1 = lam + 1.0;
    double u = z - g;
    return 2.0 * zeta / (l1 * l1 * l1 * l1) * std::log(zl / rho) -
           u * (2.0 * rho * zeta + 3.0 * l1 * zeta * u + (lam - 1.0) * l1 * l1 * u * u) /
               (zl * zl * l1 * l1 * l1);
}

// Y1(z): where Theta reaches the branch point theta0.
inline double curve_y1(const Model& m, double z) {
    const double g = m.d.gamma, rho = m.d.rho, delta = m.d.delta;
    double gg = g * (1.0 - g);
    double q = g * g - delta * z;
    return gg * gg * rho / (delta * delta) *
           (q / (gg * rho) + std::log(gg * rho / q) - 1.0);
}

// Y*(z): image of the saddle-coalescence point theta*(z).
inline double curve_ystar(const Model& m, double z) {
    double ts = theta_star(m, z);
    double w = std::sqrt(m.lambda() * (1.0 - z) / z);
    double h = fd_step(ts, std::numeric_limits<double>::quiet_NaN(), 1e-4);
    double deta = derivative([&](double t) { return eta_abs(m, w, t, z); }, ts, h);
    return -mu_prime(m, ts) - deta;
}

inline CurveValues curves(const Model& m, double z) {
    if (!(z > 0.0) || !(z <= 1.0)) throw error(errc::domain, "curves: z must be in (0, 1]");
    CurveValues c;
    c.y0 = curve_y0(m, z);
    c.y2 = curve_y2(m, z);
    if (z >= m.d.gamma && z < m.d.gamma * m.d.gamma / m.d.delta) c.y1 = curve_y1(m, z);
    if (in_coalescence_window(m, z)) c.ystar = curve_ystar(m, z);
    return c;
}

struct RootResult {
    double theta = 0.0;
    double residual = 0.0;
    bool near_coalescence = false;
};

namespace detail {

// d/dtheta of the composite exponent mu + eta(W_branch(theta, z), theta, z).
inline double dpsi_dtheta(const Model& m, Branch b, double theta, double z) {
    double lower = in_coalescence_window(m, z) ? theta_star(m, z)
                                               : std::numeric_limits<double>::quiet_NaN();
    double h = fd_step(theta, lower, 1e-3);
    return derivative([&](double t) { return psi_saddle_part(m, b, t, z); }, theta, h);
}

inline double dpsi0_dtheta(const Model& m, double theta) {
    double h = fd_step(theta, m.d.theta0, 1e-3);
    return derivative([&](double t) { return psi0(m, 0.0, t); }, theta, h);
}

// The exponents mu and Psi0 have a log-singular derivative at theta0, so
// the root nearest theta0 can sit exponentially close to it. Shrink the
// guard geometrically until the anchor sign is right; beyond double
// resolution the root saturates at the branch point.
template <class F>
std::pair<double, bool> anchor_near_theta0(F&& f, double theta0, int side) {
    double guard = 1e-6;
    while (guard > 1e-13) {
        double probe = theta0 + side * guard;
        double v = f(probe);
        if (!std::isnan(v) && v < 0.0) return {probe, true};
        guard *= 0.1;
    }
    return {theta0 + side * 1e-13, false};
}

} // namespace detail

// Theta(y, z): minus-branch saddle for (y, z) in R1 (Theta > 0) or R2
// (theta* < Theta < 0, passing smoothly through theta0 at y = Y1).
inline RootResult solve_theta(const Model& m, double y, double z) {
    if (!(z > m.d.gamma) || !(z < 1.0) || !(y > 0.0))
        throw error(errc::out_of_region, "solve_theta: need gamma < z < 1 and y > 0");
    const bool coal = in_coalescence_window(m, z);
    double ystar = coal ? curve_ystar(m, z) : std::numeric_limits<double>::infinity();
    if (coal && y > ystar - 1e-4) {
        if (y < ystar + 1e-4)
            return {theta_star(m, z), 0.0, true};
        throw error(errc::out_of_region, "solve_theta: y > Y*(z), point lies in R3");
    }
    auto f = [&](double t) { return y + detail::dpsi_dtheta(m, Branch::minus, t, z); };
    double root;
    double f_lo = f(-1e-7), f_hi = f(1e-7);
    if (f_lo <= 0.0 && f_hi >= 0.0) {
        // y ~ Y0(z): the root straddles the pole at 0
        root = find_root(f, -1e-7, 1e-7);
    } else if (f_hi < 0.0) {
        // y < Y0(z): Theta > 0, expand upwards until f changes sign
        double hi = 1.0;
        while (f(hi) < 0.0 && hi < 1e6) hi *= 2.0;
        if (f(hi) < 0.0) throw error(errc::no_convergence, "solve_theta: no bracket above 0");
        root = find_root(f, 1e-7, hi);
    } else {
        double floor_theta = coal ? theta_star(m, z) + 1e-9 : -1e8;
        auto br = expand_bracket_down(f, -1e-7, 0.05, floor_theta);
        if (!br) throw error(errc::no_convergence, "solve_theta: no bracket below 0");
        root = find_root(f, br->first, br->second);
    }
    return {root, f(root), false};
}

// Theta+(y, z): plus-branch saddle for (y, z) in R3. For z in the
// coalescence window the root lies in (theta*, 0); for z <= gamma it lies
// below theta0 (y = 0 admissible there).
inline RootResult solve_theta_plus(const Model& m, double y, double z) {
    if (!(y >= 0.0)) throw error(errc::out_of_region, "solve_theta_plus: y >= 0 required");
    auto f = [&](double t) { return y + detail::dpsi_dtheta(m, Branch::plus, t, z); };
    double root;
    if (in_coalescence_window(m, z)) {
        double ys = curve_ystar(m, z);
        if (y < ys - 1e-4) throw error(errc::out_of_region, "solve_theta_plus: y < Y*(z)");
        if (y < ys + 1e-4) return {theta_star(m, z), 0.0, true};
        root = find_root(f, theta_star(m, z) + 1e-9, -1e-12);
    } else if (z <= m.d.gamma && z > 0.0) {
        // rightmost root below theta0: f -> -inf at theta0-, scan left for f > 0
        auto [anchor, ok] = detail::anchor_near_theta0(f, m.d.theta0, -1);
        if (!ok) return {anchor, f(anchor), false};  // root saturates at the branch point
        auto br = expand_bracket_down(f, anchor, 0.1, -1e6);
        if (!br) throw error(errc::no_convergence, "solve_theta_plus: no bracket below theta0");
        root = find_root(f, br->first, br->second);
    } else {
        throw error(errc::out_of_region, "solve_theta_plus: z outside R3");
    }
    return {root, f(root), false};
}

// Theta0(y): Region-III saddle, the rightmost stationary point of Psi0
// below theta0.
inline RootResult solve_theta0(const Model& m, double y) {
    auto f = [&](double t) { return y + detail::dpsi0_dtheta(m, t); };
    auto [anchor, ok] = detail::anchor_near_theta0(f, m.d.theta0, -1);
    if (!ok) return {anchor, f(anchor), false};
    auto br = expand_bracket_down(f, anchor, 0.1, -1e6);
    if (!br) throw error(errc::no_convergence, "solve_theta0: no bracket below theta0");
    double root = find_root(f, br->first, br->second);
    return {root, f(root), false};
}

// Theta1(y): z = 1 boundary saddle, y + mu'(Theta1) = 0, Theta1 > theta0.
inline RootResult solve_theta1(const Model& m, double y) {
    if (!(y > 0.0)) throw error(errc::domain, "solve_theta1: y > 0 required");
    auto f = [&](double t) { return y + mu_prime(m, t); };
    auto [lo, ok] = detail::anchor_near_theta0(f, m.d.theta0, +1);
    if (!ok) return {lo, f(lo), false};  // huge y: Theta1 saturates at theta0+
    double hi = 1.0;
    while (f(hi) < 0.0 && hi < 1e8) hi *= 2.0;
    double root = find_root(f, lo, hi);
    return {root, f(root), false};
}

enum class RegionTag { R1, R2, R3, I, II, III, IV, V, VI, VII, VIII };

inline const char* region_name(RegionTag t) {
    switch (t) {
        case RegionTag::R1: return "R1";
        case RegionTag::R2: return "R2";
        case RegionTag::R3: return "R3";
        case RegionTag::I: return "I";
        case RegionTag::II: return "II";
        case RegionTag::III: return "III";
        case RegionTag::IV: return "IV";
        case RegionTag::V: return "V";
        case RegionTag::VI: return "VI";
        case RegionTag::VII: return "VII";
        case RegionTag::VIII: return "VIII";
    }
    return "?";
}

struct RegionVerdict {
    RegionTag tag = RegionTag::R1;
    std::optional<double> saddle_value;
    double distance_to_boundary = 0.0;
};

// Layer widths; the paper fixes the scalings (O(N^-1/2) transition layer,
// O(1/N) strips) but not the constants.
struct ClassifyConfig {
    double transition_mult = 3.0;  // Region II half-width in units of sqrt(Y2/N)
    double strip_mult = 1.0;       // boundary strips: z < s/N, z > 1 - s/N, y < s/N
    double corner_z_mult = 1.0;    // corner I half-width in z, units of 1/N
    double corner_chi = 2.0;       // corner I / VIII extent in chi = x N
};

inline RegionVerdict classify(const Model& m, double y, double z,
                              ClassifyConfig cfg = {}) {
    if (!(y >= 0.0) || !(z >= 0.0) || !(z <= 1.0))
        throw error(errc::domain, "classify: need y >= 0, 0 <= z <= 1");
    const double N = m.n(), g = m.d.gamma;
    const double strip = cfg.strip_mult / N;
    const double x = y * N, chi = x * N;
    RegionVerdict v;
    auto widthII = [&](double zz) {
        double y2 = curve_y2(m, zz);
        return y2 > 0.0 ? cfg.transition_mult * std::sqrt(y2 / N) : 0.0;
    };
    double dist_corner_z = std::fabs(z - g);

    // corner I at (0, gamma): k - c = O(1), chi = x N = O(1)
    if (dist_corner_z <= cfg.corner_z_mult / N && chi <= cfg.corner_chi) {
        v.tag = RegionTag::I;
        v.distance_to_boundary = std::min(cfg.corner_z_mult / N - dist_corner_z,
                                          (cfg.corner_chi - chi) / (N * N));
        return v;
    }
    // z = 0 boundary strip (k = O(1))
    if (z < strip) {
        v.tag = RegionTag::III;
        v.distance_to_boundary = strip - z;
        return v;
    }
    // z = 1 boundary strips (j = N - k = O(1))
    if (z > 1.0 - strip) {
        double y01 = curve_y0(m, 1.0);
        if (y < strip) {
            // corner VIII at (0, 1): x = O(1)
            v.tag = RegionTag::VIII;
            v.distance_to_boundary = strip - y;
            return v;
        }
        double w = widthII(1.0);
        if (std::fabs(y - y01) <= w) {
            v.tag = RegionTag::V;
            v.distance_to_boundary = w - std::fabs(y - y01);
        } else if (y < y01) {
            v.tag = RegionTag::IV;
            v.distance_to_boundary = y01 - w - y;
        } else {
            v.tag = RegionTag::VI;
            v.distance_to_boundary = y - y01 - w;
        }
        return v;
    }
    // y = 0 boundary strip with z > gamma (x = O(1))
    if (y < strip && z > g) {
        v.tag = RegionTag::VII;
        v.distance_to_boundary = strip - y;
        return v;
    }
    // transition layer around y = Y0(z), gamma < z < 1
    if (z > g) {
        double y0 = curve_y0(m, z);
        double w = widthII(z);
        if (std::fabs(y - y0) <= w) {
            v.tag = RegionTag::II;
            v.distance_to_boundary = w - std::fabs(y - y0);
            return v;
        }
        if (y < y0) {
            v.tag = RegionTag::R1;
            v.distance_to_boundary = y0 - w - y;
            return v;
        }
        // above the transition curve: R2 until the coalescence curve, R3 beyond
        if (in_coalescence_window(m, z)) {
            double ys = curve_ystar(m, z);
            if (y > ys) {
                v.tag = RegionTag::R3;
                v.distance_to_boundary = y - ys;
                return v;
            }
            v.tag = RegionTag::R2;
            v.distance_to_boundary = std::min(ys - y, y - y0 - w);
            return v;
        }
        v.tag = RegionTag::R2;
        v.distance_to_boundary = y - y0 - w;
        return v;
    }
    // z <= gamma interior
    v.tag = RegionTag::R3;
    v.distance_to_boundary = std::min(g - z, z) ;
    return v;
}

} // namespace amsq
