#pragma once

// Pointwise evaluation of the analytic ingredients of the saddle-point
// asymptotics: branch functions Delta, V, R1, R2; the w-saddles W+-; the
// exponent eta and its closed-form second derivative; the product exponent
// mu; Psi variants; the entropy Phi; the eigenvalue-product asymptotics;
// and theta*(z) where the w-saddles coalesce.
//
// Below theta0 (and at w beyond the branch point 1/R1) the paper's formulas
// take logarithms of negative quantities; the *_abs variants evaluate the
// real amplitude with |.| inside every logarithm, which is the combination
// the saddle-point formulas use. Overall signs are assigned by the region
// semantics in approx.hpp.

#include <cmath>
#include <vector>

#include "amsq/numerics.hpp"
#include "amsq/params.hpp"
#include "amsq/signed_log.hpp"
#include "amsq/spectral.hpp"

namespace amsq {

struct KernelBundle {
    double theta = 0.0;
    double Delta = 0.0;
    double V = 0.0;
    double R1 = 0.0;
    double R2 = 0.0;
};

inline KernelBundle branch_kernel(const Model& m, double theta) {
    const double lam = m.lambda();
    KernelBundle k;
    k.theta = theta;
    k.Delta = std::sqrt((theta + 1.0 - lam) * (theta + 1.0 - lam) + 4.0 * lam);
    k.V = 0.5 * (1.0 + ((2.0 * m.d.gamma - 1.0) * theta - lam - 1.0) / k.Delta);
    k.R1 = (k.Delta + (lam - 1.0 - theta)) / (2.0 * lam);
    k.R2 = (k.Delta - (lam - 1.0 - theta)) / (2.0 * lam);
    return k;
}

// Discriminant of the saddle equation z W^2 + [(gamma-z)theta + z lambda
// - z - lambda] W + (1-z) lambda = 0.
inline double discriminant(const Model& m, double theta, double z) {
    const double lam = m.lambda(), g = m.d.gamma, rho = m.d.rho, phi = m.d.phi;
    double u = z - g;
    return rho * rho + (2.0 * (lam + 1.0) * rho + 2.0 * phi * theta) * u +
           ((lam + 1.0) * (lam + 1.0) + 2.0 * (1.0 - lam) * theta + theta * theta) * u * u;
}

struct WSaddles {
    double w_minus = 0.0;
    double w_plus = 0.0;
    double disc = 0.0;
    bool complex_pair = false;  // disc < 0: no real saddles
};

inline WSaddles saddle_w(const Model& m, double theta, double z) {
    if (z == 0.0) throw error(errc::domain, "saddle_w requires z != 0");
    const double lam = m.lambda(), g = m.d.gamma;
    WSaddles w;
    w.disc = discriminant(m, theta, z);
    if (w.disc < 0.0) {
        w.complex_pair = true;
        w.w_minus = w.w_plus = std::numeric_limits<double>::quiet_NaN();
        return w;
    }
    double s = std::sqrt(w.disc);
    // roots of z W^2 + b W + c with b = (gamma - z) theta + z lambda - z -
    // lambda, c = (1 - z) lambda; the smaller-magnitude root is recovered
    // from the product c/z to avoid cancellation
    double neg_b = (z - g) * theta + z + lam - z * lam;
    double prod = (1.0 - z) * lam / z;
    if (neg_b >= 0.0) {
        w.w_plus = (neg_b + s) / (2.0 * z);
        w.w_minus = w.w_plus != 0.0 ? prod / w.w_plus : 0.0;
    } else {
        w.w_minus = (neg_b - s) / (2.0 * z);
        w.w_plus = w.w_minus != 0.0 ? prod / w.w_minus : 0.0;
    }
    return w;
}

enum class Branch { minus, plus };

inline double w_branch(const WSaddles& w, Branch b) {
    return b == Branch::minus ? w.w_minus : w.w_plus;
}

// eta(w, theta, z) with real logarithms; throws BRANCH outside the domain.
inline double eta(const Model& m, double w, double theta, double z) {
    KernelBundle k = branch_kernel(m, theta);
    double a1 = 1.0 - k.R1 * w, a2 = 1.0 + k.R2 * w;
    if (!(a1 > 0.0) || !(a2 > 0.0) || !(w > 0.0))
        throw error(errc::branch, "eta: nonpositive logarithm argument");
    return k.V * std::log(a1) + (1.0 - k.V) * std::log(a2) - (1.0 - z) * std::log(w);
}

// |.|-convention continuation used by the asymptotic amplitudes.
inline double eta_abs(const Model& m, double w, double theta, double z) {
    KernelBundle k = branch_kernel(m, theta);
    return k.V * std::log(std::fabs(1.0 - k.R1 * w)) +
           (1.0 - k.V) * std::log(std::fabs(1.0 + k.R2 * w)) -
           (1.0 - z) * std::log(std::fabs(w));
}

// Closed-form d^2 eta / dw^2 at a saddle.
inline double eta_ww(const Model& m, Branch branch, double theta, double z) {
    WSaddles ws = saddle_w(m, theta, z);
    if (ws.complex_pair) throw error(errc::complex_saddle, "eta_ww: D < 0");
    if (ws.disc <= 1e-13 * m.d.rho * m.d.rho)
        throw error(errc::singular, "eta_ww: saddle coalescence, D ~ 0");
    const double lam = m.lambda(), g = m.d.gamma;
    double w = w_branch(ws, branch);
    double zl = z * lam + z - lam;
    double A = lam * lam * (z - 1.0) * zl +
               ((-2.0 * lam * lam + lam - g * lam * lam - g) * z * z +
                lam * (4.0 * g * lam + 2.0 * lam - g) * z - 3.0 * g * lam * lam) * theta +
               (z - g) * ((2.0 * g * lam + lam - 2.0 * g) * z - 3.0 * g * lam) * theta * theta -
               g * (z - g) * (z - g) * theta * theta * theta;
    double B = lam * (1.0 - z) * (zl * lam + (2.0 * g * lam + (g - lam - g * lam) * z) * theta +
                                  g * (z - g) * theta * theta);
    double den = w * w * ((theta * g - lam) * w + lam) * ((theta * g - lam) * w + lam);
    return (A * w + B) / den;
}

// mu(theta) from the eigenvalue-product lemma; strict domain theta > theta0.
inline double mu_abs(const Model& m, double theta) {
    const double lam = m.lambda(), g = m.d.gamma, rho = m.d.rho, delta = m.d.delta;
    double gg = g * (1.0 - g);
    double Delta = std::sqrt((theta + 1.0 - lam) * (theta + 1.0 - lam) + 4.0 * lam);
    double X = gg * theta + rho;
    double num = X * (lam - 1.0 - theta + Delta);
    double den = (lam - 1.0 - theta) * rho + (lam + 1.0) * (lam + 1.0) * gg +
                 (1.0 - lam) * gg * theta + Delta * delta;
    return -0.5 * std::log(std::fabs(X)) +
           (theta * (1.0 - 2.0 * g) + lam + 1.0) / (2.0 * Delta) * std::log(std::fabs(num / den));
}

inline double mu(const Model& m, double theta) {
    if (!(theta > m.d.theta0)) throw error(errc::domain, "mu: theta <= theta0 branch point");
    return mu_abs(m, theta);
}

// Finite-difference step that respects the distance to the nearest
// singular point of the composite exponents.
inline double fd_step(double theta, double lower_singularity, double base = 1e-5) {
    double h = base * std::max(1.0, std::fabs(theta) / 4.0);
    if (std::isfinite(lower_singularity))
        h = std::min(h, std::fabs(theta - lower_singularity) / 2.0);
    return std::max(h, 1e-13);
}

inline double mu_prime(const Model& m, double theta) {
    double h = fd_step(theta, m.d.theta0, 1e-3);
    return derivative([&](double t) { return mu_abs(m, t); }, theta, h);
}

inline double mu_second(const Model& m, double theta) {
    double h = fd_step(theta, m.d.theta0, 1e-3);
    return second_derivative([&](double t) { return mu_abs(m, t); }, theta, h);
}

// Psi(y, w, theta, z) = y theta + mu + eta. Strict-log version.
inline double psi(const Model& m, double y, double w, double theta, double z) {
    return y * theta + mu_abs(m, theta) + eta(m, w, theta, z);
}

// Composite exponent mu + eta evaluated at the chosen w-saddle; smooth
// through theta0 (the log singularities of the two pieces cancel).
inline double psi_saddle_part(const Model& m, Branch b, double theta, double z) {
    WSaddles ws = saddle_w(m, theta, z);
    if (ws.complex_pair) throw error(errc::complex_saddle, "psi: D < 0");
    return mu_abs(m, theta) + eta_abs(m, w_branch(ws, b), theta, z);
}

inline double psi_at(const Model& m, Branch b, double y, double theta, double z) {
    return y * theta + psi_saddle_part(m, b, theta, z);
}

// Region-III exponent Psi0(y, theta) = y theta + mu + V ln|R1| + (1-V) ln R2.
inline double psi0(const Model& m, double y, double theta) {
    KernelBundle k = branch_kernel(m, theta);
    return y * theta + mu_abs(m, theta) + k.V * std::log(std::fabs(k.R1)) +
           (1.0 - k.V) * std::log(std::fabs(k.R2));
}

// Binomial entropy exponent: Phi(z) = -z ln z - (1-z) ln(1-z) + z ln lambda
// - ln(lambda + 1); Phi(lambda/(1+lambda)) = 0.
inline double phi_entropy(const Model& m, double z) {
    if (!(z > 0.0) || !(z < 1.0)) throw error(errc::domain, "phi_entropy: z must be in (0,1)");
    const double lam = m.lambda();
    return -z * std::log(z) - (1.0 - z) * std::log(1.0 - z) + z * std::log(lam) -
           std::log(lam + 1.0);
}

// theta*(z): coalescence point of the w-saddles, defined on (gamma,
// gamma^2/delta), always below theta0.
inline double theta_star(const Model& m, double z) {
    const double g = m.d.gamma, lam = m.lambda();
    if (!(z > g) || !(z < g * g / m.d.delta))
        throw error(errc::domain, "theta_star: z outside (gamma, gamma^2/delta)");
    return (lam * (z - 1.0) - z + 2.0 * std::sqrt(z * lam * (1.0 - z))) / (z - g);
}

inline bool in_coalescence_window(const Model& m, double z) {
    return z > m.d.gamma && z < m.d.gamma * m.d.gamma / m.d.delta;
}

// Exact eigenvalue product P(theta) = prod_j theta_j / (theta_j - theta).
inline SignedLog product_exact(const Model& m, double theta) {
    auto th = eigenvalues<double>(m);
    int sign = 1;
    double lm = 0.0;
    for (double t : th) {
        double diff = t - theta;
        if (std::fabs(diff) < 1e-12 * std::fabs(t))
            throw error(errc::pole, "product_exact: theta collides with an eigenvalue");
        sign *= (t < 0 ? -1 : 1) * (diff < 0 ? -1 : 1);
        lm += std::log(std::fabs(t)) - std::log(std::fabs(diff));
    }
    return SignedLog::from_log(sign, lm);
}

// P-tilde(theta; N) = sqrt(-theta0/(theta - theta0)) exp(N mu(theta)),
// valid for fixed theta > theta0.
inline double product_fixed(const Model& m, double theta) {
    if (!(theta > m.d.theta0)) throw error(errc::domain, "product_fixed: theta <= theta0");
    return std::sqrt(-m.d.theta0 / (theta - m.d.theta0)) * std::exp(m.n() * mu(m, theta));
}

// P-hat(S; N) for the corner scale theta = S N, S > 0.
inline SignedLog product_scaled(const Model& m, double S) {
    if (!(S > 0.0)) throw error(errc::domain, "product_scaled: S must be positive");
    const double g = m.d.gamma, rho = m.d.rho, phi = m.d.phi, alpha = m.d.alpha;
    const double N = m.n();
    double lm = -0.5 * std::log(2.0 * M_PI * N) + 0.5 * (std::log(rho) - std::log(phi * g * (1.0 - g))) +
                alpha * std::log(phi / S) - N * (1.0 - g) * std::log((1.0 - g) * S * N) -
                N * g * std::log(g) + std::lgamma(phi / S + 1.0 - alpha) +
                phi / S * std::log(g / (phi * (1.0 - g) * N)) + (2.0 * phi - rho - 1.0) / S;
    return SignedLog::from_log(1, lm);
}

} // namespace amsq
