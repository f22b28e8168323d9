#pragma once

// Conditional and marginal limit laws: the number of on sources given the
// buffer level and the buffer density given the number of on sources.

#include <cmath>
#include <string>
#include <vector>

#include "amsq/approx.hpp"
#include "amsq/spectral.hpp"

namespace amsq {

enum class LawKind { gaussian, exponential, discrete_bessel_mixture, exp_mixture };

inline const char* law_name(LawKind k) {
    switch (k) {
        case LawKind::gaussian: return "GAUSSIAN";
        case LawKind::exponential: return "EXPONENTIAL";
        case LawKind::discrete_bessel_mixture: return "DISCRETE_BESSEL_MIXTURE";
        case LawKind::exp_mixture: return "EXP_MIXTURE";
    }
    return "?";
}

struct ConditionalLaw {
    LawKind kind = LawKind::gaussian;
    double location = 0.0;  // mean for gaussian, 0 for exponential, offset for mixtures
    double scale = 0.0;     // stddev for gaussian, mean for exponential
    // mixture terms: (weight, rate) for exp_mixture over chi = x N,
    // (weight, offset l) for the discrete Bessel mixture over k = floor(c) + l
    std::vector<std::pair<double, double>> mixture_terms;
    double truncated_mass = 0.0;  // weight lost to the finite term window
};

// M1(x) = sum_k f_k(x), the marginal buffer density, by exact spectral
// summation.
template <class R>
inline double mass_M1(const BasicSpectralSolution<R>& s, double x) {
    SignedLogSum<double> sum;
    for (int k = 0; k <= s.model.n(); ++k) {
        auto v = s.density(k, x);
        sum.add(v.log_value);
    }
    return sum.evaluate().value.value();
}

// Flagged Laplace-method approximation to M1 for x = O(N): the k-sum
// localizes at z = gamma where W+ = 1.
inline double mass_M1_approx(const Model& m, double x) {
    const double N = m.n();
    double y = x / N;
    RootResult root = solve_theta_plus(m, y, m.d.gamma);
    double T = root.theta;
    double ptt = detail::psi_tt(m, Branch::plus, y, T, m.d.gamma);
    double Psi = y * T + psi_saddle_part(m, Branch::plus, T, m.d.gamma);
    double lm = -0.5 * std::log(2.0 * M_PI * N) + detail::log_lambda_ratio_n(m) +
                0.5 * std::log(std::fabs(m.d.theta0 / (T - m.d.theta0))) -
                0.5 * std::log(std::fabs(ptt)) + N * Psi;
    return std::exp(lm);
}

// M2(k) = F_k(inf) - F_k(0) = P[Z = k, X > 0].
template <class R>
inline double mass_M2(const BasicSpectralSolution<R>& s, int k) {
    SignedLogSum<double> sum;
    sum.add(stationary_log<double>(s.model, k));
    auto f0 = s.cdf(k, 0.0);
    sum.add(SignedLog::from_log(-f0.log_value.sign, f0.log_value.log_mag));
    return sum.evaluate().value.value();
}

// Law of the number of on sources given buffer content x.
//   x = O(N): Gaussian around c = N gamma with variance N rho / (-Theta+).
//   x = O(1/N): discrete Bessel-weighted mixture over l = k - floor(c).
inline ConditionalLaw sources_given_buffer(const Model& m, double x, int l_window = 60) {
    const double N = m.n();
    ConditionalLaw law;
    if (x * N > 10.0) {  // chi = x N large: bulk regime
        double y = x / N;
        RootResult root = solve_theta_plus(m, y, m.d.gamma);
        law.kind = LawKind::gaussian;
        law.location = N * m.d.gamma;
        law.scale = std::sqrt(N * m.d.rho / (-root.theta));
        return law;
    }
    // small buffer: weights from the ratio of residue series at chi = x N
    law.kind = LawKind::discrete_bessel_mixture;
    law.location = m.d.c_floor;
    law.scale = 1.0;
    double chi = x * N;
    const double g = m.d.gamma;
    std::vector<std::pair<double, double>> terms;
    SignedLogSum<double> norm;
    std::vector<SignedLog> vals;
    for (int l = -l_window; l <= l_window; ++l) {
        if (m.d.c_floor + l < 0 || m.d.c_floor + l > m.n()) continue;
        CornerSeries s = corner_series(m, l, chi, CornerWeight::density);
        SignedLog v = SignedLog::from_log(
            s.sum.sign, s.sum.log_mag + (l - m.d.alpha) * std::log(m.d.beta / (2.0 * g)));
        vals.push_back(v);
        terms.emplace_back(double(l), v.value());
        norm.add(v);
    }
    double total = norm.evaluate().value.value();
    law.mixture_terms.clear();
    for (size_t i = 0; i < terms.size(); ++i)
        law.mixture_terms.emplace_back(terms[i].second / total, terms[i].first);
    double covered = 0.0;
    for (auto& t : law.mixture_terms) covered += t.first;
    law.truncated_mass = 1.0 - covered;
    return law;
}

// Law of the buffer content given k sources on.
//   gamma < z <= 1: Gaussian around N Y0(z) with variance N Y2(z).
//   0 <= z < gamma: exponential with mean 1 / (-Theta+(0, z)).
//   k ~ c:          mixture of exponentials in chi with rates phi/(j+1-alpha).
inline ConditionalLaw buffer_given_sources(const Model& m, int k, int j_max = 200) {
    const double N = m.n();
    double z = double(k) / N;
    ConditionalLaw law;
    if (std::fabs(k - m.c()) <= 1.0) {
        // corner mixture over chi = x N
        double l = k - m.d.c_floor;
        const double alpha = m.d.alpha, phi = m.d.phi, rho = m.d.rho, beta = m.d.beta;
        const double g = m.d.gamma, lam = m.lambda();
        law.kind = LawKind::exp_mixture;
        SignedLogSum<double> norm;
        std::vector<std::pair<double, double>> raw;
        for (int j = 0; j < j_max; ++j) {
            double a = j + 1.0 - alpha;
            double bes = bessel_j(int(std::lround(l)) - j - 1, (alpha - 1.0 - j) * beta / phi);
            if (bes == 0.0) continue;
            // weight of rate phi/a exponential, before normalization:
            // (coefficient of e^{-phi chi / a}) * (a / phi), so each term is
            // a probability mass
            double lm = a * (rho - phi) / phi + (j - 1.0) * std::log(a) -
                        std::lgamma(j + 1.0) + a * std::log(2.0 * lam * (1.0 - g) / beta) +
                        std::log(std::fabs(bes)) + std::log(a / phi);
            SignedLog t = SignedLog::from_log(bes > 0 ? 1 : -1, lm);
            norm.add(t);
            raw.emplace_back(t.value(), phi / a);
            if (raw.size() > 3 && std::fabs(t.value()) < 1e-16 * std::fabs(norm.evaluate().value.value()))
                break;
        }
        double total = norm.evaluate().value.value();
        for (auto& [w, rate] : raw) law.mixture_terms.emplace_back(w / total, rate);
        return law;
    }
    if (z > m.d.gamma) {
        law.kind = LawKind::gaussian;
        law.location = N * curve_y0(m, z);
        law.scale = std::sqrt(N * curve_y2(m, z));
        return law;
    }
    RootResult root = solve_theta_plus(m, 0.0, z);
    law.kind = LawKind::exponential;
    law.location = 0.0;
    law.scale = 1.0 / (-root.theta);
    return law;
}

} // namespace amsq
