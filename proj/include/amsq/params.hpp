#pragma once

// Model parameters for the on-off fluid buffer: N exponential sources, unit
// on-rate, off->on rate lambda, output channel capacity c (in units of one
// source's rate), plus every derived constant the solvers consume.

#include <cmath>
#include <optional>

#include "amsq/numerics.hpp"

namespace amsq {

struct ModelParams {
    int n = 0;        // number of sources
    double lambda = 0.0;
    double c = 0.0;   // channel capacity, 0 < c < N, non-integer
};

struct DerivedParams {
    double gamma = 0.0;    // c / N
    double rho = 0.0;      // gamma - lambda + lambda*gamma
    double phi = 0.0;      // gamma + lambda - gamma*lambda
    double delta = 0.0;    // (1-gamma)^2 lambda + gamma^2
    double alpha = 0.0;    // fractional part of c
    double beta = 0.0;     // 2 sqrt(lambda gamma (1-gamma))
    double theta0 = 0.0;   // -rho / (gamma (1-gamma)), dominant eigenvalue
    double epsilon = 0.0;  // 1 / N
    int c_floor = 0;
};

struct Validation {
    bool ok = false;
    errc code = errc::ok;
    const char* detail = "";
};

inline Validation validate(const ModelParams& p) {
    if (p.n < 1 || !(p.lambda > 0.0) || !(p.c > 0.0) || !(p.c < p.n))
        return {false, errc::out_of_range, "need N >= 1, lambda > 0, 0 < c < N"};
    double gamma = p.c / p.n;
    if (!(p.lambda / (p.lambda + 1.0) < gamma))
        return {false, errc::unstable, "stability requires lambda/(lambda+1) < c/N"};
    double nearest = std::round(p.c);
    if (std::fabs(p.c - nearest) <= 1e-12 * std::max(1.0, std::fabs(p.c)))
        return {false, errc::integer_c, "c must not be an integer"};
    return {true, errc::ok, ""};
}

inline DerivedParams derive_params(const ModelParams& p) {
    DerivedParams d;
    d.gamma = p.c / p.n;
    d.rho = d.gamma - p.lambda + p.lambda * d.gamma;
    d.phi = d.gamma + p.lambda - d.gamma * p.lambda;
    d.delta = (1.0 - d.gamma) * (1.0 - d.gamma) * p.lambda + d.gamma * d.gamma;
    d.c_floor = int(std::floor(p.c));
    d.alpha = p.c - d.c_floor;
    d.beta = 2.0 * std::sqrt(p.lambda * d.gamma * (1.0 - d.gamma));
    d.theta0 = -d.rho / (d.gamma * (1.0 - d.gamma));
    d.epsilon = 1.0 / p.n;
    return d;
}

// Validated parameter bundle; everything downstream takes one of these.
struct Model {
    ModelParams p;
    DerivedParams d;

    int n() const { return p.n; }
    double lambda() const { return p.lambda; }
    double c() const { return p.c; }
    // number of negative eigenvalues, N - floor(c)
    int spectrum_size() const { return p.n - d.c_floor; }
};

inline Model make_model(const ModelParams& p) {
    Validation v = validate(p);
    if (!v.ok) throw error(v.code, v.detail);
    return Model{p, derive_params(p)};
}

inline Model make_model(int n, double lambda, double c) {
    return make_model(ModelParams{n, lambda, c});
}

inline Model make_model_gamma(int n, double lambda, double gamma) {
    return make_model(ModelParams{n, lambda, gamma * n});
}

} // namespace amsq
