#pragma once

#include <cmath>

#include "amsq/params.hpp"

namespace testutil {

// reference parameter set used throughout the numerical studies
inline amsq::Model paper_model(int n = 20) {
    return amsq::make_model_gamma(n, 0.0122448, 0.37987897);
}

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::fabs(want);
}

} // namespace testutil
