#pragma once

#include <cmath>
#include <numbers>

#include "fracvar/kernel.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

// Caputo-Fabrizio kernel: beta = gamma = 1, psi(t) = t, M = 1.
inline fracvar::KernelSpec cf_spec(double alpha, double a = 0.0, double b = 1.0) {
    return {1.0, 1.0, fracvar::OrderFunction::constant(alpha), fracvar::WarpFunction::identity(),
            fracvar::NormalizationFunction::unit(), a, b};
}

inline fracvar::KernelSpec ml_spec(double alpha, double gamma, double beta,
                                   fracvar::WarpFunction warp = fracvar::WarpFunction::identity(),
                                   double a = 0.0, double b = 1.0) {
    return {gamma, beta, fracvar::OrderFunction::constant(alpha), std::move(warp),
            fracvar::NormalizationFunction::unit(), a, b};
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace testing
