#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "fracvar/grid.hpp"
#include "fracvar/kernel.hpp"

namespace fracvar {

enum class Scheme {
    product_trapezoid,  ///< kernel at nodes, data piecewise linear
    product_midpoint,   ///< kernel at cell midpoints, data cell-averaged
};

/// Where the variable exponent of the power-law integral is evaluated.
enum class ExponentAt { t, tau };

/// Quadrature route for the classical power-law Caputo derivative. Both
/// compute int_a^t (psi(t) - psi(tau))^{-alpha(t)} f'(tau) dtau.
enum class CaputoForm {
    as_printed,    ///< in tau, singular factor (t - tau)^{-alpha} split off
    standard_psi,  ///< in u = psi(tau), integrand f'/psi' against (U - u)^{-alpha}
};

struct OperatorOptions {
    Scheme scheme = Scheme::product_trapezoid;
    ExponentAt exponent_at = ExponentAt::t;
    CaputoForm caputo_form = CaputoForm::as_printed;
    /// Largest tolerated nodal |trapezoid - midpoint| discrepancy of the
    /// underlying integral, relative to max(1, max |integral|).
    double error_budget = 1e-3;
};

/// Operator output on the input grid. Nodes before first_valid hold NaN
/// (the classical Riemann-Liouville derivative is unbounded at t = a).
struct OperatorResult {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> values;
    double quad_error_estimate = 0.0;
    Scheme scheme = Scheme::product_trapezoid;
    std::size_t first_valid = 0;

    [[nodiscard]] std::size_t n() const noexcept { return values.size() - 1; }
    [[nodiscard]] double node(std::size_t i) const noexcept;
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values[i]; }
    /// Sup-norm over the valid nodes.
    [[nodiscard]] double max_abs() const noexcept;
    /// Converts the valid output into a GridFunction (requires first_valid == 0).
    [[nodiscard]] GridFunction grid() const;
};

std::string_view to_string(Scheme s) noexcept;

/// psi-Riemann-Liouville integral of variable order,
/// (1/Gamma(alpha(t))) int_a^t psi'(tau) (psi(t) - psi(tau))^{alpha - 1} f(tau) dtau.
OperatorResult rl_integral_varorder(const KernelSpec& spec, const GridFunction& f,
                                    const OperatorOptions& opts = {});

/// Classical psi-Riemann-Liouville derivative of variable order.
OperatorResult rl_deriv_classical(const KernelSpec& spec, const GridFunction& f,
                                  const OperatorOptions& opts = {});

/// Classical psi-Caputo derivative of variable order.
OperatorResult caputo_deriv_classical(const KernelSpec& spec, const GridFunction& f,
                                      const OperatorOptions& opts = {});

/// int_a^t psi'(tau) H(t, tau) f(tau) dtau.
OperatorResult aux_integral_1(const KernelSpec& spec, const GridFunction& f,
                              const OperatorOptions& opts = {});

/// int_a^t H(t, tau) f'(tau) dtau. Uses the supplied derivative when present;
/// otherwise f is taken piecewise linear so f' is the cell slope.
OperatorResult aux_integral_2(const KernelSpec& spec, const GridFunction& f,
                              const OperatorOptions& opts = {});

/// Riemann-Liouville-type non-singular derivative:
/// M(alpha)/(1-alpha) (1/psi'(t)) d/dt aux_integral_1.
OperatorResult rl_deriv_ns(const KernelSpec& spec, const GridFunction& f,
                           const OperatorOptions& opts = {});

/// Caputo-type non-singular derivative: M(alpha)/(1-alpha) aux_integral_2.
OperatorResult caputo_deriv_ns(const KernelSpec& spec, const GridFunction& f,
                               const OperatorOptions& opts = {});

/// Second-order derivative of nodal samples: central differences inside,
/// one-sided three-point stencils at both ends.
std::vector<double> grid_derivative(std::span<const double> values, double h);

struct SpecialCaseOptions {
    /// Used by log_warp / sin_warp, which keep the general kernel.
    double gamma = 1.0;
    double beta = 1.0;
};

/// Kernel spec reproducing one of the named special-case operators.
KernelSpec make_special_case(SpecialCase name, const OrderFunction& alpha,
                             const NormalizationFunction& norm, double a, double b,
                             const SpecialCaseOptions& opts = {});

namespace reference {

// Serial, pair-by-pair implementations through kernel_eval. Kept for
// cross-checking the parallel kernels and for benchmarking.
OperatorResult aux_integral_1(const KernelSpec& spec, const GridFunction& f,
                              Scheme scheme = Scheme::product_trapezoid);
OperatorResult aux_integral_2(const KernelSpec& spec, const GridFunction& f,
                              Scheme scheme = Scheme::product_trapezoid);
OperatorResult rl_integral_varorder(const KernelSpec& spec, const GridFunction& f);

}  // namespace reference

}  // namespace fracvar
