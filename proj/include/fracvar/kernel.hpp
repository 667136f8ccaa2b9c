#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "fracvar/mlf.hpp"

namespace fracvar {

using ScalarFn = std::function<double(double)>;

/// Samples used to spot-check declared ranges and monotonicity.
inline constexpr std::size_t kRangeCheckSamples = 1024;
/// 1 - alpha(t) below this is treated as the integer-order singularity.
inline constexpr double kSingularOrderThreshold = 1e-12;

/// Variable order alpha(t) with user-declared bounds.
class OrderFunction {
public:
    OrderFunction(ScalarFn eval, double declared_min, double declared_max, std::string label = {});

    static OrderFunction constant(double alpha);

    double operator()(double t) const { return eval_(t); }
    [[nodiscard]] double declared_min() const noexcept { return min_; }
    [[nodiscard]] double declared_max() const noexcept { return max_; }
    [[nodiscard]] std::optional<double> constant_value() const noexcept { return constant_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    /// Spot-checks declared_min <= alpha(t) <= declared_max on a uniform grid.
    void verify_on(double a, double b, std::size_t samples = kRangeCheckSamples) const;

private:
    ScalarFn eval_;
    double min_;
    double max_;
    std::optional<double> constant_;
    std::string label_;
};

/// Increasing warp psi together with its derivative.
class WarpFunction {
public:
    WarpFunction(ScalarFn eval, ScalarFn deriv, std::string label = {});

    static WarpFunction identity();
    static WarpFunction log();
    static WarpFunction sin();
    static WarpFunction shifted(double offset);

    double operator()(double t) const { return eval_(t); }
    [[nodiscard]] double derivative(double t) const { return deriv_(t); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] bool is_identity() const noexcept { return identity_; }

    /// Largest |central difference - psi'| over interior samples at step h.
    [[nodiscard]] double derivative_mismatch(double a, double b, double h,
                                             std::size_t samples = 64) const;

    /// Requires psi' > 0 on the samples and psi' consistent with psi to O(h^2).
    void verify_on(double a, double b, std::size_t samples = kRangeCheckSamples) const;

private:
    ScalarFn eval_;
    ScalarFn deriv_;
    std::string label_;
    bool identity_ = false;
};

/// Normalization M(alpha) with M(0) = M(1) = 1.
class NormalizationFunction {
public:
    explicit NormalizationFunction(ScalarFn eval, std::string label = {});

    static NormalizationFunction unit();
    /// M(alpha) = 1 - alpha + alpha^2.
    static NormalizationFunction quadratic();

    double operator()(double alpha) const { return eval_(alpha); }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
    ScalarFn eval_;
    std::string label_;
};

/// How the Mittag-Leffler order and the power gamma relate to alpha(t).
enum class OrderCoupling {
    fixed,           ///< gamma, beta are constants
    track_order,     ///< beta = gamma = alpha(t), re-evaluated per output time
};

enum class SpecialCase {
    general,
    variable_ml,
    atangana,
    yang_machado,
    caputo_fabrizio,
    unit_norm_exp,
    log_warp,
    sin_warp,
};

std::string_view to_string(SpecialCase c) noexcept;
std::optional<SpecialCase> special_case_from_string(std::string_view name) noexcept;

/// Parameters of the non-singular kernel
///   H(t, tau) = E_beta[-alpha(t) (psi(t) - psi(tau))^gamma / (1 - alpha(t))]
/// on a finite interval [a, b]. Validated on construction; immutable afterwards.
class KernelSpec {
public:
    KernelSpec(double gamma, double beta, OrderFunction order, WarpFunction warp,
               NormalizationFunction norm, double a, double b,
               OrderCoupling coupling = OrderCoupling::fixed,
               SpecialCase tag = SpecialCase::general);

    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] const OrderFunction& order() const noexcept { return order_; }
    [[nodiscard]] const WarpFunction& warp() const noexcept { return warp_; }
    [[nodiscard]] const NormalizationFunction& norm() const noexcept { return norm_; }
    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] OrderCoupling coupling() const noexcept { return coupling_; }
    [[nodiscard]] SpecialCase tag() const noexcept { return tag_; }

    /// Power gamma and ML order beta in effect at output time t.
    [[nodiscard]] double gamma_at(double t) const;
    [[nodiscard]] double beta_at(double t) const;

    /// Shared evaluator for the fixed-order case (null when coupled).
    [[nodiscard]] const std::shared_ptr<const MittagLeffler>& ml() const noexcept { return ml_; }

    /// Same spec with beta replaced by gamma.
    [[nodiscard]] KernelSpec with_beta_equal_gamma() const;
    /// Same spec with a different order function.
    [[nodiscard]] KernelSpec with_order(OrderFunction order) const;

private:
    double gamma_;
    double beta_;
    OrderFunction order_;
    WarpFunction warp_;
    NormalizationFunction norm_;
    double a_;
    double b_;
    OrderCoupling coupling_;
    SpecialCase tag_;
    std::shared_ptr<const MittagLeffler> ml_;
};

/// H(t, .) frozen at one output time; evaluates from psi(tau) directly so
/// operator loops can reuse a precomputed psi grid.
class KernelRow {
public:
    KernelRow(const KernelSpec& spec, double t);

    [[nodiscard]] double from_psi(double psi_tau) const;
    [[nodiscard]] double at(double tau) const;

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double prefactor() const noexcept { return prefactor_; }

private:
    const KernelSpec* spec_;
    double alpha_;
    double gamma_;
    double coeff_;
    double psi_t_;
    double prefactor_;
    bool exponential_;
    std::shared_ptr<const MittagLeffler> ml_;
};

/// H(t, tau); requires a <= tau <= t <= b.
double kernel_eval(const KernelSpec& spec, double t, double tau);

/// M(alpha(t)) / (1 - alpha(t)); SingularOrder if 1 - alpha(t) < 1e-12.
double kernel_prefactor(const KernelSpec& spec, double t);

}  // namespace fracvar
