#include "fracvar/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "fracvar/errors.hpp"

namespace fracvar {

namespace {

double sample_point(double a, double b, std::size_t i, std::size_t samples) {
    if (samples <= 1) return a;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(samples - 1);
}

std::string num(double x) { return std::to_string(x); }

}  // namespace

// ---------------------------------------------------------------------------
// OrderFunction

OrderFunction::OrderFunction(ScalarFn eval, double declared_min, double declared_max,
                             std::string label)
    : eval_(std::move(eval)), min_(declared_min), max_(declared_max), label_(std::move(label)) {
    if (!eval_) fail(ErrorKind::InvalidParam, "order function is empty");
    // alpha = 1 is admitted as the closed integer-order endpoint used by the
    // classical power-law operators; the non-singular operators reject it.
    if (!(declared_min > 0.0 && declared_min <= declared_max && declared_max <= 1.0)) {
        fail(ErrorKind::InvalidParam, "order bounds must satisfy 0 < min <= max <= 1, got [" +
                                          num(declared_min) + ", " + num(declared_max) + "]");
    }
}

OrderFunction OrderFunction::constant(double alpha) {
    OrderFunction f([alpha](double) { return alpha; }, alpha, alpha, "const");
    f.constant_ = alpha;
    return f;
}

void OrderFunction::verify_on(double a, double b, std::size_t samples) const {
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = sample_point(a, b, i, samples);
        const double alpha = eval_(t);
        if (!std::isfinite(alpha) || alpha < min_ || alpha > max_) {
            fail(ErrorKind::InvalidParam, "alpha(" + num(t) + ") = " + num(alpha) +
                                              " leaves the declared range [" + num(min_) + ", " +
                                              num(max_) + "]");
        }
    }
}

// ---------------------------------------------------------------------------
// WarpFunction

WarpFunction::WarpFunction(ScalarFn eval, ScalarFn deriv, std::string label)
    : eval_(std::move(eval)), deriv_(std::move(deriv)), label_(std::move(label)) {
    if (!eval_ || !deriv_) fail(ErrorKind::InvalidParam, "warp function or derivative is empty");
}

WarpFunction WarpFunction::identity() {
    WarpFunction w([](double t) { return t; }, [](double) { return 1.0; }, "t");
    w.identity_ = true;
    return w;
}

WarpFunction WarpFunction::log() {
    return {[](double t) { return std::log(t); }, [](double t) { return 1.0 / t; }, "ln(t)"};
}

WarpFunction WarpFunction::sin() {
    return {[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); }, "sin(t)"};
}

WarpFunction WarpFunction::shifted(double offset) {
    return {[offset](double t) { return t + offset; }, [](double) { return 1.0; },
            "t+" + num(offset)};
}

double WarpFunction::derivative_mismatch(double a, double b, double h,
                                         std::size_t samples) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = sample_point(a + h, b - h, i, samples);
        const double fd = (eval_(t + h) - eval_(t - h)) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - deriv_(t)));
    }
    return worst;
}

void WarpFunction::verify_on(double a, double b, std::size_t samples) const {
    double max_slope = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double t = sample_point(a, b, i, samples);
        const double v = eval_(t);
        const double d = deriv_(t);
        if (!std::isfinite(v) || !std::isfinite(d)) {
            fail(ErrorKind::InvalidParam, "warp " + label_ + " is not finite at t = " + num(t));
        }
        if (!(d > 0.0)) {
            fail(ErrorKind::InvalidParam,
                 "warp " + label_ + " must be increasing: psi'(" + num(t) + ") = " + num(d));
        }
        max_slope = std::max(max_slope, d);
    }
    if (identity_) return;
    const double h = 1e-4 * (b - a);
    const double coarse = derivative_mismatch(a, b, h);
    if (coarse <= 1e-5 * (1.0 + max_slope)) return;
    const double fine = derivative_mismatch(a, b, 0.5 * h);
    if (fine * 3.0 > coarse) {
        fail(ErrorKind::InvalidParam,
             "psi' of warp " + label_ + " is inconsistent with psi (finite-difference mismatch " +
                 num(coarse) + ")");
    }
}

// ---------------------------------------------------------------------------
// NormalizationFunction

NormalizationFunction::NormalizationFunction(ScalarFn eval, std::string label)
    : eval_(std::move(eval)), label_(std::move(label)) {
    if (!eval_) fail(ErrorKind::InvalidParam, "normalization function is empty");
    if (eval_(0.0) != 1.0 || eval_(1.0) != 1.0) {
        fail(ErrorKind::InvalidParam, "normalization must satisfy M(0) = M(1) = 1 exactly");
    }
    for (std::size_t i = 0; i < kRangeCheckSamples; ++i) {
        const double alpha = sample_point(0.0, 1.0, i, kRangeCheckSamples);
        const double m = eval_(alpha);
        if (!(m > 0.0) || !std::isfinite(m)) {
            fail(ErrorKind::InvalidParam,
                 "normalization must be positive on [0,1]: M(" + num(alpha) + ") = " + num(m));
        }
    }
}

NormalizationFunction NormalizationFunction::unit() {
    return NormalizationFunction([](double) { return 1.0; }, "1");
}

NormalizationFunction NormalizationFunction::quadratic() {
    return NormalizationFunction([](double alpha) { return 1.0 - alpha + alpha * alpha; },
                                 "1-alpha+alpha^2");
}

// ---------------------------------------------------------------------------
// KernelSpec

namespace {
constexpr std::array<std::pair<SpecialCase, std::string_view>, 8> kCaseNames{{
    {SpecialCase::general, "general"},
    {SpecialCase::variable_ml, "variable_ml"},
    {SpecialCase::atangana, "atangana"},
    {SpecialCase::yang_machado, "yang_machado"},
    {SpecialCase::caputo_fabrizio, "caputo_fabrizio"},
    {SpecialCase::unit_norm_exp, "unit_norm_exp"},
    {SpecialCase::log_warp, "log_warp"},
    {SpecialCase::sin_warp, "sin_warp"},
}};
}  // namespace

std::string_view to_string(SpecialCase c) noexcept {
    for (const auto& [tag, name] : kCaseNames) {
        if (tag == c) return name;
    }
    return "general";
}

std::optional<SpecialCase> special_case_from_string(std::string_view name) noexcept {
    for (const auto& [tag, label] : kCaseNames) {
        if (label == name) return tag;
    }
    return std::nullopt;
}

KernelSpec::KernelSpec(double gamma, double beta, OrderFunction order, WarpFunction warp,
                       NormalizationFunction norm, double a, double b, OrderCoupling coupling,
                       SpecialCase tag)
    : gamma_(gamma),
      beta_(beta),
      order_(std::move(order)),
      warp_(std::move(warp)),
      norm_(std::move(norm)),
      a_(a),
      b_(b),
      coupling_(coupling),
      tag_(tag) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        fail(ErrorKind::InvalidParam, "interval must be finite with a < b");
    }
    if (coupling_ == OrderCoupling::fixed) {
        if (!(gamma > 0.0 && gamma <= 1.0)) {
            fail(ErrorKind::InvalidParam, "gamma must lie in (0, 1], got " + num(gamma));
        }
        if (!(beta > 0.0 && beta <= 1.0)) {
            fail(ErrorKind::InvalidParam, "beta must lie in (0, 1], got " + num(beta));
        }
        ml_ = std::make_shared<const MittagLeffler>(beta_);
    }
    order_.verify_on(a_, b_);
    warp_.verify_on(a_, b_);
}

double KernelSpec::gamma_at(double t) const {
    return coupling_ == OrderCoupling::track_order ? order_(t) : gamma_;
}

double KernelSpec::beta_at(double t) const {
    return coupling_ == OrderCoupling::track_order ? order_(t) : beta_;
}

KernelSpec KernelSpec::with_beta_equal_gamma() const {
    return KernelSpec(gamma_, gamma_, order_, warp_, norm_, a_, b_, coupling_, tag_);
}

KernelSpec KernelSpec::with_order(OrderFunction order) const {
    return KernelSpec(gamma_, beta_, std::move(order), warp_, norm_, a_, b_, coupling_, tag_);
}

// ---------------------------------------------------------------------------
// Kernel evaluation

KernelRow::KernelRow(const KernelSpec& spec, double t)
    : spec_(&spec),
      alpha_(spec.order()(t)),
      gamma_(spec.gamma_at(t)),
      psi_t_(spec.warp()(t)) {
    if (1.0 - alpha_ < kSingularOrderThreshold) {
        fail(ErrorKind::SingularOrder,
             "1 - alpha(t) = " + num(1.0 - alpha_) + " at t = " + num(t));
    }
    coeff_ = alpha_ / (1.0 - alpha_);
    prefactor_ = spec.norm()(alpha_) / (1.0 - alpha_);
    const double beta = spec.beta_at(t);
    exponential_ = beta == 1.0;
    if (!exponential_) {
        ml_ = spec.ml() ? spec.ml() : std::make_shared<const MittagLeffler>(beta);
    }
}

double KernelRow::from_psi(double psi_tau) const {
    const double gap = psi_t_ - psi_tau;
    if (gap <= 0.0) return 1.0;
    const double z = -coeff_ * (gamma_ == 1.0 ? gap : std::pow(gap, gamma_));
    return exponential_ ? std::exp(z) : (*ml_)(z);
}

double KernelRow::at(double tau) const { return from_psi(spec_->warp()(tau)); }

namespace {
void check_pair(const KernelSpec& spec, double t, double tau) {
    const double slack = 1e-12 * (spec.b() - spec.a());
    if (!(tau <= t + slack)) {
        fail(ErrorKind::DomainError, "kernel requires tau <= t (tau = " + num(tau) +
                                         ", t = " + num(t) + ")");
    }
    if (tau < spec.a() - slack || t > spec.b() + slack) {
        fail(ErrorKind::DomainError, "kernel arguments must lie in [a, b]");
    }
}
}  // namespace

double kernel_eval(const KernelSpec& spec, double t, double tau) {
    check_pair(spec, t, tau);
    return KernelRow(spec, t).at(tau);
}

double kernel_prefactor(const KernelSpec& spec, double t) {
    const double alpha = spec.order()(t);
    if (1.0 - alpha < kSingularOrderThreshold) {
        fail(ErrorKind::SingularOrder,
             "1 - alpha(t) = " + num(1.0 - alpha) + " at t = " + num(t));
    }
    return spec.norm()(alpha) / (1.0 - alpha);
}

}  // namespace fracvar
