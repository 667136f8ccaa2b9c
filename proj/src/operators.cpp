#include "fracvar/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fracvar/errors.hpp"
#include "fracvar/parallel.hpp"

namespace fracvar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Grid geometry shared by every operator: nodes, warp and its slope at the
/// nodes and at the cell midpoints (cell j spans nodes j-1 and j).
struct GridGeometry {
    std::size_t n = 0;
    double h = 0.0;
    std::vector<double> t, psi, dpsi;
    std::vector<double> mid_t, mid_psi, mid_dpsi;

    GridGeometry(const KernelSpec& spec, const GridFunction& f, bool midpoints) {
        n = f.n();
        h = f.h();
        t.resize(n + 1);
        psi.resize(n + 1);
        dpsi.resize(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            t[j] = f.node(j);
            psi[j] = spec.warp()(t[j]);
            dpsi[j] = spec.warp().derivative(t[j]);
        }
        if (!midpoints) return;
        mid_t.resize(n + 1, kNaN);
        mid_psi.resize(n + 1, kNaN);
        mid_dpsi.resize(n + 1, kNaN);
        for (std::size_t j = 1; j <= n; ++j) {
            mid_t[j] = 0.5 * (t[j - 1] + t[j]);
            mid_psi[j] = spec.warp()(mid_t[j]);
            mid_dpsi[j] = spec.warp().derivative(mid_t[j]);
        }
    }
};

void require_compatible(const KernelSpec& spec, const GridFunction& f) {
    const double slack = 1e-12 * (spec.b() - spec.a());
    if (std::abs(f.a() - spec.a()) > slack || std::abs(f.b() - spec.b()) > slack) {
        fail(ErrorKind::InvalidParam, "grid function interval must match the kernel interval");
    }
}

/// Moments of s^p over one cell s in [B, A], 0 <= B < A, p > -1:
///   i0 = int s^p ds,  i1 = int s^p (A - s) ds.
struct PowerMoments {
    double i0;
    double i1;
};

PowerMoments power_moments(double A, double B, double p) {
    const double q = p + 1.0;
    double i0 = 0.0;
    double i2 = 0.0;
    if (B <= 0.0) {
        i0 = std::pow(A, q) / q;
        i2 = std::pow(A, q + 1.0) / (q + 1.0);
    } else {
        const double log_ratio = std::log1p((B - A) / A);
        i0 = -std::pow(A, q) * std::expm1(q * log_ratio) / q;
        i2 = -std::pow(A, q + 1.0) * std::expm1((q + 1.0) * log_ratio) / (q + 1.0);
    }
    return {i0, A * i0 - i2};
}

OperatorResult make_result(const GridFunction& f, std::vector<double> values, double err,
                           Scheme scheme, std::size_t first_valid = 0) {
    OperatorResult r;
    r.a = f.a();
    r.b = f.b();
    r.values = std::move(values);
    r.quad_error_estimate = err;
    r.scheme = scheme;
    r.first_valid = first_valid;
    return r;
}

void enforce_budget(const std::vector<double>& integral, const std::vector<double>& err,
                    double budget, const char* what) {
    double scale = 1.0;
    double worst = 0.0;
    std::size_t where = 0;
    for (std::size_t i = 0; i < integral.size(); ++i) {
        if (!std::isfinite(integral[i])) {
            fail(ErrorKind::QuadratureFailure,
                 std::string(what) + " produced a non-finite value at node " + std::to_string(i), i);
        }
        scale = std::max(scale, std::abs(integral[i]));
        if (err[i] > worst) {
            worst = err[i];
            where = i;
        }
    }
    if (worst > budget * scale) {
        fail(ErrorKind::QuadratureFailure,
             std::string(what) + " error estimate " + std::to_string(worst) +
                 " exceeds budget at node " + std::to_string(where),
             where);
    }
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

double inv_gamma(double x) { return 1.0 / std::tgamma(x); }

void require_subsingular(double alpha, double t) {
    if (1.0 - alpha < kSingularOrderThreshold) {
        fail(ErrorKind::SingularOrder, "1 - alpha(t) = " + std::to_string(1.0 - alpha) +
                                           " at t = " + std::to_string(t));
    }
}

struct IntegralWithError {
    std::vector<double> value;
    std::vector<double> error;
};

// int_a^{t_i} psi' H f, both schemes per node.
IntegralWithError aux1_kernel(const KernelSpec& spec, const GridFunction& f, Scheme scheme) {
    const GridGeometry g(spec, f, true);
    const auto fv = f.values();
    IntegralWithError out{std::vector<double>(g.n + 1, 0.0), std::vector<double>(g.n + 1, 0.0)};
    detail::parallel_for(g.n + 1, [&](std::size_t i) {
        if (i == 0) return;
        const KernelRow row(spec, g.t[i]);
        double trap = 0.0;
        double mid = 0.0;
        double prev = g.dpsi[0] * row.from_psi(g.psi[0]) * fv[0];
        for (std::size_t j = 1; j <= i; ++j) {
            const double cur = g.dpsi[j] * row.from_psi(g.psi[j]) * fv[j];
            trap += 0.5 * (prev + cur);
            mid += g.mid_dpsi[j] * row.from_psi(g.mid_psi[j]) * 0.5 * (fv[j - 1] + fv[j]);
            prev = cur;
        }
        trap *= g.h;
        mid *= g.h;
        out.value[i] = scheme == Scheme::product_trapezoid ? trap : mid;
        out.error[i] = std::abs(trap - mid);
    });
    return out;
}

// int_a^{t_i} H f', both schemes per node.
IntegralWithError aux2_kernel(const KernelSpec& spec, const GridFunction& f, Scheme scheme) {
    const GridGeometry g(spec, f, true);
    const auto fv = f.values();
    const auto dv = f.derivative();
    const bool analytic = f.has_derivative();
    IntegralWithError out{std::vector<double>(g.n + 1, 0.0), std::vector<double>(g.n + 1, 0.0)};
    detail::parallel_for(g.n + 1, [&](std::size_t i) {
        if (i == 0) return;
        const KernelRow row(spec, g.t[i]);
        double trap = 0.0;
        double mid = 0.0;
        double h_prev = row.from_psi(g.psi[0]);
        for (std::size_t j = 1; j <= i; ++j) {
            const double h_cur = j == i ? 1.0 : row.from_psi(g.psi[j]);
            const double h_mid = row.from_psi(g.mid_psi[j]);
            if (analytic) {
                trap += 0.5 * g.h * (h_prev * dv[j - 1] + h_cur * dv[j]);
                mid += g.h * h_mid * 0.5 * (dv[j - 1] + dv[j]);
            } else {
                const double jump = fv[j] - fv[j - 1];
                trap += 0.5 * (h_prev + h_cur) * jump;
                mid += h_mid * jump;
            }
            h_prev = h_cur;
        }
        out.value[i] = scheme == Scheme::product_trapezoid ? trap : mid;
        out.error[i] = std::abs(trap - mid);
    });
    return out;
}

// int_a^{t_i} psi' (psi_i - psi)^{p} f dtau with data linear in u = psi.
// exponent(i, j) gives p for output node i and cell j.
template <typename Exponent>
IntegralWithError power_kernel(const GridGeometry& g, std::span<const double> data,
                               Scheme scheme, Exponent&& exponent) {
    IntegralWithError out{std::vector<double>(g.n + 1, 0.0), std::vector<double>(g.n + 1, 0.0)};
    detail::parallel_for(g.n + 1, [&](std::size_t i) {
        if (i == 0) return;
        double trap = 0.0;
        double mid = 0.0;
        for (std::size_t j = 1; j <= i; ++j) {
            const double A = g.psi[i] - g.psi[j - 1];
            const double delta = g.psi[j] - g.psi[j - 1];
            const PowerMoments m = power_moments(A, g.psi[i] - g.psi[j], exponent(i, j));
            trap += data[j - 1] * m.i0 + (data[j] - data[j - 1]) / delta * m.i1;
            mid += 0.5 * (data[j - 1] + data[j]) * m.i0;
        }
        out.value[i] = scheme == Scheme::product_trapezoid ? trap : mid;
        out.error[i] = std::abs(trap - mid);
    });
    return out;
}

std::vector<double> order_at_nodes(const KernelSpec& spec, const GridGeometry& g) {
    std::vector<double> alpha(g.n + 1);
    for (std::size_t j = 0; j <= g.n; ++j) alpha[j] = spec.order()(g.t[j]);
    return alpha;
}

}  // namespace

double OperatorResult::node(std::size_t i) const noexcept {
    if (i == n()) return b;
    return a + (b - a) * static_cast<double>(i) / static_cast<double>(n());
}

double OperatorResult::max_abs() const noexcept {
    double m = 0.0;
    for (std::size_t i = first_valid; i < values.size(); ++i) m = std::max(m, std::abs(values[i]));
    return m;
}

GridFunction OperatorResult::grid() const {
    if (first_valid != 0) {
        fail(ErrorKind::InvalidParam, "operator result is undefined at the left endpoint");
    }
    return GridFunction(a, b, values);
}

std::string_view to_string(Scheme s) noexcept {
    return s == Scheme::product_trapezoid ? "product_trapezoid" : "product_midpoint";
}

std::vector<double> grid_derivative(std::span<const double> v, double h) {
    const std::size_t n = v.size() - 1;
    std::vector<double> d(v.size());
    if (n < 2) fail(ErrorKind::DegenerateGrid, "derivative stencil needs at least 3 nodes");
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for (std::size_t i = 1; i < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
    return d;
}

OperatorResult rl_integral_varorder(const KernelSpec& spec, const GridFunction& f,
                                    const OperatorOptions& opts) {
    require_compatible(spec, f);
    const GridGeometry g(spec, f, opts.exponent_at == ExponentAt::tau);
    const std::vector<double> alpha = order_at_nodes(spec, g);
    std::vector<double> mid_alpha;
    if (opts.exponent_at == ExponentAt::tau) {
        mid_alpha.assign(g.n + 1, kNaN);
        for (std::size_t j = 1; j <= g.n; ++j) mid_alpha[j] = spec.order()(g.mid_t[j]);
    }
    IntegralWithError raw = power_kernel(g, f.values(), opts.scheme, [&](std::size_t i, std::size_t j) {
        return (opts.exponent_at == ExponentAt::t ? alpha[i] : mid_alpha[j]) - 1.0;
    });
    for (std::size_t i = 0; i <= g.n; ++i) {
        const double scale = inv_gamma(alpha[i]);
        raw.value[i] *= scale;
        raw.error[i] *= scale;
    }
    enforce_budget(raw.value, raw.error, opts.error_budget, "fractional integral");
    return make_result(f, std::move(raw.value), max_of(raw.error), opts.scheme);
}

OperatorResult rl_deriv_classical(const KernelSpec& spec, const GridFunction& f,
                                  const OperatorOptions& opts) {
    require_compatible(spec, f);
    if (f.n() < 16) fail(ErrorKind::DegenerateGrid, "classical derivative needs n >= 16");
    const GridGeometry g(spec, f, false);
    const std::vector<double> alpha = order_at_nodes(spec, g);
    for (std::size_t i = 0; i <= g.n; ++i) require_subsingular(alpha[i], g.t[i]);
    IntegralWithError inner = power_kernel(g, f.values(), opts.scheme,
                                           [&](std::size_t i, std::size_t) { return -alpha[i]; });
    enforce_budget(inner.value, inner.error, opts.error_budget, "classical RL inner integral");
    const std::vector<double> slope = grid_derivative(inner.value, g.h);
    std::vector<double> out(g.n + 1, kNaN);
    double factor = 0.0;
    for (std::size_t i = 1; i <= g.n; ++i) {
        const double c = inv_gamma(1.0 - alpha[i]) / g.dpsi[i];
        out[i] = c * slope[i];
        factor = std::max(factor, std::abs(c));
    }
    return make_result(f, std::move(out), factor * max_of(inner.error) / g.h, opts.scheme, 1);
}

OperatorResult caputo_deriv_classical(const KernelSpec& spec, const GridFunction& f,
                                      const OperatorOptions& opts) {
    require_compatible(spec, f);
    const GridGeometry g(spec, f, false);
    const std::vector<double> alpha = order_at_nodes(spec, g);
    for (std::size_t i = 0; i <= g.n; ++i) require_subsingular(alpha[i], g.t[i]);

    std::vector<double> slope;
    if (f.has_derivative()) {
        slope.assign(f.derivative().begin(), f.derivative().end());
    } else if (opts.caputo_form == CaputoForm::as_printed) {
        slope = grid_derivative(f.values(), g.h);
    }

    IntegralWithError raw;
    if (opts.caputo_form == CaputoForm::standard_psi) {
        if (f.has_derivative()) {
            std::vector<double> ratio(g.n + 1);
            for (std::size_t j = 0; j <= g.n; ++j) ratio[j] = slope[j] / g.dpsi[j];
            raw = power_kernel(g, ratio, opts.scheme,
                               [&](std::size_t i, std::size_t) { return -alpha[i]; });
        } else {
            // f piecewise linear in psi: constant slope per cell.
            const auto fv = f.values();
            raw = {std::vector<double>(g.n + 1, 0.0), std::vector<double>(g.n + 1, 0.0)};
            detail::parallel_for(g.n + 1, [&](std::size_t i) {
                double sum = 0.0;
                for (std::size_t j = 1; j <= i; ++j) {
                    const double A = g.psi[i] - g.psi[j - 1];
                    const double delta = g.psi[j] - g.psi[j - 1];
                    sum += (fv[j] - fv[j - 1]) / delta *
                           power_moments(A, g.psi[i] - g.psi[j], -alpha[i]).i0;
                }
                raw.value[i] = sum;
            });
        }
    } else {
        // Integrate in tau: (psi(t)-psi(tau))^{-a} = (t-tau)^{-a} [(psi(t)-psi(tau))/(t-tau)]^{-a}.
        raw = {std::vector<double>(g.n + 1, 0.0), std::vector<double>(g.n + 1, 0.0)};
        detail::parallel_for(g.n + 1, [&](std::size_t i) {
            if (i == 0) return;
            const double a_i = alpha[i];
            auto smooth = [&](std::size_t j) {
                const double secant = j == i ? g.dpsi[i] : (g.psi[i] - g.psi[j]) / (g.t[i] - g.t[j]);
                return std::pow(secant, -a_i) * slope[j];
            };
            double trap = 0.0;
            double mid = 0.0;
            double prev = smooth(0);
            for (std::size_t j = 1; j <= i; ++j) {
                const double cur = smooth(j);
                const double A = g.t[i] - g.t[j - 1];
                const double B = g.t[i] - g.t[j];
                const PowerMoments m = power_moments(A, B, -a_i);
                trap += prev * m.i0 + (cur - prev) / (A - B) * m.i1;
                mid += 0.5 * (prev + cur) * m.i0;
                prev = cur;
            }
            raw.value[i] = opts.scheme == Scheme::product_trapezoid ? trap : mid;
            raw.error[i] = std::abs(trap - mid);
        });
    }
    for (std::size_t i = 0; i <= g.n; ++i) {
        const double scale = inv_gamma(1.0 - alpha[i]);
        raw.value[i] *= scale;
        raw.error[i] *= scale;
    }
    enforce_budget(raw.value, raw.error, opts.error_budget, "classical Caputo derivative");
    return make_result(f, std::move(raw.value), max_of(raw.error), opts.scheme);
}

OperatorResult aux_integral_1(const KernelSpec& spec, const GridFunction& f,
                              const OperatorOptions& opts) {
    require_compatible(spec, f);
    IntegralWithError raw = aux1_kernel(spec, f, opts.scheme);
    enforce_budget(raw.value, raw.error, opts.error_budget, "aux integral 1");
    return make_result(f, std::move(raw.value), max_of(raw.error), opts.scheme);
}

OperatorResult aux_integral_2(const KernelSpec& spec, const GridFunction& f,
                              const OperatorOptions& opts) {
    require_compatible(spec, f);
    IntegralWithError raw = aux2_kernel(spec, f, opts.scheme);
    enforce_budget(raw.value, raw.error, opts.error_budget, "aux integral 2");
    return make_result(f, std::move(raw.value), max_of(raw.error), opts.scheme);
}

OperatorResult rl_deriv_ns(const KernelSpec& spec, const GridFunction& f,
                           const OperatorOptions& opts) {
    OperatorResult inner = aux_integral_1(spec, f, opts);
    const double h = f.h();
    const std::vector<double> slope = grid_derivative(inner.values, h);
    std::vector<double> out(slope.size());
    double factor = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = f.node(i);
        const double c = kernel_prefactor(spec, t) / spec.warp().derivative(t);
        out[i] = c * slope[i];
        factor = std::max(factor, std::abs(c));
    }
    return make_result(f, std::move(out), factor * inner.quad_error_estimate / h, opts.scheme);
}

OperatorResult caputo_deriv_ns(const KernelSpec& spec, const GridFunction& f,
                               const OperatorOptions& opts) {
    OperatorResult inner = aux_integral_2(spec, f, opts);
    double factor = 0.0;
    for (std::size_t i = 0; i < inner.values.size(); ++i) {
        const double c = kernel_prefactor(spec, f.node(i));
        inner.values[i] *= c;
        factor = std::max(factor, c);
    }
    inner.quad_error_estimate *= factor;
    return inner;
}

KernelSpec make_special_case(SpecialCase name, const OrderFunction& alpha,
                             const NormalizationFunction& norm, double a, double b,
                             const SpecialCaseOptions& opts) {
    auto constant_order = [&]() {
        if (!alpha.constant_value()) {
            fail(ErrorKind::InvalidParam,
                 std::string(to_string(name)) + " requires a constant order alpha");
        }
        return *alpha.constant_value();
    };
    const WarpFunction identity = WarpFunction::identity();
    switch (name) {
        case SpecialCase::variable_ml:
            return KernelSpec(1.0, 1.0, alpha, identity, norm, a, b, OrderCoupling::track_order, name);
        case SpecialCase::atangana: {
            const double order = constant_order();
            return KernelSpec(order, order, alpha, identity, norm, a, b, OrderCoupling::fixed, name);
        }
        case SpecialCase::yang_machado:
        case SpecialCase::caputo_fabrizio:
            constant_order();
            return KernelSpec(1.0, 1.0, alpha, identity, norm, a, b, OrderCoupling::fixed, name);
        case SpecialCase::unit_norm_exp:
            constant_order();
            return KernelSpec(1.0, 1.0, alpha, identity, NormalizationFunction::unit(), a, b,
                              OrderCoupling::fixed, name);
        case SpecialCase::log_warp:
            if (!(a > 0.0)) fail(ErrorKind::InvalidParam, "log_warp requires a > 0");
            return KernelSpec(opts.gamma, opts.beta, alpha, WarpFunction::log(), norm, a, b,
                              OrderCoupling::fixed, name);
        case SpecialCase::sin_warp:
            for (std::size_t i = 0; i < kRangeCheckSamples; ++i) {
                const double t = a + (b - a) * static_cast<double>(i) /
                                         static_cast<double>(kRangeCheckSamples - 1);
                if (!(std::cos(t) > 0.0)) {
                    fail(ErrorKind::InvalidParam, "sin_warp requires cos(t) > 0 on [a, b]");
                }
            }
            return KernelSpec(opts.gamma, opts.beta, alpha, WarpFunction::sin(), norm, a, b,
                              OrderCoupling::fixed, name);
        case SpecialCase::general:
            return KernelSpec(opts.gamma, opts.beta, alpha, identity, norm, a, b,
                              OrderCoupling::fixed, name);
    }
    fail(ErrorKind::InvalidParam, "unknown special case");
}

namespace reference {

namespace {
double node_of(const GridFunction& f, std::size_t j) { return f.node(j); }
}  // namespace

OperatorResult aux_integral_1(const KernelSpec& spec, const GridFunction& f, Scheme scheme) {
    const std::size_t n = f.n();
    const double h = f.h();
    const WarpFunction& psi = spec.warp();
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = node_of(f, i);
        double sum = 0.0;
        for (std::size_t j = 1; j <= i; ++j) {
            const double lo = node_of(f, j - 1);
            const double hi = node_of(f, j);
            if (scheme == Scheme::product_trapezoid) {
                sum += 0.5 * h * (psi.derivative(lo) * kernel_eval(spec, t, lo) * f[j - 1] +
                                  psi.derivative(hi) * kernel_eval(spec, t, hi) * f[j]);
            } else {
                const double m = 0.5 * (lo + hi);
                sum += h * psi.derivative(m) * kernel_eval(spec, t, m) * 0.5 * (f[j - 1] + f[j]);
            }
        }
        out[i] = sum;
    }
    return make_result(f, std::move(out), 0.0, scheme);
}

OperatorResult aux_integral_2(const KernelSpec& spec, const GridFunction& f, Scheme scheme) {
    const std::size_t n = f.n();
    const double h = f.h();
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double t = node_of(f, i);
        double sum = 0.0;
        for (std::size_t j = 1; j <= i; ++j) {
            const double lo = node_of(f, j - 1);
            const double hi = node_of(f, j);
            const double mid = 0.5 * (lo + hi);
            if (f.has_derivative()) {
                const auto d = f.derivative();
                sum += scheme == Scheme::product_trapezoid
                           ? 0.5 * h * (kernel_eval(spec, t, lo) * d[j - 1] + kernel_eval(spec, t, hi) * d[j])
                           : h * kernel_eval(spec, t, mid) * 0.5 * (d[j - 1] + d[j]);
            } else {
                const double weight = scheme == Scheme::product_trapezoid
                                          ? 0.5 * (kernel_eval(spec, t, lo) + kernel_eval(spec, t, hi))
                                          : kernel_eval(spec, t, mid);
                sum += weight * (f[j] - f[j - 1]);
            }
        }
        out[i] = sum;
    }
    return make_result(f, std::move(out), 0.0, scheme);
}

OperatorResult rl_integral_varorder(const KernelSpec& spec, const GridFunction& f) {
    const std::size_t n = f.n();
    const WarpFunction& psi = spec.warp();
    std::vector<double> out(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double alpha = spec.order()(node_of(f, i));
        const double U = psi(node_of(f, i));
        double sum = 0.0;
        for (std::size_t j = 1; j <= i; ++j) {
            const double u0 = psi(node_of(f, j - 1));
            const double u1 = psi(node_of(f, j));
            const double A = U - u0;
            const double B = U - u1;
            // Exact moments of (U - u)^{alpha-1} against 1 and (u - u0).
            const double m0 = (std::pow(A, alpha) - std::pow(B, alpha)) / alpha;
            const double m1 = A * m0 - (std::pow(A, alpha + 1.0) - std::pow(B, alpha + 1.0)) / (alpha + 1.0);
            sum += f[j - 1] * m0 + (f[j] - f[j - 1]) / (u1 - u0) * m1;
        }
        out[i] = sum / std::tgamma(alpha);
    }
    return make_result(f, std::move(out), 0.0, Scheme::product_trapezoid);
}

}  // namespace reference

}  // namespace fracvar
