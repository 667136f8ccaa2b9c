#include "fracvar/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracvar/errors.hpp"

namespace fracvar {

GridFunction::GridFunction(double a, double b, std::vector<double> values,
                           std::optional<std::vector<double>> derivs)
    : a_(a), b_(b), values_(std::move(values)), derivs_(std::move(derivs)) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        fail(ErrorKind::InvalidParam, "grid interval must be finite with a < b");
    }
    if (values_.size() < kMinGridIntervals + 1) {
        fail(ErrorKind::DegenerateGrid, "grid needs at least " +
                                            std::to_string(kMinGridIntervals) +
                                            " subintervals, got " +
                                            std::to_string(values_.empty() ? 0 : values_.size() - 1));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            fail(ErrorKind::InvalidParam, "grid value at node " + std::to_string(i) + " is not finite", i);
        }
    }
    if (!derivs_) return;
    if (derivs_->size() != values_.size()) {
        fail(ErrorKind::InvalidParam, "derivative samples must match the value grid");
    }
    for (std::size_t i = 0; i < derivs_->size(); ++i) {
        if (!std::isfinite((*derivs_)[i])) {
            fail(ErrorKind::InvalidParam,
                 "derivative sample at node " + std::to_string(i) + " is not finite", i);
        }
    }
    // Central differences are O(h^2 f'''/6); estimate f''' from the supplied
    // derivative itself and allow a generous multiple of that.
    const double step = h();
    const auto& d = *derivs_;
    double third = 0.0;
    double slope = 0.0;
    for (std::size_t i = 1; i + 1 < d.size(); ++i) {
        third = std::max(third, std::abs(d[i + 1] - 2.0 * d[i] + d[i - 1]) / (step * step));
        slope = std::max(slope, std::abs(d[i]));
    }
    const double allowed = 8.0 * step * step / 6.0 * third + 1e-8 * (1.0 + slope);
    const double mismatch = derivative_mismatch();
    if (mismatch > allowed) {
        fail(ErrorKind::InvalidParam, "supplied derivative disagrees with central differences by " +
                                          std::to_string(mismatch) + " (allowed " +
                                          std::to_string(allowed) + ")");
    }
}

GridFunction GridFunction::sample(double a, double b, std::size_t n,
                                  const std::function<double(double)>& f) {
    std::vector<double> v(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        v[i] = f(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
    }
    return GridFunction(a, b, std::move(v));
}

GridFunction GridFunction::sample(double a, double b, std::size_t n,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& df) {
    std::vector<double> v(n + 1);
    std::vector<double> d(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
        v[i] = f(t);
        d[i] = df(t);
    }
    return GridFunction(a, b, std::move(v), std::move(d));
}

double GridFunction::node(std::size_t i) const noexcept {
    if (i == n()) return b_;
    return a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(n());
}

std::span<const double> GridFunction::derivative() const noexcept {
    if (!derivs_) return {};
    return *derivs_;
}

double GridFunction::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

GridFunction GridFunction::without_derivative() const {
    return GridFunction(a_, b_, values_);
}

double GridFunction::derivative_mismatch() const {
    if (!derivs_) return 0.0;
    const double step = h();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < values_.size(); ++i) {
        const double central = (values_[i + 1] - values_[i - 1]) / (2.0 * step);
        worst = std::max(worst, std::abs(central - (*derivs_)[i]));
    }
    return worst;
}

bool same_grid(const GridFunction& f, const GridFunction& g) noexcept {
    return f.a() == g.a() && f.b() == g.b() && f.n() == g.n();
}

GridFunction combine(double c1, const GridFunction& f, double c2, const GridFunction& g) {
    if (!same_grid(f, g)) fail(ErrorKind::InvalidParam, "cannot combine functions on different grids");
    std::vector<double> v(f.n() + 1);
    for (std::size_t i = 0; i <= f.n(); ++i) v[i] = c1 * f[i] + c2 * g[i];
    if (f.has_derivative() && g.has_derivative()) {
        std::vector<double> d(f.n() + 1);
        for (std::size_t i = 0; i <= f.n(); ++i) {
            d[i] = c1 * f.derivative()[i] + c2 * g.derivative()[i];
        }
        return GridFunction(f.a(), f.b(), std::move(v), std::move(d));
    }
    return GridFunction(f.a(), f.b(), std::move(v));
}

double max_difference(const GridFunction& f, const GridFunction& g) {
    if (!same_grid(f, g)) fail(ErrorKind::InvalidParam, "cannot compare functions on different grids");
    double worst = 0.0;
    for (std::size_t i = 0; i <= f.n(); ++i) worst = std::max(worst, std::abs(f[i] - g[i]));
    return worst;
}

}  // namespace fracvar
