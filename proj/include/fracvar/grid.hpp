#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fracvar {

/// Smallest admissible number of subintervals.
inline constexpr std::size_t kMinGridIntervals = 8;

/// Function sampled on the uniform grid a + i (b - a) / n, i = 0..n, with an
/// optional analytic derivative sampled on the same nodes.
class GridFunction {
public:
    GridFunction(double a, double b, std::vector<double> values,
                 std::optional<std::vector<double>> derivs = std::nullopt);

    static GridFunction sample(double a, double b, std::size_t n,
                               const std::function<double(double)>& f);
    static GridFunction sample(double a, double b, std::size_t n,
                               const std::function<double(double)>& f,
                               const std::function<double(double)>& df);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] std::size_t n() const noexcept { return values_.size() - 1; }
    [[nodiscard]] double h() const noexcept { return (b_ - a_) / static_cast<double>(n()); }
    [[nodiscard]] double node(std::size_t i) const noexcept;

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] bool has_derivative() const noexcept { return derivs_.has_value(); }
    [[nodiscard]] std::span<const double> derivative() const noexcept;

    [[nodiscard]] double max_abs() const noexcept;
    [[nodiscard]] GridFunction without_derivative() const;

    /// Largest |central difference - supplied derivative| over interior nodes.
    [[nodiscard]] double derivative_mismatch() const;

private:
    double a_;
    double b_;
    std::vector<double> values_;
    std::optional<std::vector<double>> derivs_;
};

/// c1 f + c2 g on a shared grid; derivatives are combined when both carry one.
GridFunction combine(double c1, const GridFunction& f, double c2, const GridFunction& g);

/// Sup-norm of f - g over the shared grid.
double max_difference(const GridFunction& f, const GridFunction& g);

bool same_grid(const GridFunction& f, const GridFunction& g) noexcept;

}  // namespace fracvar
