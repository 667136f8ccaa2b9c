#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <vector>

namespace fracvar::quad {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(std::size_t points);

/// Shared 15-point rule used by the adaptive integrator.
const GaussRule& gauss15();

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

template <typename F>
double apply_rule(const GaussRule& rule, F&& f, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

/// Globally adaptive composite Gauss-Legendre quadrature.
///
/// Each panel is scored by comparing the rule on the whole panel against the
/// rule on its two halves; the panel with the largest discrepancy is bisected
/// until the summed discrepancy drops below max(abs_tol, rel_tol * |I|).
template <typename F>
Result integrate(F&& f, double lo, double hi, double rel_tol, double abs_tol = 0.0,
                 std::size_t max_intervals = 4000) {
    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };
    const GaussRule& rule = gauss15();
    auto make_panel = [&](double l, double h, double whole) {
        const double m = 0.5 * (l + h);
        const double left = apply_rule(rule, f, l, m);
        const double right = apply_rule(rule, f, m, h);
        return Panel{l, h, left + right, std::abs(whole - (left + right))};
    };

    std::priority_queue<Panel> panels;
    panels.push(make_panel(lo, hi, apply_rule(rule, f, lo, hi)));
    double total = panels.top().value;
    double error = panels.top().error;

    Result result;
    while (panels.size() < max_intervals) {
        if (error <= std::max(abs_tol, rel_tol * std::abs(total))) {
            result.converged = true;
            break;
        }
        Panel worst = panels.top();
        panels.pop();
        const double m = 0.5 * (worst.lo + worst.hi);
        if (!(m > worst.lo && m < worst.hi)) {
            panels.push(worst);
            break;
        }
        Panel left = make_panel(worst.lo, m, apply_rule(rule, f, worst.lo, m));
        Panel right = make_panel(m, worst.hi, apply_rule(rule, f, m, worst.hi));
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    if (!result.converged) {
        result.converged = error <= std::max(abs_tol, rel_tol * std::abs(total));
    }

    // Re-sum to shed the drift of the running updates.
    double value = 0.0;
    double err = 0.0;
    result.intervals = panels.size();
    while (!panels.empty()) {
        value += panels.top().value;
        err += panels.top().error;
        panels.pop();
    }
    result.value = value;
    result.error = err;
    return result;
}

}  // namespace fracvar::quad
