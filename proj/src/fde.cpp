#include "fracvar/fde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fracvar/errors.hpp"
#include "fracvar/operators.hpp"
#include "fracvar/parallel.hpp"

namespace fracvar {

std::string_view to_string(Formulation f) noexcept {
    switch (f) {
        case Formulation::collocation: return "collocation";
        case Formulation::initial_layer_corrected: return "initial_layer_corrected";
    }
    return "?";
}

std::string_view to_string(ComparisonStatus s) noexcept {
    switch (s) {
        case ComparisonStatus::pass: return "PASS";
        case ComparisonStatus::violation: return "VIOLATION";
        case ComparisonStatus::not_applicable: return "NOT-APPLICABLE";
    }
    return "?";
}

void FdeProblem::validate() const {
    if (grid_n < kMinFdeGrid) {
        fail(ErrorKind::InvalidParam,
             "FDE grid needs n >= " + std::to_string(kMinFdeGrid) + ", got " + std::to_string(grid_n));
    }
    if (!rhs) fail(ErrorKind::InvalidParam, "FDE right-hand side is empty");
    if (!std::isfinite(initial)) fail(ErrorKind::InvalidParam, "initial value must be finite");
    constexpr int kProbe = 16;
    for (int k = 0; k <= kProbe; ++k) {
        const double t = spec.a() + (spec.b() - spec.a()) * k / kProbe;
        if (!std::isfinite(rhs(t, initial))) {
            fail(ErrorKind::InvalidParam, "right-hand side is not finite at t = " + std::to_string(t));
        }
    }
}

namespace {

// Right-hand side addressed by node index, so tabulated h(t) plugs in directly.
struct NodeRhs {
    std::function<double(std::size_t, double)> f;
    std::function<double(std::size_t, double)> dfdu;  // may be empty
};

struct Marched {
    std::vector<double> u;
    std::vector<int> iters;
    std::vector<double> correction;  // subtracted from f at each node
};

std::vector<double> grid_nodes(double a, double b, std::size_t n) {
    const GridFunction probe(a, b, std::vector<double>(n + 1, 0.0));
    std::vector<double> t(n + 1);
    for (std::size_t i = 0; i <= n; ++i) t[i] = probe.node(i);
    return t;
}

double rhs_slope(const NodeRhs& rhs, std::size_t i, double x) {
    if (rhs.dfdu) return rhs.dfdu(i, x);
    const double d = 1e-6 * std::max(1.0, std::abs(x));
    return (rhs.f(i, x + d) - rhs.f(i, x - d)) / (2.0 * d);
}

// Scalar root of g(x) = P (S + w (x - u_prev)) - (f(t_i, x) - corr).
class StepEquation {
public:
    StepEquation(const NodeRhs& rhs, std::size_t i, double p, double s, double w, double u_prev,
                 double corr)
        : rhs_(rhs), i_(i), p_(p), s_(s), w_(w), u_prev_(u_prev), corr_(corr) {}

    [[nodiscard]] double value(double x) const {
        return p_ * (s_ + w_ * (x - u_prev_)) - (rhs_.f(i_, x) - corr_);
    }
    [[nodiscard]] double slope(double x) const { return p_ * w_ - rhs_slope(rhs_, i_, x); }
    [[nodiscard]] double scale(double x) const {
        return std::max({1.0, std::abs(rhs_.f(i_, x) - corr_), std::abs(p_ * s_)});
    }

private:
    const NodeRhs& rhs_;
    std::size_t i_;
    double p_, s_, w_, u_prev_, corr_;
};

std::optional<double> try_value(const StepEquation& eq, double x) {
    try {
        const double g = eq.value(x);
        if (std::isfinite(g)) return g;
    } catch (const Error&) {
    }
    return std::nullopt;
}

double solve_step(const StepEquation& eq, std::size_t node, double u_prev, double x0, double tol,
                  int& iters) {
    // Newton first.
    double x = x0;
    for (int k = 0; k < kMaxNewtonIters; ++k) {
        ++iters;
        const auto g = try_value(eq, x);
        if (!g) break;
        if (std::abs(*g) <= 0.1 * tol * eq.scale(x)) return x;
        double d = 0.0;
        try {
            d = eq.slope(x);
        } catch (const Error&) {
            break;
        }
        if (!std::isfinite(d) || d == 0.0) break;
        const double next = x - *g / d;
        if (!std::isfinite(next)) break;
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            const auto gn = try_value(eq, next);
            if (gn && std::abs(*gn) <= tol * eq.scale(next)) return next;
            break;
        }
        x = next;
    }

    // Bisection on a bracket grown geometrically around the previous value.
    const auto g0 = try_value(eq, u_prev);
    if (!g0) {
        fail(ErrorKind::NewtonDivergence,
             "step equation undefined at the previous value, node " + std::to_string(node), node);
    }
    if (*g0 == 0.0) return u_prev;
    double lo = u_prev, hi = u_prev;
    double glo = *g0;
    bool bracketed = false;
    double step = 1e-2 * std::max(1.0, std::abs(u_prev));
    for (int k = 0; k < 200 && !bracketed; ++k, step *= 2.0) {
        ++iters;
        if (const auto gl = try_value(eq, u_prev - step); gl && (*gl < 0.0) != (*g0 < 0.0)) {
            lo = u_prev - step;
            glo = *gl;
            hi = u_prev;
            bracketed = true;
        } else if (const auto gh = try_value(eq, u_prev + step); gh && (*gh < 0.0) != (*g0 < 0.0)) {
            lo = u_prev;
            glo = *g0;
            hi = u_prev + step;
            bracketed = true;
        }
    }
    if (!bracketed) {
        fail(ErrorKind::NewtonDivergence, "no sign change found at node " + std::to_string(node),
             node);
    }
    for (int k = 0; k < 400; ++k) {
        ++iters;
        const double mid = 0.5 * (lo + hi);
        const auto gm = try_value(eq, mid);
        if (!gm) break;
        if (std::abs(*gm) <= 0.1 * tol * eq.scale(mid)) return mid;
        if ((*gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = *gm;
        } else {
            hi = mid;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mid)) {
            if (std::abs(*gm) <= tol * eq.scale(mid)) return mid;
            break;
        }
    }
    fail(ErrorKind::NewtonDivergence, "step equation did not converge at node " + std::to_string(node),
         node);
}

Marched march(const KernelSpec& spec, std::size_t n, double u0, const NodeRhs& rhs,
              const SolveOptions& opts) {
    const std::vector<double> t = grid_nodes(spec.a(), spec.b(), n);
    std::vector<double> psi(n + 1);
    for (std::size_t j = 0; j <= n; ++j) psi[j] = spec.warp()(t[j]);

    Marched out{std::vector<double>(n + 1, u0), std::vector<int>(n + 1, 0),
                std::vector<double>(n + 1, 0.0)};
    const double f_a = rhs.f(0, u0);
    std::mt19937_64 rng(opts.perturb_seed.value_or(0));
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    std::vector<double> row_h(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        const KernelRow row(spec, t[i]);
        for (std::size_t j = 0; j < i; ++j) row_h[j] = row.from_psi(psi[j]);
        row_h[i] = 1.0;
        double memory = 0.0;
        if (opts.reverse_memory) {
            for (std::size_t j = i - 1; j >= 1; --j) {
                memory += 0.5 * (row_h[j - 1] + row_h[j]) * (out.u[j] - out.u[j - 1]);
            }
        } else {
            for (std::size_t j = 1; j < i; ++j) {
                memory += 0.5 * (row_h[j - 1] + row_h[j]) * (out.u[j] - out.u[j - 1]);
            }
        }
        const double w = 0.5 * (row_h[i - 1] + 1.0);
        const double corr =
            opts.formulation == Formulation::initial_layer_corrected ? row_h[0] * f_a : 0.0;
        out.correction[i] = corr;
        const double u_prev = out.u[i - 1];
        double x0 = u_prev;
        if (opts.perturb_seed) {
            x0 += opts.perturb_scale * std::max(1.0, std::abs(u_prev)) * jitter(rng);
        }
        const StepEquation eq(rhs, i, row.prefactor(), memory, w, u_prev, corr);
        out.u[i] = solve_step(eq, i, u_prev, x0, opts.tol, out.iters[i]);
    }
    if (opts.formulation == Formulation::initial_layer_corrected) out.correction[0] = f_a;
    return out;
}

struct Certificate {
    double norm = 0.0;
    double tol = 0.0;
};

// Applies the Caputo operator to the returned samples and compares with the
// right-hand side the marching scheme was asked to match.
Certificate certify(const KernelSpec& spec, const GridFunction& u, const NodeRhs& rhs,
                    const std::vector<double>& correction, Formulation form, double tol) {
    OperatorOptions opts;
    opts.error_budget = std::numeric_limits<double>::infinity();
    const OperatorResult d = caputo_deriv_ns(spec, u, opts);
    Certificate c;
    double scale = 1.0;
    const std::size_t first = form == Formulation::initial_layer_corrected ? 0 : 1;
    for (std::size_t i = first; i <= u.n(); ++i) {
        const double target = rhs.f(i, u[i]) - correction[i];
        scale = std::max(scale, std::abs(target));
        c.norm = std::max(c.norm, std::abs(d[i] - target));
    }
    c.tol = 10.0 * tol * scale;
    return c;
}

NodeRhs node_rhs(const FdeProblem& p, const std::vector<double>& t) {
    NodeRhs r;
    r.f = [&p, &t](std::size_t i, double x) { return p.rhs(t[i], x); };
    if (p.rhs_du) r.dfdu = [&p, &t](std::size_t i, double x) { return p.rhs_du(t[i], x); };
    return r;
}

NodeRhs linear_rhs(const LinearBound& bound) {
    NodeRhs r;
    r.f = [&bound](std::size_t i, double x) { return bound.lambda * x + bound.h[i]; };
    r.dfdu = [&bound](std::size_t, double) { return bound.lambda; };
    return r;
}

SolveReport solve_nodes(const FdeProblem& p, const NodeRhs& rhs, const SolveOptions& opts) {
    Marched m = march(p.spec, p.grid_n, p.initial, rhs, opts);
    SolveReport report{.solution = GridFunction(p.spec.a(), p.spec.b(), m.u),
                       .newton_iters = std::move(m.iters),
                       .bound_check = std::nullopt};
    report.formulation = opts.formulation;
    report.compatibility_defect = std::abs(rhs.f(0, p.initial));
    const Certificate c =
        certify(p.spec, report.solution, rhs, m.correction, opts.formulation, opts.tol);
    report.residual_norm = c.norm;
    report.residual_tol = c.tol;
    report.residual_certified = c.norm <= c.tol;
    return report;
}

void require_same_grid(const FdeProblem& p, const GridFunction& g, const char* what) {
    const double slack = 1e-12 * (p.spec.b() - p.spec.a());
    if (g.n() != p.grid_n || std::abs(g.a() - p.spec.a()) > slack ||
        std::abs(g.b() - p.spec.b()) > slack) {
        fail(ErrorKind::InvalidParam, std::string(what) + " is not sampled on the problem grid");
    }
}

}  // namespace

SolveReport solve_fde(const FdeProblem& problem, const SolveOptions& opts) {
    problem.validate();
    const std::vector<double> t = grid_nodes(problem.spec.a(), problem.spec.b(), problem.grid_n);
    return solve_nodes(problem, node_rhs(problem, t), opts);
}

ComparisonReport check_comparison(const KernelSpec& spec, const GridFunction& u,
                                  const GridFunction& q, double tol) {
    if (!same_grid(u, q)) fail(ErrorKind::InvalidParam, "u and q must share a grid");
    for (std::size_t i = 0; i <= q.n(); ++i) {
        if (q[i] < 0.0) {
            fail(ErrorKind::HypothesisViolation,
                 "q is negative at node " + std::to_string(i), i);
        }
    }
    if (q[0] == 0.0) fail(ErrorKind::HypothesisViolation, "q(a) must be nonzero", 0);

    ComparisonReport r;
    r.tol = tol >= 0.0 ? tol : kBoundSlack * std::max(1.0, u.max_abs());
    OperatorOptions opts;
    opts.error_budget = std::numeric_limits<double>::infinity();
    const OperatorResult d = caputo_deriv_ns(spec, u, opts);
    r.max_q = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i <= u.n(); ++i) r.max_q = std::max(r.max_q, d[i] + q[i] * u[i]);
    r.max_u = *std::max_element(u.values().begin(), u.values().end());
    if (r.max_q > r.tol) {
        r.status = ComparisonStatus::not_applicable;
        return r;
    }
    for (std::size_t i = 0; i <= u.n(); ++i) {
        if (u[i] > r.tol) {
            r.status = ComparisonStatus::violation;
            r.offending_node = i;
            return r;
        }
    }
    return r;
}

UniquenessReport uniqueness_probe(const FdeProblem& problem, std::size_t perturbations,
                                  std::uint64_t seed, Formulation formulation) {
    problem.validate();
    const std::vector<double> t = grid_nodes(problem.spec.a(), problem.spec.b(), problem.grid_n);
    const NodeRhs rhs = node_rhs(problem, t);

    SolveOptions base;
    base.formulation = formulation;
    const SolveReport first = solve_nodes(problem, rhs, base);

    // Monotonicity hypothesis sampled over a padded trajectory envelope.
    const auto vals = first.solution.values();
    const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
    const double pad = 0.1 * std::max(1.0, *hi_it - *lo_it);
    const double lo = *lo_it - pad, hi = *hi_it + pad;
    UniquenessReport r;
    r.max_dfdu = -std::numeric_limits<double>::infinity();
    const std::size_t stride = std::max<std::size_t>(1, problem.grid_n / 64);
    constexpr int kLevels = 16;
    for (std::size_t i = 0; i <= problem.grid_n; i += stride) {
        for (int k = 0; k <= kLevels; ++k) {
            const double x = lo + (hi - lo) * k / kLevels;
            r.max_dfdu = std::max(r.max_dfdu, rhs_slope(rhs, i, x));
        }
    }
    const double allowed = problem.rhs_du ? 0.0 : 1e-6;
    if (r.max_dfdu > allowed) {
        fail(ErrorKind::HypothesisViolation,
             "right-hand side increases in u (sampled df/du = " + std::to_string(r.max_dfdu) + ")");
    }

    std::vector<std::vector<double>> runs(perturbations);
    detail::parallel_for(perturbations, [&](std::size_t k) {
        SolveOptions opts = base;
        opts.perturb_seed = seed + k;
        opts.reverse_memory = k % 2 == 1;
        const Marched m = march(problem.spec, problem.grid_n, problem.initial, rhs, opts);
        runs[k] = m.u;
    });
    r.runs = perturbations + 1;
    for (std::size_t i = 0; i <= problem.grid_n; ++i) {
        double mn = vals[i], mx = vals[i];
        for (const auto& run : runs) {
            mn = std::min(mn, run[i]);
            mx = std::max(mx, run[i]);
        }
        r.max_divergence = std::max(r.max_divergence, mx - mn);
    }
    return r;
}

SolveReport sandwich_check(const FdeProblem& problem, const LinearBound& lower,
                           const LinearBound& upper, const SandwichOptions& opts) {
    problem.validate();
    if (!(lower.lambda < 0.0) || !(upper.lambda < 0.0)) {
        fail(ErrorKind::HypothesisViolation, "sandwich bounds need lambda1, lambda2 < 0");
    }
    require_same_grid(problem, lower.h, "lower bound h2");
    require_same_grid(problem, upper.h, "upper bound h1");

    const std::vector<double> t = grid_nodes(problem.spec.a(), problem.spec.b(), problem.grid_n);
    const NodeRhs rhs = node_rhs(problem, t);
    const NodeRhs rhs_upper = linear_rhs(upper);
    const NodeRhs rhs_lower = linear_rhs(lower);
    SolveOptions solve_opts;
    solve_opts.formulation = opts.formulation;

    std::vector<std::optional<SolveReport>> out(3);
    const NodeRhs* which[3] = {&rhs, &rhs_upper, &rhs_lower};
    detail::parallel_for(3, [&](std::size_t k) { out[k] = solve_nodes(problem, *which[k], solve_opts); });

    SolveReport report = std::move(*out[0]);
    const GridFunction& u = report.solution;
    const GridFunction& v1 = out[1]->solution;
    const GridFunction& v2 = out[2]->solution;

    BoundCheck check{.lower = v2, .upper = v1, .first_violation = std::nullopt};
    check.tol = kBoundSlack * std::max(1.0, u.max_abs());
    for (std::size_t i = 0; i <= u.n(); ++i) {
        const double excess = std::max(u[i] - v1[i], v2[i] - u[i]);
        if (excess > check.tol) {
            ++check.violations;
            if (!check.first_violation) check.first_violation = i;
        }
        check.worst_excess = std::max(check.worst_excess, excess);
    }

    // The envelope inequality is sampled for the report only: a false bound
    // should surface as a BoundViolation on the solutions, not be pre-empted.
    double lo = std::min({*std::min_element(u.values().begin(), u.values().end()),
                          *std::min_element(v1.values().begin(), v1.values().end()),
                          *std::min_element(v2.values().begin(), v2.values().end())});
    double hi = std::max({*std::max_element(u.values().begin(), u.values().end()),
                          *std::max_element(v1.values().begin(), v1.values().end()),
                          *std::max_element(v2.values().begin(), v2.values().end())});
    constexpr int kLevels = 16;
    for (std::size_t i = 0; i <= u.n(); ++i) {
        for (int k = 0; k <= kLevels; ++k) {
            const double x = lo + (hi - lo) * k / kLevels;
            const double f = rhs.f(i, x);
            const double slack = 1e-12 * std::max(1.0, std::abs(f));
            if (f > rhs_upper.f(i, x) + slack || f < rhs_lower.f(i, x) - slack) {
                ++check.envelope_failures;
            }
        }
    }

    const std::size_t first = check.first_violation.value_or(0);
    const std::size_t count = check.violations;
    const double worst = check.worst_excess;
    report.bound_check = std::move(check);
    if (opts.strict && count > 0) {
        fail(ErrorKind::BoundViolation,
             std::to_string(count) + " sandwich violations, first at node " + std::to_string(first) +
                 " (worst excess " + std::to_string(worst) + ")",
             first);
    }
    return report;
}

}  // namespace fracvar
