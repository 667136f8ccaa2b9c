// One line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fracvar/analysis.hpp"
#include "fracvar/errors.hpp"
#include "fracvar/expr.hpp"
#include "fracvar/fde.hpp"
#include "fracvar/mlf.hpp"
#include "fracvar/operators.hpp"

using namespace fracvar;

namespace {

constexpr double kMlAgree = 1e-8;
constexpr double kMlSeconds = 5.0;
constexpr double kKernelLimit = 1e-4;
constexpr double kOperatorLimit = 1e-3;
constexpr double kCfClosedForm = 1e-5;
constexpr double kCfRefineRatio = 3.0;
constexpr double kBoundedRel = 1e-9;
constexpr double kInterchangeRound = 1e-13;
constexpr double kInterchangeFinal = 1e-9;
constexpr double kMaxPoint = 1e-6;
constexpr double kVanishGrowth = 2.0;
constexpr double kFdeOracle = 1e-5;
constexpr double kSandwichTol = 1e-7;
constexpr double kDegenerate = 1e-9;
constexpr double kUniqueness = 1e-8;
constexpr double kExprRel = 1e-6;
constexpr double kExprSeconds = 1.0;
constexpr std::uint64_t kSeed = 42;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

KernelSpec kernel(double alpha, double gamma, double beta, WarpFunction warp = WarpFunction::identity(),
                  double a = 0.0, double b = 1.0) {
    return {gamma, beta, OrderFunction::constant(alpha), std::move(warp), NormalizationFunction::unit(), a, b};
}

KernelSpec cf(double alpha) { return kernel(alpha, 1.0, 1.0); }

double sup_diff(const OperatorResult& r, const std::function<double(double)>& exact) {
    double e = 0.0;
    for (std::size_t i = r.first_valid; i <= r.n(); ++i) e = std::max(e, std::abs(r[i] - exact(r.node(i))));
    return e;
}

Outcome ml_cross_validation() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double g : {0.3, 0.5, 0.7, 0.9}) {
        for (double t : {0.1, 1.0, 5.0}) {
            worst = std::max(worst, std::abs(ml_eval({g, 1e-12}, -std::pow(t, g)) - ml_eval_spectral(g, t)));
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= kMlAgree && secs < kMlSeconds, fmt("max |series - spectral| = %.2e, %.3f s", worst, secs)};
}

Outcome kernel_small_order() {
    double worst = 0.0;
    const std::size_t n = 512;
    for (const KernelSpec& base : {kernel(1e-6, 1.0, 1.0), kernel(1e-6, 0.7, 0.8)}) {
        for (const KernelSpec& spec : builtin_warp_specs(base)) {
            for (std::size_t i = 0; i <= n; ++i) {
                const double t = spec.a() + (spec.b() - spec.a()) * i / n;
                for (std::size_t j = 0; j <= i; ++j) {
                    const double tau = spec.a() + (spec.b() - spec.a()) * j / n;
                    worst = std::max(worst, std::abs(kernel_eval(spec, t, tau) - 1.0));
                }
            }
        }
    }
    return {worst <= kKernelLimit, fmt("max |H - 1| = %.2e over 3 warps, 2 kernels", worst)};
}

Outcome operator_small_order() {
    const KernelSpec spec = kernel(1e-6, 0.8, 0.9);
    const std::size_t n = 2048;
    double wc = 0.0, wr = 0.0;
    const auto corpus = default_corpus(0.0, 1.0, 20, kSeed);
    for (const auto& tf : corpus) {
        const GridFunction f = tf.sample(0.0, 1.0, n);
        const OperatorResult c = caputo_deriv_ns(spec, f), r = rl_deriv_ns(spec, f);
        wc = std::max(wc, sup_diff(c, [&](double t) { return tf.f(t) - tf.f(0.0); }));
        wr = std::max(wr, sup_diff(r, tf.f));
    }
    return {wc <= kOperatorLimit && wr <= kOperatorLimit,
            fmt("caputo %.2e, rl %.2e over %.0f functions", wc, wr, static_cast<double>(corpus.size()))};
}

Outcome cf_closed_form() {
    const double alpha = 0.5;
    auto exact = [&](double t) { return (1.0 - std::exp(-alpha * t / (1.0 - alpha))) / alpha; };
    auto err = [&](std::size_t n) {
        const GridFunction f = GridFunction::sample(0, 1, n, [](double t) { return t; }, [](double) { return 1.0; });
        return sup_diff(caputo_deriv_ns(cf(alpha), f), exact);
    };
    const double e512 = err(512), e1024 = err(1024);
    return {e1024 <= kCfClosedForm && e512 / e1024 >= kCfRefineRatio,
            fmt("err(1024) = %.2e, err(512)/err(1024) = %.2f", e1024, e512 / e1024)};
}

Outcome boundedness() {
    const KernelSpec spec = cf(0.5);
    const auto fns = random_trig_polynomials(0.0, 1.0, 100, kSeed);
    const double factor = kernel_prefactor(spec, spec.b());
    std::size_t fails = 0, cases = 0;
    double worst = 0.0;
    for (const auto& tf : fns) {
        const GridFunction f = tf.sample(0.0, 1.0, 1024);
        const double bound = factor * f.max_abs();
        for (const OperatorResult& r : {rl_deriv_ns(spec, f), caputo_deriv_ns(spec, f)}) {
            ++cases;
            worst = std::max(worst, r.max_abs() / bound);
            if (r.max_abs() > bound * (1.0 + kBoundedRel)) ++fails;
        }
    }
    std::string other;
    for (const KernelSpec& w : builtin_warp_specs(kernel(0.5, 0.8, 0.8))) {
        if (w.warp().is_identity()) continue;
        SuiteConfig cfg{.spec = w, .test_functions = random_trig_polynomials(w.a(), w.b(), 20, kSeed), .grid_n = 512};
        const SuiteReport r = check_boundedness(cfg);
        other += "; " + w.warp().label() + ": " + std::to_string(r.failures.size()) + "/" + std::to_string(r.cases_run);
    }
    return {fails == 0, std::to_string(fails) + "/" + std::to_string(cases) +
                            " cases exceed the bound, worst norm/bound = " + fmt("%.3f", worst) + other};
}

Outcome interchange() {
    double worst_excess = -INFINITY, final_gap = 0.0;
    for (const KernelSpec& base : {cf(0.5), kernel(0.5, 0.8, 0.9)}) {
        for (const KernelSpec& spec : builtin_warp_specs(base)) {
            const double a = spec.a(), b = spec.b(), span = spec.warp()(b) - spec.warp()(a);
            const std::size_t n = 1024;
            const GridFunction limit = GridFunction::sample(a, b, n, [](double t) { return std::exp(t); });
            const OperatorResult il = aux_integral_1(spec, limit);
            for (std::size_t k = 0; k <= 16; ++k) {
                auto partial = [k](double t) {
                    double s = 0.0, term = 1.0;
                    for (std::size_t j = 0; j <= k; ++j) {
                        s += term;
                        term *= t / static_cast<double>(j + 1);
                    }
                    return s;
                };
                const GridFunction fk = GridFunction::sample(a, b, n, partial);
                const OperatorResult ik = aux_integral_1(spec, fk);
                double gap = 0.0;
                for (std::size_t i = 0; i <= n; ++i) gap = std::max(gap, std::abs(ik[i] - il[i]));
                const double bound = span * max_difference(fk, limit) + kInterchangeRound * std::max(1.0, il.max_abs());
                worst_excess = std::max(worst_excess, gap - bound);
                if (k == 16 && spec.warp().is_identity()) final_gap = std::max(final_gap, gap);
            }
        }
    }
    return {worst_excess <= 0.0 && final_gap < kInterchangeFinal,
            fmt("max(gap - bound) = %.2e, identity-warp gap at k=16 = %.2e", worst_excess, final_gap)};
}

Outcome max_point() {
    std::size_t checked = 0, fails = 0;
    double worst = INFINITY;
    for (const KernelSpec& base : {cf(0.5), kernel(0.5, 0.8, 0.9)}) {
        const KernelSpec spec = base.with_beta_equal_gamma();
        for (const auto& tf : default_corpus(0.0, 1.0, 20, kSeed)) {
            const GridFunction f = tf.sample(0.0, 1.0, 1024).without_derivative();
            const auto v = f.values();
            const std::size_t i0 = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
            if (i0 == 0 || i0 == f.n()) continue;
            ++checked;
            const double t0 = f.node(i0);
            const double d = caputo_deriv_ns(spec, f)[i0];
            const double lower = kernel_prefactor(spec, t0) * kernel_eval(spec, t0, 0.0) * (f[i0] - f[0]);
            worst = std::min(worst, d - lower);
            if (d < lower - kMaxPoint || d < -kMaxPoint) ++fails;
        }
    }
    return {fails == 0 && checked > 0,
            std::to_string(checked) + " interior maxima, min(D f(t0) - lower bound) = " + fmt("%.2e", worst)};
}

Outcome vanish_at_a() {
    const KernelSpec spec = kernel(0.5, 0.8, 0.9);
    bool exact = true;
    double growth = 0.0, largest = 0.0;
    for (const auto& tf : default_corpus(0.0, 1.0, 20, kSeed)) {
        std::vector<double> c;
        for (std::size_t n : {256u, 512u, 1024u}) {
            const GridFunction f = tf.sample(0.0, 1.0, n);
            const OperatorResult d = caputo_deriv_ns(spec, f);
            exact = exact && d[0] == 0.0;
            c.push_back(std::abs(d[1]) / f.h());
        }
        largest = std::max(largest, c.back());
        // Bounded value/h gives a ratio near 1 across n = 256 -> 1024; an O(1)
        // first-node value would give 4.
        if (c.front() > 1e-12) growth = std::max(growth, c.back() / c.front());
    }
    return {exact && growth <= kVanishGrowth, std::string("value at a exactly 0: ") + (exact ? "yes" : "no") +
                                         fmt(", max (value/h at n=1024)/(value/h at n=256) = %.3f, max value/h = %.3f",
                                             growth, largest)};
}

Outcome fde_oracle() {
    const FdeProblem p{cf(0.5), [](double, double u) { return -u; }, {}, 1.0, 1024};
    const SolveReport r = solve_fde(p);
    const double err = std::abs(r.solution.values().back() - std::exp(-1.0 / 3.0));
    return {err <= kFdeOracle && r.residual_certified,
            fmt("|u(1) - e^{-1/3}| = %.2e, residual %.2e (tol %.2e)", err, r.residual_norm, r.residual_tol)};
}

Outcome sandwich() {
    FdeProblem p{cf(0.5), [](double t, double u) { return -u + 0.5 * std::sin(t); }, {}, 0.0, 1024};
    auto c = [&](double v) { return GridFunction::sample(0, 1, p.grid_n, [v](double) { return v; }); };
    const SolveReport r = sandwich_check(p, {-1.0, c(-0.5)}, {-1.0, c(0.5)});
    p.rhs = [](double, double u) { return -u; };
    p.initial = 1.0;
    const SolveReport d = sandwich_check(p, {-1.0, c(0.0)}, {-1.0, c(0.0)});
    const double gap = std::max(max_difference(d.bound_check->lower, d.solution),
                                max_difference(d.bound_check->upper, d.solution));
    return {r.bound_check->violations == 0 && r.bound_check->tol <= kSandwichTol && gap <= kDegenerate,
            fmt("violations %.0f (tol %.1e), degenerate |v - u| = %.2e",
                static_cast<double>(r.bound_check->violations), r.bound_check->tol, gap)};
}

Outcome uniqueness() {
    const FdeProblem p{cf(0.5), [](double, double u) { return -u * u * u - u; }, {}, 1.0, 1024};
    const UniquenessReport r = uniqueness_probe(p, 8, kSeed);
    return {r.max_divergence < kUniqueness, fmt("max divergence over %.0f runs = %.2e", static_cast<double>(r.runs),
                                                r.max_divergence)};
}

Outcome comparison() {
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const WarpFunction warps[] = {WarpFunction::identity(), WarpFunction::log(), WarpFunction::sin()};
    std::size_t violations = 0, not_applicable = 0;
    for (int k = 0; k < 100; ++k) {
        const int w = static_cast<int>(U(rng) * 3);
        const double a = w == 1 ? 1.0 : 0.0;
        const double alpha = 0.05 + 0.9 * U(rng), gamma = 0.3 + 0.7 * U(rng), beta = gamma + (1 - gamma) * U(rng);
        const double q0 = 0.1 + 2 * U(rng), qw = 1 + 5 * U(rng), qp = 6 * U(rng);
        const double g0 = 2 * U(rng), gw = 1 + 5 * U(rng), gp = 6 * U(rng), u0 = -U(rng);
        auto q = [=](double t) { return 0.1 + q0 * std::pow(std::sin(qw * t + qp), 2); };
        auto g = [=](double t) { return -g0 * std::pow(std::cos(gw * t + gp), 2); };
        const FdeProblem p{kernel(alpha, gamma, beta, warps[w], a, a + 1.0),
                           [=](double t, double u) { return -q(t) * u + g(t); }, {}, u0, 256};
        const SolveReport r = solve_fde(p, {.formulation = Formulation::collocation});
        const ComparisonReport c = check_comparison(p.spec, r.solution, GridFunction::sample(a, a + 1.0, 256, q));
        if (c.status == ComparisonStatus::violation) ++violations;
        if (c.status == ComparisonStatus::not_applicable) ++not_applicable;
    }
    return {violations == 0 && not_applicable == 0,
            fmt("100 cases: %.0f violations, %.0f not applicable", static_cast<double>(violations),
                static_cast<double>(not_applicable))};
}

Outcome expressions() {
    using namespace fracvar::expr;
    const auto t0 = std::chrono::steady_clock::now();
    const VarSet tu{Var::t, Var::u};
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> ts(0.2, 2.0);
    double worst = 0.0;
    for (const char* name : {"-", "sin", "cos", "exp", "ln", "sqrt", "abs"}) {
        const std::string src = std::string(name) + "(0.3 + t*t)";
        const NodePtr f = parse(src, tu), df = derivative(f, Var::t);
        for (int k = 0; k < 64; ++k) {
            const double t = ts(rng), h = 1e-5;
            auto ev = [&](const NodePtr& n, double x) { return eval(*n, Bindings{}.set(Var::t, x).set(Var::u, 0.0)); };
            const double fd = (ev(f, t + h) - ev(f, t - h)) / (2 * h), exact = ev(df, t);
            worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
        }
    }
    std::size_t mismatches = 0;
    auto U01 = [&] { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
    std::function<NodePtr(int)> tree = [&](int depth) -> NodePtr {
        const int k = static_cast<int>(U01() * (depth <= 0 ? 3 : 10));
        if (k == 0) return make_constant(10 * U01() - 5);
        if (k == 1) return make_variable(Var::t);
        if (k == 2) return make_variable(Var::u);
        if (k < 6) return make_unary(static_cast<UnaryOp>(static_cast<int>(U01() * 7)), tree(depth - 1));
        return make_binary(static_cast<BinaryOp>(static_cast<int>(U01() * 5)), tree(depth - 1), tree(depth - 1));
    };
    for (int k = 0; k < 500; ++k) {
        const NodePtr n = tree(5);
        if (!structurally_equal(*parse(print(*n), tu), *n)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    return {worst < kExprRel && mismatches == 0 && secs < kExprSeconds,
            fmt("max FD rel err %.2e, round-trip mismatches %.0f/500, %.3f s", worst,
                static_cast<double>(mismatches), secs)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"Mittag-Leffler series vs spectral", ml_cross_validation},
        {"kernel -> 1 as alpha -> 0", kernel_small_order},
        {"operator limits as alpha -> 0", operator_small_order},
        {"Caputo-Fabrizio closed form", cf_closed_form},
        {"sup-norm boundedness", boundedness},
        {"limit interchange bound", interchange},
        {"maximum point inequality", max_point},
        {"Caputo type vanishes at a", vanish_at_a},
        {"FDE solver oracle", fde_oracle},
        {"sandwich bounds", sandwich},
        {"uniqueness probe", uniqueness},
        {"comparison principle", comparison},
        {"expression round-trip and derivatives", expressions},
    };
    int failures = 0, idx = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : criteria) {
        ++idx;
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const Error& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", idx, c.name, o.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed in %.1f s\n", idx - failures, idx, seconds_since(t0));
    return failures;
}
