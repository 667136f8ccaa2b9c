#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "fracvar/errors.hpp"
#include "fracvar/fde.hpp"
#include "fracvar/operators.hpp"
#include "support.hpp"

using namespace fracvar;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidParam;
}

FdeProblem cf_problem(double alpha, RhsFn rhs, double u0, std::size_t n) {
    return {testing::cf_spec(alpha), std::move(rhs), {}, u0, n};
}

GridFunction constant_on(const FdeProblem& p, double c) {
    return GridFunction::sample(p.spec.a(), p.spec.b(), p.grid_n, [c](double) { return c; });
}

}  // namespace

TEST_SUITE("fde") {

TEST_CASE("zero right-hand side keeps the initial value") {
    const FdeProblem p{testing::ml_spec(0.4, 0.7, 0.8), [](double, double) { return 0.0; }, {}, 2.5, 64};
    for (Formulation f : {Formulation::collocation, Formulation::initial_layer_corrected}) {
        const SolveReport r = solve_fde(p, {.formulation = f});
        for (double v : r.solution.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));
        CHECK(r.residual_certified);
    }
}

TEST_CASE("exponential kernel, linear decay") {
    const SolveReport r = solve_fde(cf_problem(0.5, [](double, double u) { return -u; }, 1.0, 1024));
    CHECK(r.solution.values().back() == doctest::Approx(std::exp(-1.0 / 3.0)).epsilon(1e-6));
    CHECK(r.residual_certified);
    CHECK(r.compatibility_defect == 1.0);
    CHECK(r.newton_iters.size() == 1025);
}

TEST_CASE("exponential kernel against its differentiated form") {
    // With k = alpha/(1-alpha), P = 1/(1-alpha), f = -2u + t the corrected
    // equation reduces to (P + 2) u' = -2k u + k t + 1.
    const double alpha = 0.3, k = alpha / (1 - alpha), P = 1 / (1 - alpha), u0 = 0.8;
    const double A = -2 * k / (P + 2), B = k / (P + 2), C = 1 / (P + 2);
    const double p = -B / A, q = (p - C) / A;
    auto exact = [&](double t) { return p * t + q + (u0 - q) * std::exp(A * t); };
    const SolveReport r = solve_fde(cf_problem(alpha, [](double t, double u) { return -2 * u + t; }, u0, 512));
    double err = 0.0;
    for (std::size_t i = 0; i <= 512; ++i) err = std::max(err, std::abs(r.solution[i] - exact(r.solution.node(i))));
    CHECK(err < 1e-6);
}

TEST_CASE("corrected formulation is second order") {
    std::vector<double> errs;
    for (std::size_t n : {128u, 256u, 512u}) {
        const SolveReport r = solve_fde(cf_problem(0.5, [](double, double u) { return -u; }, 1.0, n));
        errs.push_back(std::abs(r.solution.values().back() - std::exp(-1.0 / 3.0)));
    }
    CHECK(errs[0] / errs[1] > 3.5);
    CHECK(errs[1] / errs[2] > 3.5);
}

TEST_CASE("collocation form converges to the layered limit") {
    // The jump at t = a leaves u(a+) = u0 P/(P+1), after which the ODE decays at rate 1/3.
    const double limit = 2.0 / 3.0 * std::exp(-1.0 / 3.0);
    std::vector<double> errs;
    for (std::size_t n : {256u, 512u, 1024u}) {
        const SolveReport r =
            solve_fde(cf_problem(0.5, [](double, double u) { return -u; }, 1.0, n), {.formulation = Formulation::collocation});
        CHECK(r.residual_certified);
        errs.push_back(std::abs(r.solution.values().back() - limit));
    }
    CHECK(errs[2] < 1e-3);
    CHECK(errs[0] / errs[1] > 1.7);
    CHECK(errs[1] / errs[2] > 1.7);
}

TEST_CASE("residual certification recomputes the operator") {
    const FdeProblem p{testing::ml_spec(0.6, 0.8, 0.9, WarpFunction::log(), 1.0, 2.0),
                       [](double t, double u) { return -u * u * u - u + std::sin(t); }, {}, 0.3, 200};
    const SolveReport r = solve_fde(p, {.formulation = Formulation::collocation});
    const OperatorResult d = caputo_deriv_ns(p.spec, r.solution.without_derivative(), {.error_budget = INFINITY});
    double res = 0.0;
    for (std::size_t i = 1; i <= p.grid_n; ++i) {
        res = std::max(res, std::abs(d[i] - p.rhs(r.solution.node(i), r.solution[i])));
    }
    CHECK(r.residual_certified);
    CHECK(res == doctest::Approx(r.residual_norm).epsilon(1e-6).scale(1e-12));
    CHECK(res <= r.residual_tol);
}

TEST_CASE("comparison principle examples") {
    const KernelSpec spec = testing::cf_spec(0.5);
    auto g = [](std::function<double(double)> f) { return GridFunction::sample(0, 1, 128, std::move(f)); };
    const GridFunction one = g([](double) { return 1.0; });
    const ComparisonReport neg = check_comparison(spec, g([](double t) { return -1 - t; }), one);
    CHECK(neg.status == ComparisonStatus::pass);
    CHECK(neg.max_q < 0);
    CHECK(check_comparison(spec, g([](double) { return 0.0; }), one).status == ComparisonStatus::pass);
    CHECK(check_comparison(spec, g([](double t) { return t; }), one).status == ComparisonStatus::not_applicable);
    CHECK(to_string(ComparisonStatus::not_applicable) == "NOT-APPLICABLE");
    CHECK(kind_of([&] { check_comparison(spec, one, g([](double t) { return t - 0.5; })); }) ==
          ErrorKind::HypothesisViolation);
}

TEST_CASE("comparison principle on solved problems") {
    // D u = -q u + g with g <= 0 and u0 <= 0: Q = g <= 0 so u must stay non-positive.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 12; ++k) {
        const double c1 = U(rng) * 3, c2 = U(rng) * 3, w = 1 + 4 * U(rng), u0 = -U(rng);
        const FdeProblem p{testing::ml_spec(0.1 + 0.8 * U(rng), 0.5 + 0.5 * U(rng), 0.5 + 0.5 * U(rng)),
                           [=](double t, double u) {
                               const double s = std::sin(w * t + c1);
                               return -(0.1 + c2 * s * s) * u - s * s;
                           },
                           {}, u0, 128};
        const SolveReport r = solve_fde(p, {.formulation = Formulation::collocation});
        const GridFunction q = GridFunction::sample(0, 1, 128, [=](double t) {
            const double s = std::sin(w * t + c1);
            return 0.1 + c2 * s * s;
        });
        const ComparisonReport c = check_comparison(p.spec, r.solution, q);
        CHECK(c.status == ComparisonStatus::pass);
        CHECK(c.max_u <= c.tol);
    }
}

TEST_CASE("uniqueness probe") {
    FdeProblem p = cf_problem(0.5, [](double, double u) { return -u * u * u - u; }, 1.0, 128);
    const UniquenessReport r = uniqueness_probe(p, 8);
    CHECK(r.runs == 9);
    CHECK(r.max_divergence < 1e-8);
    CHECK(r.max_dfdu <= 0.0);
    p.rhs = [](double, double) { return 0.0; };
    CHECK(uniqueness_probe(p, 4).max_divergence == 0.0);
    p.rhs = [](double, double u) { return u; };
    CHECK(kind_of([&] { uniqueness_probe(p, 4); }) == ErrorKind::HypothesisViolation);
}

TEST_CASE("sandwich bounds") {
    FdeProblem p = cf_problem(0.5, [](double t, double u) { return -u + 0.5 * std::sin(t); }, 0.2, 256);
    const SolveReport r = sandwich_check(p, {-1.0, constant_on(p, -0.5)}, {-1.0, constant_on(p, 0.5)});
    REQUIRE(r.bound_check);
    CHECK(r.bound_check->violations == 0);
    CHECK(r.bound_check->envelope_failures == 0);

    p.rhs = [](double, double u) { return -u; };
    const SolveReport same = sandwich_check(p, {-1.0, constant_on(p, 0.0)}, {-1.0, constant_on(p, 0.0)});
    CHECK(max_difference(same.bound_check->lower, same.solution) < 1e-12);
    CHECK(max_difference(same.bound_check->upper, same.solution) < 1e-12);

    p.rhs = [](double t, double u) { return -u + std::sin(t); };
    const GridFunction s = GridFunction::sample(0, 1, 256, [](double t) { return std::sin(t); });
    const SolveReport eq = sandwich_check(p, {-1.0, s}, {-1.0, s});
    CHECK(max_difference(eq.bound_check->upper, eq.solution) < 1e-9);

    CHECK(kind_of([&] { sandwich_check(p, {-1.0, constant_on(p, -10.0)}, {-1.0, constant_on(p, -10.0)}); }) ==
          ErrorKind::BoundViolation);
    const SolveReport soft =
        sandwich_check(p, {-1.0, constant_on(p, -10.0)}, {-1.0, constant_on(p, -10.0)}, {.strict = false});
    CHECK(soft.bound_check->violations > 0);
    CHECK(soft.bound_check->first_violation.has_value());
    CHECK(kind_of([&] { sandwich_check(p, {1.0, s}, {-1.0, s}); }) == ErrorKind::HypothesisViolation);
}

TEST_CASE("blow-up is reported") {
    const FdeProblem p = cf_problem(0.5, [](double, double u) { return u * u + 10.0; }, 1.0, 64);
    CHECK(kind_of([&] { solve_fde(p); }) == ErrorKind::NewtonDivergence);
}

TEST_CASE("problem validation") {
    CHECK(kind_of([] { solve_fde(cf_problem(0.5, [](double, double u) { return -u; }, 1.0, 8)); }) ==
          ErrorKind::InvalidParam);
    CHECK(kind_of([] { solve_fde(cf_problem(0.5, {}, 1.0, 64)); }) == ErrorKind::InvalidParam);
    CHECK(kind_of([] { solve_fde(cf_problem(0.5, [](double, double u) { return -u; }, NAN, 64)); }) ==
          ErrorKind::InvalidParam);
}

}
