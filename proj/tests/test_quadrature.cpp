#include <doctest.h>

#include <cmath>

#include "fracvar/quadrature.hpp"

using namespace fracvar;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Legendre rules are exact for polynomials of degree 2n-1") {
    for (std::size_t n : {1u, 3u, 7u, 15u}) {
        const quad::GaussRule rule = quad::gauss_legendre(n);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
        const int deg = static_cast<int>(2 * n - 1);
        const double got = quad::apply_rule(rule, [deg](double x) { return std::pow(x, deg - 1) + std::pow(x + 1.0, deg); }, -1.0, 1.0);
        const double want = (deg - 1) % 2 == 0 ? 2.0 / deg : 0.0;
        CHECK(got == doctest::Approx(want + std::pow(2.0, deg + 1) / (deg + 1)).epsilon(1e-12));
    }
}

TEST_CASE("adaptive integration handles an endpoint singularity") {
    const quad::Result r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("adaptive integration of smooth oscillatory data") {
    const quad::Result r = quad::integrate([](double x) { return std::cos(40.0 * x); }, 0.0, 2.0, 1e-12);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::sin(80.0) / 40.0).epsilon(1e-10));
}

}
