#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "fracvar/errors.hpp"
#include "fracvar/expr.hpp"

using namespace fracvar;
using namespace fracvar::expr;

namespace {

const VarSet kT{Var::t};
const VarSet kTU{Var::t, Var::u};

double at(const std::string& src, double t, double u = 0.0) {
    return eval(*parse(src, kTU), Bindings{}.set(Var::t, t).set(Var::u, u));
}

ErrorKind kind_of(const std::function<void()>& fn, std::optional<std::size_t>* loc = nullptr) {
    try {
        fn();
    } catch (const Error& e) {
        if (loc) *loc = e.location();
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::InvalidParam;
}

NodePtr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    const int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
    switch (k) {
        case 0: return make_constant(val(rng));
        case 1: return make_variable(Var::t);
        case 2: return make_variable(Var::u);
        case 3:
        case 4:
        case 5: {
            std::uniform_int_distribution<int> op(0, 6);
            return make_unary(static_cast<UnaryOp>(op(rng)), random_tree(rng, depth - 1));
        }
        default: {
            std::uniform_int_distribution<int> op(0, 4);
            return make_binary(static_cast<BinaryOp>(op(rng)), random_tree(rng, depth - 1),
                               random_tree(rng, depth - 1));
        }
    }
}

}  // namespace

TEST_SUITE("expr") {

TEST_CASE("basic evaluation") {
    CHECK(at("sin(t) + t^2", 0.0) == 0.0);
    CHECK(at("-u^3 - u", 0.0, 1.0) == -2.0);
    CHECK(at("exp(t)", 1.0) == doctest::Approx(2.718281828459045));
    CHECK(at("t^0.5", 4.0) == 2.0);
    CHECK(at("2^3^2", 0.0) == 512.0);
    CHECK(at("-2^2", 0.0) == -4.0);
    CHECK(at("2*-t", 3.0) == -6.0);
    CHECK(at("8/2/2", 0.0) == 2.0);
    CHECK(at("1 - 2 - 3", 0.0) == -4.0);
    CHECK(at("abs(-3) + sqrt(16) + cos(0)", 0.0) == 8.0);
    CHECK(at("2*pi", 0.0) == doctest::Approx(2 * M_PI));
    CHECK(at("1.5e2 + .5", 0.0) == 150.5);
    CHECK(at("(-2)^3", 0.0) == -8.0);
    const NodePtr warp = parse("ln(t)", kT);
    CHECK(eval(*warp, Bindings{}.set(Var::t, M_E)) == doctest::Approx(1.0));
}

TEST_CASE("parse errors carry kind and offset") {
    std::optional<std::size_t> loc;
    CHECK(kind_of([] { parse("t + * 2", kT); }, &loc) == ErrorKind::SyntaxError);
    CHECK(loc == 4u);
    CHECK(kind_of([] { parse("sin(t", kT); }, &loc) == ErrorKind::SyntaxError);
    CHECK(kind_of([] { parse("", kT); }) == ErrorKind::SyntaxError);
    CHECK(kind_of([] { parse("t t", kT); }, &loc) == ErrorKind::SyntaxError);
    CHECK(loc == 2u);
    CHECK(kind_of([] { parse("1 + tan(t)", kT); }, &loc) == ErrorKind::UnknownIdentifier);
    CHECK(loc == 4u);
    CHECK(kind_of([] { parse("t + u", kT); }, &loc) == ErrorKind::DisallowedVariable);
    CHECK(loc == 4u);
}

TEST_CASE("evaluation faults") {
    std::optional<std::size_t> loc;
    CHECK(kind_of([] { at("ln(t)", 0.0); }) == ErrorKind::DomainFault);
    CHECK(kind_of([] { at("1 + 1/t", 0.0); }, &loc) == ErrorKind::DomainFault);
    CHECK(loc == 5u);
    CHECK(kind_of([] { at("sqrt(t)", -1.0); }) == ErrorKind::DomainFault);
    CHECK(kind_of([] { at("t^0.5", -4.0); }) == ErrorKind::DomainFault);
    CHECK(kind_of([] { at("t^(-1)", 0.0); }) == ErrorKind::DomainFault);
    CHECK(kind_of([] { at("exp(t)", 1000.0); }) == ErrorKind::DomainFault);
    CHECK(kind_of([] { eval(*parse("t + u", kTU), Bindings{}.set(Var::t, 1.0)); }) ==
          ErrorKind::UnboundVariable);
    CHECK(at("t^3", -2.0) == -8.0);
}

TEST_CASE("symbolic derivatives") {
    auto d = [](const std::string& src, double t) {
        return eval(*derivative(parse(src, kT), Var::t), Bindings{}.set(Var::t, t));
    };
    CHECK(d("t^2", 3.0) == 6.0);
    CHECK(d("ln(t)", 4.0) == 0.25);
    CHECK(d("sin(t)", 0.0) == 1.0);
    CHECK(structurally_equal(*derivative(parse("t^2", kT), Var::t), *parse("2*t", kT)));
    CHECK(structurally_equal(*derivative(parse("ln(t)", kT), Var::t), *parse("1/t", kT)));
    CHECK(structurally_equal(*derivative(parse("sin(t)", kT), Var::t), *parse("cos(t)", kT)));
    CHECK(d("5", 1.0) == 0.0);
    const Expression e("u^2 + t*u", kTU);
    const Expression du = e.derivative(Var::u);
    CHECK(du(Bindings{}.set(Var::t, 2.0).set(Var::u, 3.0)) == 8.0);
    CHECK(Expression("3*pi", kT).is_constant());
    CHECK_FALSE(Expression("t", kT).is_constant());
    CHECK(Expression("t^2", kT).at_t(1.5) == 2.25);
}

TEST_CASE("every unary agrees with central differences") {
    const char* templates[] = {"-(X)", "sin(X)", "cos(X)", "exp(X)", "ln(X)", "sqrt(X)", "abs(X)",
                               "X^2.5", "X^u", "u/X", "X*X*X - X"};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ts(0.2, 2.0);
    const double h = 1e-5;
    for (std::string src : templates) {
        src.replace(src.find('X'), 1, "(0.3 + t*t)");
        while (src.find('X') != std::string::npos) src.replace(src.find('X'), 1, "(0.3 + t*t)");
        const NodePtr f = parse(src, kTU);
        const NodePtr df = derivative(f, Var::t);
        for (int k = 0; k < 64; ++k) {
            const double t = ts(rng), u = 1.7;
            auto ev = [&](const NodePtr& n, double tt) { return eval(*n, Bindings{}.set(Var::t, tt).set(Var::u, u)); };
            const double fd = (ev(f, t + h) - ev(f, t - h)) / (2 * h);
            const double exact = ev(df, t);
            INFO(src << " at t=" << t);
            CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
        }
    }
}

TEST_CASE("print and parse round-trip on random trees") {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 500; ++k) {
        const NodePtr tree = random_tree(rng, 5);
        const std::string text = print(*tree);
        INFO(text);
        CHECK(structurally_equal(*parse(text, kTU), *tree));
    }
}

TEST_CASE("multiplication binds tighter than addition") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        const std::string a = print(*random_tree(rng, 3)), b = print(*random_tree(rng, 3)),
                          c = print(*random_tree(rng, 3));
        CHECK(structurally_equal(*parse(a + "+" + b + "*" + c, kTU), *parse(a + "+(" + b + "*" + c + ")", kTU)));
        CHECK(structurally_equal(*parse(a + "-" + b + "^" + c, kTU), *parse(a + "-(" + b + "^" + c + ")", kTU)));
    }
}

}
