// Command-line front end: operators on grids, FDE solves, verification suites.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fracvar/analysis.hpp"
#include "fracvar/errors.hpp"
#include "fracvar/expr.hpp"
#include "fracvar/fde.hpp"
#include "fracvar/kernel.hpp"
#include "fracvar/operators.hpp"

namespace {

using fracvar::Error;
using fracvar::ErrorKind;
using fracvar::expr::Expression;
using fracvar::expr::Var;
using json = nlohmann::json;

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kSuiteFailure = 3 };

// An error attributed to one command-line flag.
class FlagError : public Error {
public:
    FlagError(ErrorKind kind, const std::string& flag, const std::string& msg)
        : Error(kind, flag + ": " + msg) {}
};

std::string strip_kind(const Error& e) {
    const std::string w = e.what();
    const auto pos = w.find(": ");
    return pos == std::string::npos ? w : w.substr(pos + 2);
}

template <typename F>
auto blame(const std::string& flag, F&& body) {
    try {
        return body();
    } catch (const FlagError&) {
        throw;
    } catch (const Error& e) {
        throw FlagError(e.kind(), flag, strip_kind(e));
    }
}

Expression parse_flag(const std::string& flag, const std::string& src,
                      std::initializer_list<Var> vars) {
    return blame(flag, [&] { return Expression(src, fracvar::expr::VarSet(vars)); });
}

fracvar::ScalarFn fn_of_t(const std::string& flag, Expression e) {
    return [flag, e = std::move(e)](double t) { return blame(flag, [&] { return e.at_t(t); }); };
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonConvergent:
        case ErrorKind::QuadratureFailure:
        case ErrorKind::NewtonDivergence:
        case ErrorKind::BoundViolation:
        case ErrorKind::DegenerateCase:
        case ErrorKind::NoInteriorMax:
        case ErrorKind::DomainFault:
            return kNumerical;
        default:
            return kValidation;
    }
}

// ---------------------------------------------------------------------------
// Shared configuration

struct KernelFlags {
    std::string alpha = "0.5";
    std::string psi = "t";
    std::string norm = "1";
    double beta = 1.0;
    double gamma = 1.0;
    std::string coupling = "fixed";
    std::string special;
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 1024;
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 42;
};

void validate_grid(const KernelFlags& k) {
    if (!std::isfinite(k.a) || !std::isfinite(k.b) || !(k.a < k.b)) {
        throw FlagError(ErrorKind::InvalidParam, "--a/--b", "need finite a < b");
    }
    if (k.n < fracvar::kMinGridIntervals) {
        throw FlagError(ErrorKind::InvalidParam, "--n",
                        "need n >= " + std::to_string(fracvar::kMinGridIntervals));
    }
    if (!k.out.empty() && k.format != "csv" && k.format != "json") {
        throw FlagError(ErrorKind::InvalidParam, "--format", "expected csv or json");
    }
}

fracvar::OrderFunction build_order(const KernelFlags& k) {
    const Expression e = parse_flag("--alpha", k.alpha, {Var::t});
    return blame("--alpha", [&] {
        if (e.is_constant()) return fracvar::OrderFunction::constant(e.at_t(k.a));
        constexpr std::size_t kSamples = 1024;
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i <= kSamples; ++i) {
            const double v = e.at_t(k.a + (k.b - k.a) * static_cast<double>(i) / kSamples);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        fracvar::OrderFunction order(fn_of_t("--alpha", e), lo, hi, k.alpha);
        order.verify_on(k.a, k.b);
        return order;
    });
}

fracvar::WarpFunction build_warp(const KernelFlags& k) {
    const Expression e = parse_flag("--psi", k.psi, {Var::t});
    return blame("--psi", [&] {
        const auto& root = *e.root();
        if (root.kind == fracvar::expr::Node::Kind::variable) {
            fracvar::WarpFunction w = fracvar::WarpFunction::identity();
            w.verify_on(k.a, k.b);
            return w;
        }
        fracvar::WarpFunction w(fn_of_t("--psi", e), fn_of_t("--psi", e.derivative(Var::t)), k.psi);
        w.verify_on(k.a, k.b);
        return w;
    });
}

fracvar::NormalizationFunction build_norm(const KernelFlags& k) {
    const Expression e = parse_flag("--M", k.norm, {Var::alpha});
    return blame("--M", [&] {
        if (e.is_constant() && e(fracvar::expr::Bindings{}) == 1.0) {
            return fracvar::NormalizationFunction::unit();
        }
        return fracvar::NormalizationFunction(
            [e](double alpha) {
                return blame("--M", [&] { return e(fracvar::expr::Bindings{}.set(Var::alpha, alpha)); });
            },
            k.norm);
    });
}

fracvar::KernelSpec build_spec(const KernelFlags& k) {
    validate_grid(k);
    const fracvar::OrderFunction order = build_order(k);
    const fracvar::NormalizationFunction norm = build_norm(k);
    if (!k.special.empty()) {
        const auto tag = fracvar::special_case_from_string(k.special);
        if (!tag) throw FlagError(ErrorKind::InvalidParam, "--special", "unknown special case '" + k.special + "'");
        return blame("--special", [&] {
            return fracvar::make_special_case(*tag, order, norm, k.a, k.b, {k.gamma, k.beta});
        });
    }
    const fracvar::WarpFunction warp = build_warp(k);
    const auto coupling = k.coupling == "track_order" ? fracvar::OrderCoupling::track_order
                                                      : fracvar::OrderCoupling::fixed;
    return blame("--beta/--gamma", [&] {
        return fracvar::KernelSpec(k.gamma, k.beta, order, warp, norm, k.a, k.b, coupling);
    });
}

json config_echo(const KernelFlags& k) {
    return json{{"alpha", k.alpha}, {"psi", k.psi},   {"M", k.norm}, {"beta", k.beta},
                {"gamma", k.gamma}, {"coupling", k.coupling}, {"special", k.special},
                {"a", k.a},         {"b", k.b},       {"n", k.n},    {"seed", k.seed}};
}

// ---------------------------------------------------------------------------
// Output

struct Series {
    std::vector<double> t;
    std::vector<double> value;
    std::optional<double> estimate_error;
};

void write_series(const KernelFlags& k, const Series& s, json extra) {
    if (k.out.empty()) return;
    std::ofstream os(k.out, std::ios::binary);
    if (!os) throw FlagError(ErrorKind::InvalidParam, "--out", "cannot open '" + k.out + "'");
    if (k.format == "json") {
        json doc = std::move(extra);
        doc["config"] = config_echo(k);
        doc["t"] = s.t;
        doc["value"] = s.value;
        if (s.estimate_error) doc["estimate_error"] = *s.estimate_error;
        os << doc.dump(2) << '\n';
        return;
    }
    os << (s.estimate_error ? "t,value,estimate_error\n" : "t,value\n");
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        os << num(s.t[i]) << ',' << num(s.value[i]);
        if (s.estimate_error) os << ',' << num(*s.estimate_error);
        os << '\n';
    }
}

void write_json(const KernelFlags& k, json doc) {
    if (k.out.empty()) return;
    std::ofstream os(k.out, std::ios::binary);
    if (!os) throw FlagError(ErrorKind::InvalidParam, "--out", "cannot open '" + k.out + "'");
    doc["config"] = config_echo(k);
    os << doc.dump(2) << '\n';
}

fracvar::Scheme parse_scheme(const std::string& s) {
    if (s == "trapezoid" || s == "product_trapezoid") return fracvar::Scheme::product_trapezoid;
    if (s == "midpoint" || s == "product_midpoint") return fracvar::Scheme::product_midpoint;
    throw FlagError(ErrorKind::InvalidParam, "--scheme", "expected trapezoid or midpoint");
}

// ---------------------------------------------------------------------------
// Subcommands

struct OperatorFlags {
    std::string op;
    std::string f = "t";
    std::string scheme = "trapezoid";
    std::string exponent_at = "t";
    std::string caputo_form = "as_printed";
    double error_budget = 1e-3;
};

int run_operator(const KernelFlags& k, const OperatorFlags& o, bool integral) {
    const fracvar::KernelSpec spec = build_spec(k);
    const Expression fe = parse_flag("--f", o.f, {Var::t});
    const Expression dfe = fe.derivative(Var::t);
    fracvar::OperatorOptions opts;
    opts.scheme = parse_scheme(o.scheme);
    opts.exponent_at = o.exponent_at == "tau" ? fracvar::ExponentAt::tau : fracvar::ExponentAt::t;
    opts.caputo_form = o.caputo_form == "standard_psi" ? fracvar::CaputoForm::standard_psi
                                                        : fracvar::CaputoForm::as_printed;
    if (!(o.error_budget > 0.0)) throw FlagError(ErrorKind::InvalidParam, "--error-budget", "must be > 0");
    opts.error_budget = o.error_budget;

    const fracvar::GridFunction f = blame("--f", [&] {
        return fracvar::GridFunction::sample(k.a, k.b, k.n, fn_of_t("--f", fe), fn_of_t("--f", dfe));
    });

    fracvar::OperatorResult r;
    if (o.op == "rl_ns") r = fracvar::rl_deriv_ns(spec, f, opts);
    else if (o.op == "caputo_ns") r = fracvar::caputo_deriv_ns(spec, f, opts);
    else if (o.op == "rl_classical") r = fracvar::rl_deriv_classical(spec, f, opts);
    else if (o.op == "caputo_classical") r = fracvar::caputo_deriv_classical(spec, f, opts);
    else if (o.op == "rl_integral") r = fracvar::rl_integral_varorder(spec, f, opts);
    else if (o.op == "aux1") r = fracvar::aux_integral_1(spec, f, opts);
    else if (o.op == "aux2") r = fracvar::aux_integral_2(spec, f, opts);
    else throw FlagError(ErrorKind::InvalidParam, "--op", "unknown operator '" + o.op + "'");

    Series s;
    for (std::size_t i = 0; i <= r.n(); ++i) {
        s.t.push_back(r.node(i));
        s.value.push_back(r[i]);
    }
    s.estimate_error = r.quad_error_estimate;
    write_series(k, s,
                 json{{"command", integral ? "integral" : "deriv"},
                      {"operator", o.op},
                      {"f", o.f},
                      {"scheme", std::string(fracvar::to_string(r.scheme))}});

    std::cout << o.op << " of f(t) = " << o.f << " on [" << short_num(k.a) << ", " << short_num(k.b)
              << "], n = " << k.n << '\n';
    std::cout << "value at t = " << short_num(k.b) << ": " << num(r.values.back()) << '\n';
    std::cout << "sup norm: " << num(r.max_abs()) << '\n';
    std::cout << "quadrature error estimate: " << short_num(r.quad_error_estimate) << '\n';
    return kOk;
}

struct SolveFlags {
    std::string rhs;
    double u0 = 0.0;
    std::string formulation;  // empty: corrected, or collocation for sandwich/uniqueness
    double lower_lambda = NAN, upper_lambda = NAN;
    std::string lower_h, upper_h;
    std::size_t uniqueness = 0;
};

int run_solve(const KernelFlags& k, const SolveFlags& sf) {
    const fracvar::KernelSpec spec = build_spec(k);
    const Expression rhs = parse_flag("--rhs", sf.rhs, {Var::t, Var::u});
    const Expression rhs_du = rhs.derivative(Var::u);
    auto bind2 = [](Expression e) {
        return [e = std::move(e)](double t, double u) {
            return blame("--rhs", [&] {
                return e(fracvar::expr::Bindings{}.set(Var::t, t).set(Var::u, u));
            });
        };
    };
    fracvar::FdeProblem problem{spec, bind2(rhs), bind2(rhs_du), sf.u0, k.n};
    if (k.n < fracvar::kMinFdeGrid) {
        throw FlagError(ErrorKind::InvalidParam, "--n", "solve needs n >= " + std::to_string(fracvar::kMinFdeGrid));
    }
    if (!std::isfinite(sf.u0)) throw FlagError(ErrorKind::InvalidParam, "--u0", "must be finite");
    blame("--rhs", [&] { problem.validate(); return 0; });

    const bool sandwich = !sf.lower_h.empty() || !sf.upper_h.empty() || std::isfinite(sf.lower_lambda) ||
                          std::isfinite(sf.upper_lambda);
    fracvar::SolveOptions opts;
    if (sf.formulation == "collocation") {
        opts.formulation = fracvar::Formulation::collocation;
    } else if (sf.formulation == "corrected" || sf.formulation == "initial_layer_corrected") {
        opts.formulation = fracvar::Formulation::initial_layer_corrected;
    } else if (sf.formulation.empty()) {
        // The comparison arguments hold for the plain collocation equation.
        opts.formulation = sandwich || sf.uniqueness > 0 ? fracvar::Formulation::collocation
                                                         : fracvar::Formulation::initial_layer_corrected;
    } else {
        throw FlagError(ErrorKind::InvalidParam, "--formulation", "expected corrected or collocation");
    }
    fracvar::SolveReport report = [&] {
        if (!sandwich) return fracvar::solve_fde(problem, opts);
        if (sf.lower_h.empty() || sf.upper_h.empty() || !std::isfinite(sf.lower_lambda) ||
            !std::isfinite(sf.upper_lambda)) {
            throw FlagError(ErrorKind::InvalidParam, "--lower-*/--upper-*",
                            "sandwich bounds need --lower-lambda, --lower-h, --upper-lambda and --upper-h");
        }
        auto grid_of = [&](const std::string& flag, const std::string& src) {
            const Expression e = parse_flag(flag, src, {Var::t});
            return blame(flag, [&] { return fracvar::GridFunction::sample(k.a, k.b, k.n, fn_of_t(flag, e)); });
        };
        const fracvar::LinearBound lower{sf.lower_lambda, grid_of("--lower-h", sf.lower_h)};
        const fracvar::LinearBound upper{sf.upper_lambda, grid_of("--upper-h", sf.upper_h)};
        fracvar::SandwichOptions so;
        so.strict = false;
        so.formulation = opts.formulation;
        return blame("--lower-lambda/--upper-lambda",
                     [&] { return fracvar::sandwich_check(problem, lower, upper, so); });
    }();

    std::optional<fracvar::UniquenessReport> uniq;
    if (sf.uniqueness > 0) {
        uniq = blame("--rhs", [&] {
            return fracvar::uniqueness_probe(problem, sf.uniqueness, k.seed, opts.formulation);
        });
    }

    const fracvar::GridFunction& u = report.solution;
    int total = 0, worst = 0;
    for (int it : report.newton_iters) {
        total += it;
        worst = std::max(worst, it);
    }

    json extra{{"command", "solve"},
               {"rhs", sf.rhs},
               {"u0", sf.u0},
               {"formulation", std::string(fracvar::to_string(report.formulation))},
               {"newton_iters", report.newton_iters},
               {"residual_norm", report.residual_norm},
               {"residual_certified", report.residual_certified},
               {"compatibility_defect", report.compatibility_defect}};
    if (report.bound_check) {
        const auto& bc = *report.bound_check;
        extra["bound_check"] = json{{"violations", bc.violations},
                                    {"worst_excess", bc.worst_excess},
                                    {"tol", bc.tol},
                                    {"envelope_failures", bc.envelope_failures},
                                    {"lower", std::vector<double>(bc.lower.values().begin(), bc.lower.values().end())},
                                    {"upper", std::vector<double>(bc.upper.values().begin(), bc.upper.values().end())}};
    }
    if (uniq) {
        extra["uniqueness"] = json{{"runs", uniq->runs}, {"max_divergence", uniq->max_divergence},
                                   {"max_dfdu", uniq->max_dfdu}};
    }
    Series s;
    for (std::size_t i = 0; i <= u.n(); ++i) {
        s.t.push_back(u.node(i));
        s.value.push_back(u[i]);
    }
    write_series(k, s, extra);

    std::cout << "solve D u = " << sf.rhs << ", u(" << short_num(k.a) << ") = " << short_num(sf.u0)
              << ", n = " << k.n << ", formulation " << fracvar::to_string(report.formulation) << '\n';
    std::cout << "u(" << short_num(k.b) << ") = " << num(u[u.n()]) << '\n';
    std::cout << "newton iterations: total " << total << ", max per step " << worst << '\n';
    std::cout << "residual norm: " << short_num(report.residual_norm) << " (tol "
              << short_num(report.residual_tol) << ", "
              << (report.residual_certified ? "certified" : "NOT certified") << ")\n";
    std::cout << "compatibility defect |f(a,u0)|: " << short_num(report.compatibility_defect) << '\n';
    int code = report.residual_certified ? kOk : kNumerical;
    if (report.bound_check) {
        const auto& bc = *report.bound_check;
        std::cout << "sandwich: " << bc.violations << " violations (worst excess "
                  << short_num(bc.worst_excess) << ", tol " << short_num(bc.tol) << "), "
                  << bc.envelope_failures << " envelope samples outside the bounds\n";
        if (bc.violations > 0) {
            std::cerr << "error: BoundViolation: first offending node " << *bc.first_violation << '\n';
            code = kNumerical;
        }
    }
    if (uniq) {
        std::cout << "uniqueness: " << uniq->runs << " runs, max divergence "
                  << short_num(uniq->max_divergence) << '\n';
    }
    return code;
}

struct VerifyFlags {
    std::string suite = "all";
    std::size_t random_count = 20;
};

int run_verify(const KernelFlags& k, const VerifyFlags& vf) {
    const fracvar::KernelSpec spec = build_spec(k);
    using Suite = fracvar::SuiteReport (*)(const fracvar::SuiteConfig&);
    const std::vector<std::pair<std::string, Suite>> suites = {
        {"boundedness", &fracvar::check_boundedness},
        {"lipschitz", &fracvar::check_lipschitz},
        {"limit_interchange", &fracvar::check_limit_interchange},
        {"axiom_limits", &fracvar::check_axiom_limits},
        {"max_point", &fracvar::check_max_point},
        {"vanish_at_a", &fracvar::check_vanish_at_a},
    };
    const bool known = vf.suite == "all" ||
                       std::any_of(suites.begin(), suites.end(), [&](const auto& s) { return s.first == vf.suite; });
    if (!known) throw FlagError(ErrorKind::InvalidParam, "--suite", "unknown suite '" + vf.suite + "'");

    auto make_cfg = [&](const fracvar::KernelSpec& s) {
        fracvar::SuiteConfig cfg{s, fracvar::default_corpus(s.a(), s.b(), vf.random_count, k.seed)};
        cfg.grid_n = k.n;
        blame("--n", [&] { cfg.validate(); return 0; });
        return cfg;
    };

    std::vector<fracvar::SuiteReport> reports;
    for (const auto& [name, fn] : suites) {
        if (vf.suite != "all" && vf.suite != name) continue;
        if (name == "limit_interchange") {
            // Every built-in warp, each on its own natural interval.
            for (const fracvar::KernelSpec& ws : fracvar::builtin_warp_specs(spec)) {
                fracvar::SuiteReport r = fn(make_cfg(ws));
                r.suite_name += "[" + ws.warp().label() + "]";
                reports.push_back(std::move(r));
            }
        } else {
            reports.push_back(fn(make_cfg(spec)));
        }
    }

    json doc{{"command", "verify"}, {"suite", vf.suite}, {"reports", json::array()}};
    std::size_t failed = 0;
    for (const auto& r : reports) {
        std::cout << r.suite_name << ": " << r.cases_run << " cases, " << r.failures.size() << " failures\n";
        for (const auto& f : r.failures) {
            std::cout << "  FAIL " << f.case_name << ": observed " << short_num(f.observed) << ", bound "
                      << short_num(f.bound) << '\n';
        }
        for (const auto& note : r.notes) std::cout << "  note: " << note << '\n';
        if (!r.passed()) ++failed;
        json jr{{"suite", r.suite_name}, {"cases_run", r.cases_run}, {"metrics", r.metrics}, {"notes", r.notes}};
        jr["failures"] = json::array();
        for (const auto& f : r.failures) {
            jr["failures"].push_back(
                json{{"case", f.case_name}, {"observed", f.observed}, {"bound", f.bound}, {"margin", f.margin}});
        }
        doc["reports"].push_back(std::move(jr));
    }
    write_json(k, std::move(doc));
    std::cout << (failed == 0 ? "all suites passed" : std::to_string(failed) + " suite(s) reported failures") << '\n';
    return failed == 0 ? kOk : kSuiteFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variable-order non-singular fractional operators: evaluate, solve, verify.\n"
                 "Expressions use + - * / ^, unary minus, parentheses, numbers, pi and\n"
                 "sin cos exp ln sqrt abs. alpha, psi, f and h take t; rhs takes t and u;\n"
                 "M takes alpha."};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file supplying defaults for the flags");

    KernelFlags k;
    app.add_option("--alpha", k.alpha, "order alpha(t), values in (0, 1)")->capture_default_str();
    app.add_option("--psi", k.psi, "increasing warp psi(t)")->capture_default_str();
    app.add_option("--M", k.norm, "normalization M(alpha), M(0) = M(1) = 1")->capture_default_str();
    app.add_option("--beta", k.beta, "Mittag-Leffler order, (0, 1]")->capture_default_str();
    app.add_option("--gamma", k.gamma, "power on psi(t) - psi(tau), (0, 1]")->capture_default_str();
    app.add_option("--coupling", k.coupling, "fixed or track_order (beta = gamma = alpha(t))")
        ->check(CLI::IsMember({"fixed", "track_order"}))
        ->capture_default_str();
    app.add_option("--special", k.special,
                   "named special case: variable_ml atangana yang_machado caputo_fabrizio "
                   "unit_norm_exp log_warp sin_warp");
    app.add_option("--a", k.a, "left end")->capture_default_str();
    app.add_option("--b", k.b, "right end")->capture_default_str();
    app.add_option("--n", k.n, "number of grid intervals")->capture_default_str();
    app.add_option("--out", k.out, "output file");
    app.add_option("--format", k.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--seed", k.seed, "seed for random test functions and probes")->capture_default_str();

    OperatorFlags deriv_flags;
    deriv_flags.op = "caputo_ns";
    auto* deriv = app.add_subcommand("deriv", "fractional derivative of f on the grid");
    deriv->add_option("--op", deriv_flags.op, "rl_ns caputo_ns rl_classical caputo_classical")
        ->check(CLI::IsMember({"rl_ns", "caputo_ns", "rl_classical", "caputo_classical"}))
        ->capture_default_str();

    OperatorFlags integral_flags;
    integral_flags.op = "rl_integral";
    auto* integral = app.add_subcommand("integral", "fractional or auxiliary integral of f");
    integral->add_option("--op", integral_flags.op, "rl_integral aux1 aux2")
        ->check(CLI::IsMember({"rl_integral", "aux1", "aux2"}))
        ->capture_default_str();

    for (auto [sub, flags] : {std::pair{deriv, &deriv_flags}, std::pair{integral, &integral_flags}}) {
        sub->add_option("--f", flags->f, "function f(t)")->capture_default_str();
        sub->add_option("--scheme", flags->scheme, "trapezoid or midpoint")
            ->check(CLI::IsMember({"trapezoid", "midpoint", "product_trapezoid", "product_midpoint"}))
            ->capture_default_str();
        sub->add_option("--exponent-at", flags->exponent_at, "variable exponent at t or tau")
            ->check(CLI::IsMember({"t", "tau"}))
            ->capture_default_str();
        sub->add_option("--caputo-form", flags->caputo_form, "as_printed or standard_psi")
            ->check(CLI::IsMember({"as_printed", "standard_psi"}))
            ->capture_default_str();
        sub->add_option("--error-budget", flags->error_budget, "relative quadrature error budget")
            ->capture_default_str();
    }

    SolveFlags solve_flags;
    auto* solve = app.add_subcommand("solve", "solve the Caputo-type equation D u = rhs(t, u)");
    solve->add_option("--rhs", solve_flags.rhs, "right-hand side f(t, u)")->required();
    solve->add_option("--u0", solve_flags.u0, "initial value u(a)")->capture_default_str();
    solve->add_option("--formulation", solve_flags.formulation,
                      "corrected or collocation (default: corrected; collocation with bounds or --uniqueness)")
        ->check(CLI::IsMember({"corrected", "initial_layer_corrected", "collocation"}));
    solve->add_option("--lower-lambda", solve_flags.lower_lambda, "lambda2 < 0 of the lower bound");
    solve->add_option("--lower-h", solve_flags.lower_h, "h2(t) of the lower bound");
    solve->add_option("--upper-lambda", solve_flags.upper_lambda, "lambda1 < 0 of the upper bound");
    solve->add_option("--upper-h", solve_flags.upper_h, "h1(t) of the upper bound");
    solve->add_option("--uniqueness", solve_flags.uniqueness, "number of perturbed re-solves to compare");

    VerifyFlags verify_flags;
    auto* verify = app.add_subcommand("verify", "run numerical verification suites");
    verify->add_option("--suite", verify_flags.suite,
                       "all boundedness lipschitz limit_interchange axiom_limits max_point vanish_at_a")
        ->capture_default_str();
    verify->add_option("--random-count", verify_flags.random_count, "random trig polynomials in the corpus")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kValidation;
    }

    try {
        if (*deriv) return run_operator(k, deriv_flags, false);
        if (*integral) return run_operator(k, integral_flags, true);
        if (*solve) return run_solve(k, solve_flags);
        if (*verify) return run_verify(k, verify_flags);
    } catch (const FlagError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::DomainFault ? kValidation : exit_code_for(e.kind());
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kValidation;
}
