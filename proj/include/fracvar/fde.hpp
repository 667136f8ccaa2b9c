#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "fracvar/grid.hpp"
#include "fracvar/kernel.hpp"

namespace fracvar {

inline constexpr double kSolverTol = 1e-10;
/// Relative slack for bound and comparison checks, scaled by max(1, max|u|).
inline constexpr double kBoundSlack = 1e-7;
inline constexpr int kMaxNewtonIters = 50;
inline constexpr std::size_t kMinFdeGrid = 16;

using RhsFn = std::function<double(double t, double u)>;

/// Caputo-type equation D u = f(t, u) on [spec.a(), spec.b()] with u(a) = initial.
struct FdeProblem {
    KernelSpec spec;
    RhsFn rhs;
    /// Optional df/du; central differences are used when empty.
    RhsFn rhs_du;
    double initial = 0.0;
    std::size_t grid_n = 256;

    void validate() const;
};

/// Which discrete equation the marching scheme enforces.
///
/// collocation: D u(t_n) = f(t_n, u_n) for n >= 1. Because D u(a) = 0 for any
/// u, data with f(a, u0) != 0 produce an O(h)-wide initial layer.
///
/// initial_layer_corrected: D u(t) = f(t, u) - H(t, a) f(a, u0), which is
/// compatible at t = a for any u0. For exponential kernels it is the equation
/// whose solution also solves the differentiated (ODE) form.
enum class Formulation { collocation, initial_layer_corrected };

std::string_view to_string(Formulation f) noexcept;

struct SolveOptions {
    Formulation formulation = Formulation::initial_layer_corrected;
    double tol = kSolverTol;
    /// Randomizes each step's first Newton iterate (uniqueness probing).
    std::optional<std::uint64_t> perturb_seed;
    double perturb_scale = 0.5;
    /// Accumulates the memory sum from the newest cell backwards.
    bool reverse_memory = false;
};

struct LinearBound {
    double lambda = -1.0;  ///< must be negative
    GridFunction h;        ///< on the problem grid
};

struct BoundCheck {
    GridFunction lower;
    GridFunction upper;
    std::size_t violations = 0;
    std::optional<std::size_t> first_violation;
    double worst_excess = 0.0;
    double tol = 0.0;
    /// Envelope samples where lambda2 u + h2 <= f <= lambda1 u + h1 fails.
    std::size_t envelope_failures = 0;
};

struct SolveReport {
    GridFunction solution;
    std::vector<int> newton_iters;
    /// max_n |D u(t_n) - rhs_n| recomputed through caputo_deriv_ns.
    double residual_norm = 0.0;
    double residual_tol = 0.0;
    bool residual_certified = false;
    /// |f(a, u0)|; nonzero means the collocation form has an initial layer.
    double compatibility_defect = 0.0;
    Formulation formulation = Formulation::initial_layer_corrected;
    std::optional<BoundCheck> bound_check;
};

SolveReport solve_fde(const FdeProblem& problem, const SolveOptions& opts = {});

enum class ComparisonStatus { pass, violation, not_applicable };

std::string_view to_string(ComparisonStatus s) noexcept;

struct ComparisonReport {
    ComparisonStatus status = ComparisonStatus::pass;
    double max_q = 0.0;  ///< max over t > a of D u + q u
    double max_u = 0.0;
    std::optional<std::size_t> offending_node;
    double tol = 0.0;
};

/// Tests "D u + q u <= 0 for t > a implies u <= 0" on sampled u. tol < 0
/// selects kBoundSlack * max(1, max|u|).
ComparisonReport check_comparison(const KernelSpec& spec, const GridFunction& u,
                                  const GridFunction& q, double tol = -1.0);

struct UniquenessReport {
    std::size_t runs = 0;
    double max_divergence = 0.0;
    double max_dfdu = 0.0;  ///< largest sampled df/du over the envelope
};

/// Re-solves with randomized first iterates and reversed memory summation
/// and reports the largest pairwise sup-norm difference.
UniquenessReport uniqueness_probe(const FdeProblem& problem, std::size_t perturbations,
                                  std::uint64_t seed = 1,
                                  Formulation formulation = Formulation::collocation);

struct SandwichOptions {
    /// Throw BoundViolation on the first offending node instead of only reporting.
    bool strict = true;
    Formulation formulation = Formulation::collocation;
};

/// Solves u, v1 (upper) and v2 (lower) and checks v2 - tol <= u <= v1 + tol.
SolveReport sandwich_check(const FdeProblem& problem, const LinearBound& lower,
                           const LinearBound& upper, const SandwichOptions& opts = {});

}  // namespace fracvar
