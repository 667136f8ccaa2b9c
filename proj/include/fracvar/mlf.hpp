#pragma once

#include <cstddef>
#include <vector>

namespace fracvar {

/// Accuracy target of the spectral quadrature fallback.
inline constexpr double kSpectralTol = 1e-10;

struct MLParams {
    double beta = 0.5;   ///< 0 < beta <= 1
    double tol = 1e-12;  ///< relative accuracy target, > 0
};

void validate(const MLParams& params);

/// Outcome of a direct power-series evaluation of E_beta(z).
struct SeriesResult {
    double value = 0.0;
    double error_bound = 0.0;  ///< rounding + truncation bound, absolute
    std::size_t terms = 0;
    bool certified = false;
};

/// One-parameter Mittag-Leffler function E_beta(z) = sum_k z^k / Gamma(beta k + 1).
///
/// The term-ratio table Gamma(beta(k-1)+1)/Gamma(beta k+1) is built once per
/// order, so an instance is cheap to evaluate many times and immutable after
/// construction (safe to share across threads).
///
/// Evaluation strategy for real z:
///  - z >= 0 and small-to-moderate negative z: compensated power series with a
///    running rounding bound and a geometric tail bound;
///  - negative z where cancellation makes the series uncertifiable: the Laplace
///    representation E_b(-x) = int_0^inf exp(-r x^{1/b}) K_b(r) dr (b < 1), or
///    exp (b = 1).
class MittagLeffler {
public:
    explicit MittagLeffler(double beta, double tol = MLParams{}.tol);
    explicit MittagLeffler(const MLParams& params) : MittagLeffler(params.beta, params.tol) {}

    [[nodiscard]] double operator()(double z) const;

    /// Raw series evaluation with its accuracy certificate; never falls back.
    [[nodiscard]] SeriesResult series(double z) const;

    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] double tol() const noexcept { return tol_; }

    static constexpr std::size_t kMaxTerms = 10000;

private:
    [[nodiscard]] double ratio(std::size_t k) const;

    double beta_;
    double tol_;
    std::vector<double> ratios_;
};

/// E_beta(z) to relative accuracy max(tol, kSpectralTol).
double ml_eval(const MLParams& params, double z);

/// K_gamma(r) = (1/pi) r^{gamma-1} sin(gamma pi) / (r^{2 gamma} + 2 r^gamma cos(gamma pi) + 1).
double spectral_density(double gamma, double r);

/// E_gamma(-t^gamma) by adaptive quadrature of int_0^inf exp(-r t) K_gamma(r) dr.
double ml_eval_spectral(double gamma, double t, double tol_quad = kSpectralTol);

}  // namespace fracvar
