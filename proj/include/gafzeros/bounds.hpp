#pragma once

#include <cstddef>
#include <optional>
#include <string>

// Closed-form bounds and exponents for overcrowding and deviation probabilities.
// Everything is returned in log form or as a positive "exponent" E meaning
// P ~ e^{-E}.
namespace gafz {

struct SumNLogN {
    /// sum_{n=1}^m n log n (compensated summation)
    double exact = 0.0;
    /// lower = exact, upper = sum_{n=1}^{m+1} n log n; closed_form sits between them.
    double lower = 0.0;
    double closed_form = 0.0;
    double upper = 0.0;
};

/// closed_form = (m+1)^2 log(m+1) / 2 - (m+1)^2 / 4 + 1/4.
SumNLogN sum_n_log_n(std::size_t m);

/// log of e^{-a log(a/theta) + a - theta}, the Chernoff bound for P[Pois(theta) >= a].
/// Requires a > theta > 0.
double poisson_tail_log_upper(double theta, double a);

enum class ExponentRegime {
    PlanarOvercrowd,        // m^2 log m / 2
    HyperbolicLowerStated,  // m^2 / |log r|
    HyperbolicLowerProof,   // m (m+1) |log r|
    HyperbolicUpperKappa,   // kappa(r) m^2 log^2 r
    VeryLarge,              // (alpha/2 - 1) gamma^2 r^{2 alpha} log r
    Moderate,               // gamma^3 r^{3 alpha - 2}
    MaxModPlanarUpper,      // 2 m^2 / log m
    MaxModHyperbolicUpper,  // m^2 / |log r|
    SodinTsirelsonMaxMod,   // e^{eps t^2}
};

std::string to_string(ExponentRegime regime);
/// Inverse of to_string; throws DomainError for an unknown name.
ExponentRegime exponent_regime_from_string(const std::string& name);

struct ExponentParams {
    std::optional<double> m;
    std::optional<double> r;
    std::optional<double> rho;
    std::optional<double> alpha;
    std::optional<double> gamma;
    std::optional<double> t;
    std::optional<double> eps;
};

/// The regime's predicted -log P scale. Throws DomainError when a required
/// parameter is missing or out of range, or an irrelevant one is supplied.
double predicted_exponent(ExponentRegime regime, const ExponentParams& params);

/// Extremes of the Poisson kernel of D(0, r), P(z, w) = (r^2 - |w|^2) / |z - w|^2,
/// over |z| = r and |w| <= eps.
struct PoissonKernelConstants {
    double A = 0.0;  // sup = (r + eps) / (r - eps)
    double B = 0.0;  // inf = (r - eps) / (r + eps)
};

PoissonKernelConstants poisson_kernel_constants(double r, double eps);

/// P(r e^{i theta}, w) for |w| < r.
double poisson_kernel(double r, double theta, double w_re, double w_im);

struct KappaResult {
    double kappa = 0.0;
    double argmax_eps = 0.0;
};

/// sup_{0 < eps < r} B_eps^2 / |log eps|, 0 < r < 1, by golden-section search.
KappaResult kappa(double r, double tol = 1e-10);

struct GinibreBrackets {
    double log_lower = 0.0;
    double log_upper = 0.0;
};

/// Lower: (m(m+1)/2) log(r^2/2) - sum_{n<=m} n log n.
/// Upper: log[ C(m^2, m) prod_{n<=m} min(1, e^{-n log(n/r^2) - r^2 + n}) + sum_{n>m^2} e^{-n log(n/r^2) - r^2 + n} ].
/// Requires m >= max(1, r^2).
GinibreBrackets ginibre_thm21_brackets(double r, std::size_t m);

struct HyperbolicSandwich {
    double log_lower = 0.0;  // m (m+1) log r
    double log_upper = 0.0;  // log(C(m^2, m) r^{m(m+1)} + r^{2m^2+2} / (1 - r^2))
};

HyperbolicSandwich hyperbolic_one_sandwich(double r, std::size_t m);

/// For rho = 1, the stated lower form e^{-m^2/|log r|} against the exact tail.
struct HyperbolicLowerCheck {
    double log_stated = 0.0;
    double log_proof = 0.0;
    double log_exact_lower = 0.0;
    double log_exact_upper = 0.0;
    /// The stated lower bound is larger than the exact probability.
    bool stated_exceeds_exact = false;
};

HyperbolicLowerCheck hyperbolic_lower_check(double r, std::size_t m);

}  // namespace gafz
