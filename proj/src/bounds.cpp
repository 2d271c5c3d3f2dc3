#include "gafzeros/bounds.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "gafzeros/errors.hpp"
#include "gafzeros/logspace.hpp"
#include "gafzeros/radial.hpp"

namespace gafz {

SumNLogN sum_n_log_n(std::size_t m) {
    if (m < 1) throw DomainError("sum_n_log_n requires m >= 1");
    CompensatedSum s;
    for (std::size_t n = 2; n <= m; ++n) {
        const double nd = static_cast<double>(n);
        s.add(nd * std::log(nd));
    }
    const double m1 = static_cast<double>(m) + 1.0;
    SumNLogN out;
    out.exact = s.value();
    out.lower = out.exact;
    s.add(m1 * std::log(m1));
    out.upper = s.value();
    out.closed_form = 0.5 * m1 * m1 * std::log(m1) - 0.25 * m1 * m1 + 0.25;
    return out;
}

double poisson_tail_log_upper(double theta, double a) {
    if (!(theta > 0.0)) throw DomainError("poisson_tail_log_upper requires theta > 0");
    if (!(a > theta)) throw DomainError("poisson_tail_log_upper requires a > theta");
    return -a * std::log(a / theta) + a - theta;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<std::pair<ExponentRegime, const char*>, 9> kRegimeNames{{
    {ExponentRegime::PlanarOvercrowd, "PlanarOvercrowd"},
    {ExponentRegime::HyperbolicLowerStated, "HyperbolicLowerStated"},
    {ExponentRegime::HyperbolicLowerProof, "HyperbolicLowerProof"},
    {ExponentRegime::HyperbolicUpperKappa, "HyperbolicUpperKappa"},
    {ExponentRegime::VeryLarge, "VeryLarge"},
    {ExponentRegime::Moderate, "Moderate"},
    {ExponentRegime::MaxModPlanarUpper, "MaxModPlanarUpper"},
    {ExponentRegime::MaxModHyperbolicUpper, "MaxModHyperbolicUpper"},
    {ExponentRegime::SodinTsirelsonMaxMod, "SodinTsirelsonMaxMod"},
}};

enum Field : unsigned { kM = 1, kR = 2, kRho = 4, kAlpha = 8, kGamma = 16, kT = 32, kEps = 64 };

unsigned required_fields(ExponentRegime regime) {
    switch (regime) {
        case ExponentRegime::PlanarOvercrowd:
        case ExponentRegime::MaxModPlanarUpper:
            return kM;
        case ExponentRegime::HyperbolicLowerStated:
        case ExponentRegime::HyperbolicLowerProof:
        case ExponentRegime::HyperbolicUpperKappa:
        case ExponentRegime::MaxModHyperbolicUpper:
            return kM | kR;
        case ExponentRegime::VeryLarge:
        case ExponentRegime::Moderate:
            return kR | kAlpha | kGamma;
        case ExponentRegime::SodinTsirelsonMaxMod:
            return kT | kEps;
    }
    return 0;
}

void validate(ExponentRegime regime, const ExponentParams& p) {
    const std::array<std::pair<Field, const std::optional<double>*>, 7> fields{{
        {kM, &p.m}, {kR, &p.r}, {kRho, &p.rho}, {kAlpha, &p.alpha},
        {kGamma, &p.gamma}, {kT, &p.t}, {kEps, &p.eps},
    }};
    constexpr std::array<const char*, 7> names{"m", "r", "rho", "alpha", "gamma", "t", "eps"};
    const unsigned need = required_fields(regime);
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const bool wanted = (need & fields[i].first) != 0;
        const bool given = fields[i].second->has_value();
        if (wanted && !given) {
            throw DomainError(to_string(regime) + ": missing parameter '" + names[i] + "'");
        }
        if (!wanted && given) {
            throw DomainError(to_string(regime) + ": parameter '" + names[i] + "' does not apply");
        }
        if (given && !std::isfinite(**fields[i].second)) {
            throw DomainError(to_string(regime) + ": parameter '" + names[i] + "' is not finite");
        }
    }
}

void require(bool ok, ExponentRegime regime, const char* what) {
    if (!ok) throw DomainError(to_string(regime) + ": " + what);
}

}  // namespace

std::string to_string(ExponentRegime regime) {
    for (const auto& [tag, name] : kRegimeNames) {
        if (tag == regime) return name;
    }
    return "Unknown";
}

ExponentRegime exponent_regime_from_string(const std::string& name) {
    for (const auto& [tag, label] : kRegimeNames) {
        if (name == label) return tag;
    }
    throw DomainError("unknown exponent regime '" + name + "'");
}

double predicted_exponent(ExponentRegime regime, const ExponentParams& p) {
    validate(regime, p);
    switch (regime) {
        case ExponentRegime::PlanarOvercrowd: {
            const double m = *p.m;
            require(m >= 2.0, regime, "requires m >= 2");
            return 0.5 * m * m * std::log(m);
        }
        case ExponentRegime::MaxModPlanarUpper: {
            const double m = *p.m;
            require(m > 1.0, regime, "requires m > 1");
            return 2.0 * m * m / std::log(m);
        }
        case ExponentRegime::HyperbolicLowerStated:
        case ExponentRegime::MaxModHyperbolicUpper:
        case ExponentRegime::HyperbolicLowerProof:
        case ExponentRegime::HyperbolicUpperKappa: {
            const double m = *p.m;
            const double r = *p.r;
            require(m >= 1.0, regime, "requires m >= 1");
            require(r > 0.0 && r < 1.0, regime, "requires 0 < r < 1");
            const double L = std::abs(std::log(r));
            if (regime == ExponentRegime::HyperbolicLowerProof) return m * (m + 1.0) * L;
            if (regime == ExponentRegime::HyperbolicUpperKappa) return kappa(r).kappa * m * m * L * L;
            return m * m / L;
        }
        case ExponentRegime::VeryLarge: {
            const double r = *p.r;
            const double a = *p.alpha;
            const double g = *p.gamma;
            require(a > 2.0, regime, "requires alpha > 2");
            require(r > 1.0, regime, "requires r > 1");
            require(g > 0.0, regime, "requires gamma > 0");
            return (0.5 * a - 1.0) * g * g * std::pow(r, 2.0 * a) * std::log(r);
        }
        case ExponentRegime::Moderate: {
            const double r = *p.r;
            const double a = *p.alpha;
            const double g = *p.gamma;
            require(a > 1.0 && a < 2.0, regime, "requires 1 < alpha < 2");
            require(r > 0.0, regime, "requires r > 0");
            require(g > 0.0, regime, "requires gamma > 0");
            return g * g * g * std::pow(r, 3.0 * a - 2.0);
        }
        case ExponentRegime::SodinTsirelsonMaxMod: {
            const double t = *p.t;
            const double eps = *p.eps;
            require(t > 0.0, regime, "requires t > 0");
            require(eps > 0.0, regime, "requires eps > 0");
            return std::exp(eps * t * t);
        }
    }
    throw DomainError("unhandled exponent regime");
}

// ---------------------------------------------------------------------------

PoissonKernelConstants poisson_kernel_constants(double r, double eps) {
    if (!(r > 0.0)) throw DomainError("Poisson kernel requires r > 0");
    if (!(eps > 0.0 && eps < r)) throw DomainError("Poisson kernel constants require 0 < eps < r");
    return {(r + eps) / (r - eps), (r - eps) / (r + eps)};
}

double poisson_kernel(double r, double theta, double w_re, double w_im) {
    const double w2 = w_re * w_re + w_im * w_im;
    if (!(w2 < r * r)) throw DomainError("Poisson kernel requires |w| < r");
    const double dx = r * std::cos(theta) - w_re;
    const double dy = r * std::sin(theta) - w_im;
    return (r * r - w2) / (dx * dx + dy * dy);
}

KappaResult kappa(double r, double tol) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("kappa requires 0 < r < 1");
    auto g = [r](double e) {
        const double b = (r - e) / (r + e);
        return b * b / -std::log(e);
    };
    // Coarse scan to locate the basin, then golden-section refinement.
    constexpr int kScan = 4096;
    int best = 1;
    double best_val = g(r / kScan);
    for (int k = 2; k < kScan; ++k) {
        const double v = g(r * k / kScan);
        if (v > best_val) {
            best_val = v;
            best = k;
        }
    }
    double a = r * (best - 1) / kScan;
    double b = r * (best + 1) / kScan;
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = g(x1);
    double f2 = g(x2);
    // Below a few ulps of r the bracket cannot shrink further.
    const double floor_tol = std::max(tol, 8.0 * std::numeric_limits<double>::epsilon() * r);
    for (int it = 0; it < 400 && b - a > floor_tol; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = g(x1);
        }
    }
    const double e = 0.5 * (a + b);
    return {g(e), e};
}

// ---------------------------------------------------------------------------

GinibreBrackets ginibre_thm21_brackets(double r, std::size_t m) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    const double x = r * r;
    const double md = static_cast<double>(m);
    if (m < 1 || md < x) throw DomainError("ginibre_thm21_brackets requires m >= max(1, r^2)");

    GinibreBrackets out;
    out.log_lower = 0.5 * md * (md + 1.0) * std::log(0.5 * x) - sum_n_log_n(m).exact;

    // Indices n <= r^2 have no valid Chernoff bound; use p_n <= 1 there.
    double log_product = 0.0;
    for (std::size_t n = 1; n <= m; ++n) {
        const double nd = static_cast<double>(n);
        if (nd > x) log_product += poisson_tail_log_upper(x, nd);
    }
    const double log_head = log_binomial(md * md, md) + log_product;

    // sum_{n > m^2} of the Chernoff bound; term ratio <= e x / (n+1).
    double log_residual = kNegInf;
    const std::size_t first = m * m + 1;
    for (std::size_t n = first;; ++n) {
        const double nd = static_cast<double>(n);
        const double term = poisson_tail_log_upper(x, nd);
        log_residual = log_add(log_residual, term);
        const double q = std::exp(1.0) * x / (nd + 1.0);
        if (q < 0.5) {
            const double remainder = term + std::log(q) - std::log1p(-q);
            if (remainder < log_residual - 40.0) {
                log_residual = log_add(log_residual, remainder);
                break;
            }
        }
    }
    out.log_upper = log_add(log_head, log_residual);
    return out;
}

HyperbolicSandwich hyperbolic_one_sandwich(double r, std::size_t m) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("hyperbolic sandwich requires 0 < r < 1");
    if (m < 1) throw DomainError("hyperbolic sandwich requires m >= 1");
    const double md = static_cast<double>(m);
    const double lr = std::log(r);
    HyperbolicSandwich out;
    out.log_lower = md * (md + 1.0) * lr;
    out.log_upper = log_add(log_binomial(md * md, md) + md * (md + 1.0) * lr,
                            (2.0 * md * md + 2.0) * lr - std::log1p(-r * r));
    return out;
}

HyperbolicLowerCheck hyperbolic_lower_check(double r, std::size_t m) {
    if (!(r > 0.0 && r < 1.0)) throw DomainError("hyperbolic check requires 0 < r < 1");
    const double md = static_cast<double>(m);
    HyperbolicLowerCheck out;
    ExponentParams params;
    params.m = md;
    params.r = r;
    out.log_stated = -predicted_exponent(ExponentRegime::HyperbolicLowerStated, params);
    out.log_proof = -predicted_exponent(ExponentRegime::HyperbolicLowerProof, params);
    const LogBracket exact =
        poisson_binomial_tail_log(bernoulli_probs(RadialEnsemble::HyperbolicOne, r), m);
    out.log_exact_lower = exact.log_lower;
    out.log_exact_upper = exact.log_upper;
    out.stated_exceeds_exact = out.log_stated > exact.log_upper;
    return out;
}

}  // namespace gafz
