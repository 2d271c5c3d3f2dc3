// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "gafzeros/bounds.hpp"
#include "gafzeros/errors.hpp"
#include "gafzeros/fit.hpp"
#include "gafzeros/montecarlo.hpp"
#include "gafzeros/radial.hpp"
#include "gafzeros/rare_event.hpp"
#include "gafzeros/zero_count.hpp"

using namespace gafz;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

Outcome ginibre_exponent() {
    std::vector<FitPoint> pts;
    double widest = 0.0;
    for (std::size_t m = 50; m <= 400; m += 50) {
        const LogBracket b = poisson_binomial_tail_log(bernoulli_probs(RadialEnsemble::Ginibre, 1.0), m);
        widest = std::max(widest, b.width());
        pts.push_back({static_cast<double>(m), -b.log_lower});
    }
    const FitResult f = exponent_fit(pts, FitBasis::MLogMPlusM2);
    const double c1 = f.coefficients[0];
    return {c1 >= 0.45 && c1 <= 0.55, fmt("c1=%.6f c2=%.6f max_width=%.2e", c1, f.coefficients[1], widest)};
}

Outcome ginibre_brackets() {
    int violations = 0;
    int checked = 0;
    for (double r : {0.5, 1.0, 2.0}) {
        const auto prof = bernoulli_probs(RadialEnsemble::Ginibre, r);
        for (int m = std::max(2, static_cast<int>(std::ceil(r * r))); m <= 40; ++m) {
            const LogBracket b = poisson_binomial_tail_log(prof, m);
            const GinibreBrackets g = ginibre_thm21_brackets(r, m);
            ++checked;
            violations += !(g.log_lower <= b.log_lower && b.log_upper <= g.log_upper);
        }
    }
    return {violations == 0, fmt("checked=%d violations=%d", checked, violations)};
}

Outcome hyperbolic_sandwich() {
    int violations = 0;
    int checked = 0;
    for (double r : {0.3, 0.5, 0.7}) {
        const auto prof = bernoulli_probs(RadialEnsemble::HyperbolicOne, r);
        for (std::size_t m = 1; m <= 30; ++m) {
            const LogBracket b = poisson_binomial_tail_log(prof, m);
            const HyperbolicSandwich s = hyperbolic_one_sandwich(r, m);
            ++checked;
            violations += !(s.log_lower <= b.log_lower && b.log_upper <= s.log_upper);
        }
    }
    return {violations == 0, fmt("checked=%d violations=%d", checked, violations)};
}

Outcome event_soundness() {
    const EventSpec ev = build_planar_domination(2.0, 16);
    const std::size_t N = event_truncation(ev);
    const double tail = event_tail_bound(ev, N);
    int failures = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
        RandomStream rng(20240416, i);
        const CoefficientDraw d = conditioned_sample(ev, rng, N);
        const TruncatedGaf f(ev.model, d, ev.r * (1.0 + 1e-9));
        bool ok = satisfies(ev, d) && verify_domination(ev, d);
        try {
            const CountResult c = count_zeros_winding(as_analytic(f), ev.r, tail);
            ok = ok && c.certified && c.count == 16;
        } catch (const InconclusiveError&) {
            ok = false;
        }
        failures += !ok;
    }
    return {failures == 0, fmt("C=%.6f N=%zu tail=%.2e failures=%d", *ev.params.C, N, tail, failures)};
}

Outcome planar_scale() {
    std::vector<double> ratios;
    for (std::size_t m : {50u, 100u, 150u, 200u}) {
        const double md = static_cast<double>(m);
        ratios.push_back(event_log_prob(build_planar_domination(1.0, m)).exact / (md * md * std::log(md)));
    }
    bool approaching = true;
    for (std::size_t i = 1; i < ratios.size(); ++i) {
        approaching = approaching && std::abs(ratios[i] + 0.5) < std::abs(ratios[i - 1] + 0.5);
    }
    const bool in_band = ratios.back() >= -0.60 && ratios.back() <= -0.40;
    return {in_band && approaching,
            fmt("ratios m=50..200: %.4f %.4f %.4f %.4f", ratios[0], ratios[1], ratios[2], ratios[3])};
}

Outcome very_large_scale() {
    std::vector<double> ratios;
    bool in_band = true;
    for (double r : {3.0, 4.0, 5.0}) {
        const double q = event_log_prob(build_very_large(r, 3.0, 1.0)).exact / (std::pow(r, 6.0) * std::log(r));
        ratios.push_back(q);
        in_band = in_band && q >= -0.80 && q <= -0.30;
    }
    const bool trend = std::abs(ratios[2] + 0.5) < std::abs(ratios[1] + 0.5) &&
                       std::abs(ratios[1] + 0.5) < std::abs(ratios[0] + 0.5);
    return {in_band && trend, fmt("ratios r=3,4,5: %.4f %.4f %.4f", ratios[0], ratios[1], ratios[2])};
}

Outcome moderate_scale() {
    std::vector<double> ratios;
    bool in_band = true;
    for (double r : {20.0, 30.0, 40.0}) {
        const double q = event_log_prob(build_moderate(r, 1.5, 1.0)).exact / std::pow(r, 2.5);
        ratios.push_back(q);
        in_band = in_band && q >= -1.8 && q <= -0.5;
    }
    const bool trend = std::abs(ratios[2] + 1.0) < std::abs(ratios[1] + 1.0) &&
                       std::abs(ratios[1] + 1.0) < std::abs(ratios[0] + 1.0);
    return {in_band && trend, fmt("ratios r=20,30,40: %.4f %.4f %.4f", ratios[0], ratios[1], ratios[2])};
}

Outcome mc_vs_exact() {
    McOptions o;
    o.trials = 1'000'000;
    o.seed = 1;
    o.threads = threads();
    const TailEstimate g = direct_mc_tail(RadialEnsemble::Ginibre, 1.0, 5, o);
    const TailEstimate ge = exact_tail(RadialEnsemble::Ginibre, 1.0, 5);
    const TailEstimate h = direct_mc_tail(RadialEnsemble::HyperbolicOne, 0.5, 3, o);
    const TailEstimate he = exact_tail(RadialEnsemble::HyperbolicOne, 0.5, 3);
    const bool ok = g.log_lo <= ge.log_p && ge.log_p <= g.log_hi && h.log_lo <= he.log_p && he.log_p <= h.log_hi;
    return {ok, fmt("ginibre [%.4f, %.4f] exact %.4f; hyperbolic [%.4f, %.4f] exact %.4f", g.log_lo, g.log_hi,
                    ge.log_p, h.log_lo, h.log_hi, he.log_p)};
}

Outcome counting_identities() {
    RandomStream rng(99, 0);
    int certified = 0;
    int winding_ok = 0;
    int jensen_ok = 0;
    int inequality_ok = 0;
    int attempts = 0;
    while (certified < 1000 && attempts < 5000) {
        ++attempts;
        const double r = 0.5 + 1.5 * rng.uniform();
        const double R = std::min(3.0, 1.5 * r);
        const TruncatedGaf f = sample_truncated_gaf(GafModel::planar(), R, rng);
        if (f.degree() > 200) continue;
        CountResult c;
        try {
            c = count_zeros_with_retry(as_analytic(f), r, f.tail_sup_bound(r));
        } catch (const InconclusiveError&) {
            continue;
        }
        ++certified;
        const RootsResult roots = find_roots(f.scaled_coefficients());
        winding_ok += roots.converged && static_cast<std::size_t>(c.count) == count_in_disk(roots.roots, c.radius);
        try {
            const JensenCheck j = jensen_residual(f, r, R);
            jensen_ok += j.residual < 1e-6;
            inequality_ok += static_cast<double>(j.n_r) * std::log(R / r) <= j.integral_n_over_u + 1e-12;
        } catch (const InconclusiveError&) {
            // Counted against both Jensen checks.
        }
    }
    const bool ok = certified == 1000 && winding_ok == 1000 && jensen_ok == 1000 && inequality_ok == 1000;
    return {ok, fmt("certified=%d winding=%d jensen=%d inequality=%d", certified, winding_ok, jensen_ok,
                    inequality_ok)};
}

Outcome intensity() {
    McOptions o;
    o.trials = 10'000;
    o.seed = 3;
    o.threads = threads();
    const CountStats p = mc_count_stats(GafModel::planar(), 3.0, o);
    const CountStats h = mc_count_stats(GafModel::hyperbolic(1.0), 0.5, o);
    const bool ok = p.mean >= 8.91 && p.mean <= 9.09 && std::abs(h.mean - 1.0 / 3.0) <= 3.0 * h.std_error;
    return {ok, fmt("planar n(3)=%.4f (n=%zu); hyperbolic n(0.5)=%.4f se=%.4f (n=%zu)", p.mean, p.samples, h.mean,
                    h.std_error, h.samples)};
}

// Numeric extremes of the Poisson kernel over |z| = r, |w| <= eps.
std::pair<double, double> kernel_extremes(double r, double eps) {
    double lo = 1e300;
    double hi = 0.0;
    auto golden = [](auto&& g, double a, double b) {
        const double k = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - k * (b - a);
        double x2 = a + k * (b - a);
        double f1 = g(x1);
        double f2 = g(x2);
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - k * (b - a);
                f1 = g(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + k * (b - a);
                f2 = g(x2);
            }
        }
        return g(0.5 * (a + b));
    };
    constexpr int kTheta = 1024;
    constexpr int kRadial = 32;
    const double h = 2.0 * std::numbers::pi / kTheta;
    for (int s = 0; s <= kRadial; ++s) {
        // Rotation invariance: put w on the positive real axis.
        const double w = eps * s / kRadial;
        auto P = [&](double th) { return poisson_kernel(r, th, w, 0.0); };
        int imin = 0;
        int imax = 0;
        for (int i = 1; i < kTheta; ++i) {
            if (P(i * h) < P(imin * h)) imin = i;
            if (P(i * h) > P(imax * h)) imax = i;
        }
        lo = std::min(lo, golden(P, (imin - 1) * h, (imin + 1) * h));
        hi = std::max(hi, -golden([&](double th) { return -P(th); }, (imax - 1) * h, (imax + 1) * h));
    }
    return {lo, hi};
}

Outcome kernel_and_kappa() {
    double worst_b = 0.0;
    double worst_a = 0.0;
    for (double r : {0.2, 0.5, 0.9, 1.0, 2.5}) {
        for (double frac : {0.05, 0.3, 0.6, 0.9}) {
            const double eps = frac * r;
            const auto [lo, hi] = kernel_extremes(r, eps);
            const PoissonKernelConstants c = poisson_kernel_constants(r, eps);
            worst_b = std::max(worst_b, std::abs(lo - c.B) / c.B);
            worst_a = std::max(worst_a, std::abs(hi - c.A) / c.A);
        }
    }
    double worst_k = 0.0;
    for (double r : {0.05, 0.2, 0.5, 0.8, 0.95}) {
        double grid = 0.0;
        constexpr int kGrid = 1'000'000;
        for (int i = 1; i < kGrid; ++i) {
            const double e = r * i / kGrid;
            const double b = (r - e) / (r + e);
            grid = std::max(grid, b * b / -std::log(e));
        }
        worst_k = std::max(worst_k, std::abs(kappa(r).kappa - grid) / grid);
    }
    const bool ok = worst_b <= 1e-8 && worst_a <= 1e-8 && worst_k <= 1e-8;
    return {ok, fmt("B rel err=%.2e A rel err=%.2e kappa rel err=%.2e", worst_b, worst_a, worst_k)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"ginibre exponent fit", ginibre_exponent},
        {"ginibre bracket containment", ginibre_brackets},
        {"hyperbolic rho=1 sandwich", hyperbolic_sandwich},
        {"planar domination event soundness", event_soundness},
        {"planar lower-bound scale", planar_scale},
        {"very-large deviation scale", very_large_scale},
        {"moderate deviation scale", moderate_scale},
        {"monte carlo vs exact", mc_vs_exact},
        {"counting identities", counting_identities},
        {"first intensity", intensity},
        {"poisson kernel and kappa", kernel_and_kappa},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::printf("%s %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                    secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
