#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "gafzeros/errors.hpp"
#include "gafzeros/gaf.hpp"
#include "gafzeros/zero_count.hpp"

using namespace gafz;

namespace {

// Monic polynomial with prescribed roots, expanded naively.
std::vector<cplx> from_roots(const std::vector<cplx>& roots) {
    std::vector<cplx> c{1.0};
    for (const cplx z : roots) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= z * c[k];
        }
        c = std::move(next);
    }
    return c;
}

double nearest_distance(const std::vector<cplx>& set, cplx z) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx w : set) best = std::min(best, std::abs(w - z));
    return best;
}

}  // namespace

TEST_CASE("winding count of polynomials with known roots") {
    const std::vector<cplx> roots{{0.3, 0.1}, {-0.5, 0.4}, {1.4, 0.0}, {0.0, -2.2}, {0.9, 0.9}};
    const Polynomial p(from_roots(roots));
    const Analytic f = as_analytic(p);
    for (double r : {0.2, 0.5, 1.0, 1.3, 1.5, 2.0, 3.0}) {
        const CountResult c = count_zeros_winding(f, r, 0.0);
        const auto expected = std::count_if(roots.begin(), roots.end(), [r](cplx z) { return std::abs(z) < r; });
        CHECK(c.count == expected);
        CHECK(c.certified);
        CHECK(c.min_modulus_lower_bound <= c.min_modulus_on_circle);
    }
}

TEST_CASE("winding count: a zero on the circle is inconclusive; retry recovers") {
    const Polynomial p(from_roots({{1.0, 0.0}, {0.2, 0.0}}));
    const Analytic f = as_analytic(p);
    CHECK_THROWS_AS(count_zeros_winding(f, 1.0, 1e-3), InconclusiveError);
    const CountResult c = count_zeros_with_retry(f, 1.0, 1e-9, 3);
    CHECK(c.count == 1);
    CHECK(c.retries >= 1);
    CHECK(c.radius < 1.0);
}

TEST_CASE("winding count without a derivative bound") {
    Analytic f;
    f.eval = [](cplx z) { return std::exp(z) * (z - 0.5) * (z + cplx(0.0, 0.7)); };
    CHECK(count_zeros_winding(f, 1.0, 0.0).count == 2);
    CHECK(count_zeros_winding(f, 0.6, 0.0).count == 1);
}

TEST_CASE("find_roots recovers prescribed roots") {
    RandomStream rng(17, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = 3 + static_cast<std::size_t>(rng.uniform() * 40.0);
        std::vector<cplx> roots;
        for (std::size_t k = 0; k < d; ++k) roots.push_back(std::polar(0.2 + 1.5 * rng.uniform(), 6.2832 * rng.uniform()));
        const RootsResult res = find_roots(from_roots(roots));
        REQUIRE(res.converged);
        REQUIRE(res.roots.size() == d);
        CHECK(res.max_relative_residual <= 1e-10);
        for (const cplx z : res.roots) CHECK(nearest_distance(roots, z) < 1e-6);
    }
}

TEST_CASE("find_roots edge cases") {
    CHECK_THROWS_AS(find_roots(std::vector<cplx>{0.0, 0.0}), DomainError);
    const RootsResult lin = find_roots(std::vector<cplx>{2.0, 4.0, 0.0});
    REQUIRE(lin.roots.size() == 1);
    CHECK(std::abs(lin.roots[0] + 0.5) < 1e-15);
    const RootsResult zeros = find_roots(std::vector<cplx>{0.0, 0.0, 1.0});
    CHECK(zeros.roots.size() == 2);
    CHECK(std::abs(zeros.roots[0]) == 0.0);
}

TEST_CASE("winding count equals the root count for random planar GAFs") {
    RandomStream rng(23, 0);
    for (int trial = 0; trial < 40; ++trial) {
        const double r = 0.5 + 2.5 * rng.uniform();
        const TruncatedGaf f = sample_truncated_gaf(GafModel::planar(), r * 1.5, rng);
        const RootsResult roots = find_roots(f.scaled_coefficients());
        REQUIRE(roots.converged);
        const CountResult c = count_zeros_with_retry(as_analytic(f), r, f.tail_sup_bound(r));
        CHECK(static_cast<std::size_t>(c.count) == count_in_disk(roots.roots, c.radius));
    }
}

TEST_CASE("circle mean of log|f|: Jensen for a known polynomial") {
    // For p(z) = (z - a)(z - b) with |a| < s < |b|: mean log|p| on |z|=s = log s + log|b|.
    const cplx a(0.3, 0.2);
    const cplx b(-2.0, 1.0);
    const Polynomial p(from_roots({a, b}));
    CHECK(circle_mean_log_abs(as_analytic(p), 1.0) == doctest::Approx(std::log(std::abs(b))).epsilon(1e-10));
    CHECK(circle_mean_log_abs(as_analytic(p), 3.0) == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("jensen_residual on random GAFs") {
    RandomStream rng(31, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const TruncatedGaf f = sample_truncated_gaf(GafModel::planar(), 2.5, rng);
        const JensenCheck j = jensen_residual(f, 1.0, 2.5);
        CHECK(j.residual < 1e-6);
        CHECK(static_cast<double>(j.n_r) * std::log(j.R / j.r) <= j.integral_n_over_u + 1e-12);
    }
    const TruncatedGaf f = sample_truncated_gaf(GafModel::planar(), 2.0, rng);
    CHECK_THROWS_AS(jensen_residual(f, 2.0, 1.0), DomainError);
}

TEST_CASE("Rouche certification against a dominating leading term") {
    CoefficientDraw d;
    d.values = {0.01, 0.01, 10.0, 0.01};
    const TruncatedGaf f(GafModel::planar(), d, 1.0);
    CHECK(rouche_certify(f, 1.0, 1e-3));
    CHECK_FALSE(rouche_certify(f, 1.0, 100.0));
}

TEST_CASE("max_modulus against a dense grid oracle") {
    RandomStream rng(41, 0);
    const TruncatedGaf f = sample_truncated_gaf(GafModel::planar(), 2.0, rng);
    const double mm = max_modulus(as_analytic(f), 2.0);
    double grid = 0.0;
    constexpr int kGrid = 200000;
    for (int k = 0; k < kGrid; ++k) {
        grid = std::max(grid, std::abs(f.evaluate(std::polar(2.0, 2.0 * std::numbers::pi * k / kGrid))));
    }
    CHECK(mm >= grid * (1.0 - 1e-12));
    CHECK(mm <= grid * (1.0 + 1e-6));
}
