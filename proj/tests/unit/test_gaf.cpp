#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "gafzeros/errors.hpp"
#include "gafzeros/gaf.hpp"

using namespace gafz;

namespace {

// Naive oracle: sigma_n^2 r^{2n} summed term by term with the recurrence ratio.
double naive_weight_sum(const GafModel& model, double r, std::size_t from, std::size_t to) {
    double total = 0.0;
    for (std::size_t n = from; n <= to; ++n) {
        double w = 1.0;
        for (std::size_t k = 1; k <= n; ++k) {
            if (model.kind() == GafKind::Planar) w *= r * r / static_cast<double>(k);
            else w *= r * r * (static_cast<double>(k) - 1.0 + model.rho()) / static_cast<double>(k);
        }
        total += w;
    }
    return total;
}

}  // namespace

TEST_CASE("sigma values") {
    const auto planar = GafModel::planar();
    CHECK(sigma(planar, 0) == doctest::Approx(1.0));
    CHECK(sigma(planar, 4) == doctest::Approx(1.0 / std::sqrt(24.0)).epsilon(1e-14));
    const auto h1 = GafModel::hyperbolic(1.0);
    for (std::size_t n : {0u, 1u, 7u, 1000u}) CHECK(sigma(h1, n) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sigma(GafModel::hyperbolic(2.0), 3) == doctest::Approx(2.0).epsilon(1e-13));
    // Large n neither overflows nor underflows prematurely.
    CHECK(std::isfinite(planar.log_sigma(1'000'000)));
    CHECK(planar.log_sigma(1'000'000) < 0.0);
    CHECK(GafModel::hyperbolic(0.3).sigma(1'000'000) > 0.0);
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(GafModel::hyperbolic(0.0), DomainError);
    CHECK_THROWS_AS(GafModel::hyperbolic(-1.0), DomainError);
    CHECK_THROWS_AS(GafModel::hyperbolic(1.0).check_radius(1.0), DomainError);
    CHECK_THROWS_AS(GafModel::planar().check_radius(0.0), DomainError);
}

TEST_CASE("covariance closed forms") {
    const auto planar = GafModel::planar();
    CHECK(std::abs(covariance(planar, 0.0, cplx(1.3, -0.2)) - 1.0) < 1e-15);
    CHECK(covariance(GafModel::hyperbolic(1.0), 0.5, 0.5).real() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(covariance(GafModel::hyperbolic(1.0), 1.0, 1.0), DomainError);
    for (double r : {0.3, 1.0, 2.5}) {
        CHECK(covariance(planar, r, r).real() ==
              doctest::Approx(naive_weight_sum(planar, r, 0, 120)).epsilon(1e-13));
    }
}

TEST_CASE("normalization property: partial sum plus tail equals the covariance") {
    RandomStream rng(2024, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const bool hyper = trial % 2 == 1;
        const GafModel model = hyper ? GafModel::hyperbolic(0.2 + 3.0 * rng.uniform()) : GafModel::planar();
        const double r = hyper ? 0.05 + 0.9 * rng.uniform() : 0.1 + 4.0 * rng.uniform();
        const std::size_t N = static_cast<std::size_t>(rng.uniform() * 30.0);
        double head = 0.0;
        for (std::size_t n = 0; n <= N; ++n) head += std::exp(2.0 * (model.log_sigma(n) + n * std::log(r)));
        const double t = tail_sd(model, N, r);
        const double cov = covariance(model, r, r).real();
        CHECK(std::abs(head + t * t - cov) / cov < 1e-10);
    }
}

TEST_CASE("tail_sd examples") {
    CHECK(tail_sd(GafModel::planar(), 0, 1.0) == doctest::Approx(std::sqrt(std::exp(1.0) - 1.0)).epsilon(1e-13));
    CHECK(tail_sd(GafModel::hyperbolic(1.0), 9, 0.5) ==
          doctest::Approx(std::sqrt(std::pow(0.25, 10) / 0.75)).epsilon(1e-12));
    double prev = tail_sd(GafModel::planar(), 0, 2.0);
    for (std::size_t N = 1; N < 60; ++N) {
        const double cur = tail_sd(GafModel::planar(), N, 2.0);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("expected_count") {
    CHECK(expected_count(GafModel::planar(), 2.0) == doctest::Approx(4.0));
    CHECK(expected_count(GafModel::hyperbolic(1.0), 0.5) == doctest::Approx(1.0 / 3.0));
    CHECK(expected_count(GafModel::planar(), 1e-8) < 1e-15);
}

TEST_CASE("sampling: exponential law of |a|^2 and reproducibility") {
    RandomStream rng(11, 3);
    const auto draw = sample_coefficients(rng, 99'999);
    CHECK(draw.values.size() == 100'000);
    std::vector<double> sq;
    double mean = 0.0;
    for (auto a : draw.values) {
        sq.push_back(std::norm(a));
        mean += std::norm(a);
    }
    mean /= static_cast<double>(sq.size());
    CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(static_cast<double>(sq.size())));

    // Kolmogorov-Smirnov against 1 - e^{-x}, 1% critical value 1.628 / sqrt(n).
    std::sort(sq.begin(), sq.end());
    const double n = static_cast<double>(sq.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sq.size(); ++i) {
        const double F = -std::expm1(-sq[i]);
        d = std::max({d, std::abs(F - i / n), std::abs((i + 1) / n - F)});
    }
    CHECK(d < 1.628 / std::sqrt(n));

    RandomStream a(5, 9);
    RandomStream b(5, 9);
    const auto da = sample_coefficients(a, 40);
    const auto db = sample_coefficients(b, 40);
    CHECK(da.values == db.values);
    CHECK(da.stream == StreamId{5, 9});
    RandomStream c(5, 10);
    CHECK(sample_coefficients(c, 40).values != da.values);
}

TEST_CASE("evaluate: unit vectors and naive summation oracle") {
    const auto planar = GafModel::planar();
    CoefficientDraw e0;
    e0.values = {1.0, 0.0, 0.0};
    const TruncatedGaf f0(planar, e0, 3.0);
    CHECK(std::abs(f0.evaluate(cplx(1.2, 2.1)) - 1.0) < 1e-15);
    CoefficientDraw e1;
    e1.values = {0.0, 1.0, 0.0};
    const TruncatedGaf f1(planar, e1, 2.0);
    CHECK(std::abs(evaluate(f1, 2.0) - 2.0) < 1e-15);
    CHECK_THROWS_AS(f1.evaluate(2.1), DomainError);

    RandomStream rng(99, 0);
    for (const GafModel& model : {GafModel::planar(), GafModel::hyperbolic(1.7)}) {
        const double R = model.is_hyperbolic() ? 0.9 : 3.0;
        const TruncatedGaf f = sample_truncated_gaf(model, R, rng);
        for (int k = 0; k < 20; ++k) {
            const cplx z = std::polar(R * rng.uniform(), 6.283 * rng.uniform());
            cplx naive = 0.0;
            double scale = 0.0;
            for (std::size_t n = 0; n <= f.degree(); ++n) {
                const cplx term = f.coeffs().values[n] * model.sigma(n) * std::pow(z, static_cast<double>(n));
                naive += term;
                scale += std::abs(term);
            }
            CHECK(std::abs(f.evaluate(z) - naive) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("default truncation meets the relative tail tolerance") {
    for (double r : {0.5, 1.0, 3.0}) {
        const auto model = GafModel::planar();
        const std::size_t N = default_truncation(model, r);
        CHECK(tail_sd(model, N, r) <= 1e-9 * std::sqrt(covariance(model, r, r).real()));
        if (N > 0) CHECK(tail_sd(model, N - 1, r) > 1e-9 * std::sqrt(covariance(model, r, r).real()));
    }
}
