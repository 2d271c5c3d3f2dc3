#include <cmath>
#include <vector>

#include "doctest.h"
#include "gafzeros/errors.hpp"
#include "gafzeros/rare_event.hpp"
#include "gafzeros/zero_count.hpp"

using namespace gafz;

namespace {

// Direct oracle for the domination constant (planar weight n).
double planar_C_direct(double r, std::size_t m) {
    const auto model = GafModel::planar();
    const double lead = std::log(static_cast<double>(m)) + model.log_sigma(m) + m * std::log(r);
    double s = 0.0;
    for (std::size_t n = m + 1; n < m + 2000; ++n) {
        s += std::exp(std::log(static_cast<double>(n)) + model.log_sigma(n) + n * std::log(r) - lead);
    }
    return s;
}

EventSpec single(Bound bound, double c) {
    EventSpec ev;
    ev.model = GafModel::planar();
    ev.r = 1.0;
    ev.m = 0;
    MagnitudeBlock b;
    b.first = 0;
    b.last = 0;
    b.bound = bound;
    b.rule = ThresholdRule::constant(c);
    b.label = "only";
    ev.blocks.push_back(b);
    return ev;
}

// Draw, check membership and domination, and count zeros by winding.
void check_samples(const EventSpec& ev, int draws, std::uint64_t seed) {
    const std::size_t N = event_truncation(ev);
    const double tail = event_tail_bound(ev, N);
    int violations = 0;
    int dominated = 0;
    int counted = 0;
    for (int i = 0; i < draws; ++i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        const CoefficientDraw d = conditioned_sample(ev, rng, N);
        violations += !satisfies(ev, d);
        dominated += verify_domination(ev, d);
        const TruncatedGaf f(ev.model, d, ev.r * (1.0 + 1e-9));
        const CountResult c = count_zeros_winding(as_analytic(f), ev.r, tail);
        counted += c.certified && static_cast<std::size_t>(c.count) == ev.m;
    }
    CHECK(violations == 0);
    CHECK(dominated == draws);
    CHECK(counted == draws);
}

}  // namespace

TEST_CASE("domination constant") {
    for (double r : {0.5, 1.0, 2.0}) {
        for (std::size_t m : {1u, 5u, 20u}) {
            CHECK(domination_constant(GafModel::planar(), r, m) == doctest::Approx(planar_C_direct(r, m)).epsilon(1e-12));
        }
        double prev = domination_constant(GafModel::planar(), r, 5);
        for (std::size_t m = 6; m < 60; ++m) {
            const double c = domination_constant(GafModel::planar(), r, m);
            CHECK(c < prev);
            prev = c;
        }
    }
    CHECK(std::isfinite(domination_constant(GafModel::hyperbolic(2.0), 0.9, 3)));
    CHECK_THROWS_AS(domination_constant(GafModel::planar(), 1.0, 0), DomainError);
}

TEST_CASE("planar builder thresholds") {
    const EventSpec ev = build_planar_domination(2.0, 8);
    REQUIRE(ev.blocks.size() == 3);
    const double C = *ev.params.C;
    const auto& low = ev.blocks[0];
    const auto& lead = ev.blocks[1];
    const auto& high = ev.blocks[2];
    CHECK(lead.bound == Bound::AtLeast);
    CHECK(std::exp(lead.rule.log_c(8, 8)) == doctest::Approx((C + 1.0) * 8.0).epsilon(1e-8));
    CHECK(std::exp(lead.rule.log_c(8, 8)) > (C + 1.0) * 8.0);
    for (std::size_t n = 0; n < 8; ++n) {
        // c_n sigma_n r^n sits just below sigma_m r^m.
        const double lhs = low.rule.log_c(n, 0) + ev.model.log_sigma(n) + n * std::log(2.0);
        const double rhs = ev.model.log_sigma(8) + 8 * std::log(2.0);
        CHECK(lhs < rhs);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
    CHECK_FALSE(high.last.has_value());
    CHECK(std::exp(high.rule.log_c(20, 9)) == doctest::Approx(20.0));
    CHECK(domination_budget(ev).implies_domination());

    const EventSpec one = build_planar_domination(0.3, 1);
    CHECK(one.blocks[0].last == 0u);
    CHECK(domination_budget(one).implies_domination());

    BuildOptions weak;
    weak.alpha_override = 0.0;
    CHECK_FALSE(domination_budget(build_planar_domination(2.0, 8, weak)).implies_domination());
    CHECK_THROWS_AS(build_planar_domination(2.0, 0), DomainError);
}

TEST_CASE("moderate event groups") {
    const EventSpec ev = build_moderate(20.0, 1.5, 1.0);
    const std::size_t p = *ev.params.p;
    const std::size_t M = *ev.params.M;
    CHECK(p == static_cast<std::size_t>(std::ceil(2.0 * std::log(4.0) * std::sqrt(20.0))));
    CHECK(M == static_cast<std::size_t>(std::floor(400.0 - std::pow(20.0, 1.5))));
    // Every index from 0 to 2r^2 is covered exactly once (B is the aggregate).
    for (std::size_t n = 0; n <= 900; ++n) {
        const bool in_agg = ev.aggregate && n >= ev.aggregate->first && n <= ev.aggregate->last;
        CHECK((ev.block_of(n).has_value() != in_agg));
    }
    // Group thresholds double from one group to the next.
    std::vector<double> a_levels;
    for (const auto& b : ev.blocks) {
        if (b.label[0] == 'A') a_levels.push_back(b.rule.log_value);
    }
    for (std::size_t i = 1; i < a_levels.size(); ++i) CHECK(a_levels[i - 1] - a_levels[i] == doctest::Approx(std::log(2.0)));
    CHECK(domination_budget(ev).implies_domination());
    CHECK_THROWS_AS(build_moderate(20.0, 2.5, 1.0), DomainError);
    CHECK_THROWS_AS(build_moderate(1.0, 1.5, 1.0), DomainError);
}

TEST_CASE("very-large event") {
    const EventSpec ev = build_very_large(3.0, 3.0, 1.0);
    CHECK(ev.m == static_cast<std::size_t>(std::ceil(9.0 + 27.0)));
    CHECK(*ev.params.lambda <= 1.0);
    CHECK(domination_budget(ev).implies_domination());
    CHECK_THROWS_AS(build_very_large(3.0, 2.0, 1.0), DomainError);
}

TEST_CASE("event probabilities") {
    CHECK(event_log_prob(single(Bound::AtLeast, 1.0)).exact == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(event_log_prob(single(Bound::AtMost, 1.0)).exact ==
          doctest::Approx(std::log1p(-std::exp(-1.0))).epsilon(1e-14));
    // x/2 lower form for a small threshold.
    const auto small = event_log_prob(single(Bound::AtMost, 0.1));
    CHECK(small.bound_form == doctest::Approx(std::log(0.005)).epsilon(1e-14));
    CHECK(small.exact >= small.bound_form);
    for (const EventSpec& ev : {build_planar_domination(1.0, 10), build_hyperbolic_domination(1.0, 0.6, 4),
                                build_very_large(3.0, 3.0, 1.0), build_moderate(20.0, 1.5, 1.0)}) {
        const EventProbability p = event_log_prob(ev);
        CHECK(std::isfinite(p.exact));
        CHECK(p.exact < 0.0);
        CHECK(p.exact >= p.bound_form);
    }
}

TEST_CASE("validation rejects malformed events") {
    EventSpec ev = single(Bound::AtMost, 1.0);
    ev.blocks.push_back(ev.blocks[0]);
    CHECK_THROWS_AS(validate_event(ev), DomainError);
    EventSpec open = single(Bound::AtLeast, 1.0);
    open.blocks[0].last.reset();
    CHECK_THROWS_AS(validate_event(open), DomainError);
    EventSpec flat = single(Bound::AtMost, 1.0);
    flat.blocks[0].last.reset();
    CHECK_THROWS_AS(validate_event(flat), DomainError);
}

TEST_CASE("conditioned sampling: truncated exponential oracle") {
    const EventSpec ev = single(Bound::AtMost, 1.0);
    double mean = 0.0;
    constexpr int kDraws = 100000;
    RandomStream rng(4, 0);
    for (int i = 0; i < kDraws; ++i) mean += std::norm(conditioned_sample(ev, rng, 0).values[0]) / kDraws;
    // E[X | X < 1] for X ~ Exp(1), variance < 1/12.
    const double expected = 1.0 - 1.0 / (std::exp(1.0) - 1.0);
    CHECK(std::abs(mean - expected) < 4.0 * std::sqrt(1.0 / 12.0 / kDraws));

    const EventSpec above = single(Bound::AtLeast, 2.0);
    double mean_above = 0.0;
    for (int i = 0; i < kDraws; ++i) mean_above += std::norm(conditioned_sample(above, rng, 0).values[0]) / kDraws;
    CHECK(std::abs(mean_above - 5.0) < 4.0 / std::sqrt(kDraws));
}

TEST_CASE("conditioned samples satisfy the event and force m zeros") {
    check_samples(build_planar_domination(2.0, 16), 200, 1);
    check_samples(build_planar_domination(0.5, 1), 200, 2);
    check_samples(build_hyperbolic_domination(1.0, 0.6, 4), 200, 3);
    check_samples(build_very_large(3.0, 3.0, 1.0), 50, 4);
}

TEST_CASE("moderate samples respect the aggregate constraint") {
    const EventSpec ev = build_moderate(20.0, 1.5, 1.0);
    const std::size_t N = event_truncation(ev);
    for (int i = 0; i < 5; ++i) {
        RandomStream rng(9, static_cast<std::uint64_t>(i));
        const CoefficientDraw d = conditioned_sample(ev, rng, N);
        CHECK(satisfies(ev, d));
        CHECK(verify_domination(ev, d));
        double agg = 0.0;
        for (std::size_t n = ev.aggregate->first; n <= ev.aggregate->last; ++n) agg += std::norm(d.values[n]);
        CHECK(std::log(agg) <= ev.aggregate->log_s);
    }
}

TEST_CASE("an adversarial sample is rejected") {
    const EventSpec ev = build_planar_domination(2.0, 6);
    const std::size_t N = event_truncation(ev);
    RandomStream rng(5, 0);
    CoefficientDraw d = conditioned_sample(ev, rng, N);
    d.values[6] = 0.0;
    CHECK_FALSE(satisfies(ev, d));
    CHECK_FALSE(verify_domination(ev, d));
}
