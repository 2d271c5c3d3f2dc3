#include "gafzeros/rare_event.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "gafzeros/errors.hpp"
#include "gafzeros/logspace.hpp"

namespace gafz {

namespace {

// Thresholds are pulled toward the smaller event by this relative amount so
// that rounding in the probability and the domination budget cannot matter.
constexpr double kShrink = 1e-9;
const double kLogShrink = std::log1p(-kShrink);
const double kLogGrow = std::log1p(kShrink);

// Relative slack when checking a stored complex coefficient against its bound.
constexpr double kMembershipSlack = 1e-12;

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::pair<EventKind, const char*>, 4> kKindNames{{
    {EventKind::PlanarDomination, "PlanarDomination"},
    {EventKind::HyperbolicDomination, "HyperbolicDomination"},
    {EventKind::VeryLargeDomination, "VeryLargeDomination"},
    {EventKind::ModerateGrouped, "ModerateGrouped"},
}};

// log(sigma_n r^n)
double log_weight(const EventSpec& ev, std::size_t n) {
    return ev.model.log_sigma(n) + static_cast<double>(n) * std::log(ev.r);
}

// Upper bound on sup_{j >= n} c_{j+1} sigma_{j+1} r / (c_j sigma_j) for an unbounded rule.
double sup_term_ratio(const GafModel& model, double r, const ThresholdRule& rule, std::size_t n) {
    const double nd = static_cast<double>(n);
    double c_ratio = 1.0;
    switch (rule.form) {
        case ThresholdRule::Form::Affine:
            c_ratio = 1.0 + rule.slope / (rule.slope * nd + rule.offset);
            break;
        case ThresholdRule::Form::Sqrt:
            c_ratio = std::sqrt((nd + 1.0) / nd);
            break;
        default:
            break;
    }
    double s_ratio = 0.0;
    if (model.kind() == GafKind::Planar) {
        s_ratio = 1.0 / std::sqrt(nd + 1.0);
    } else {
        s_ratio = std::max(1.0, std::sqrt((nd + model.rho()) / (nd + 1.0)));
    }
    return c_ratio * s_ratio * r;
}

// log sum_{n >= start} c_n sigma_n r^n over an unbounded AtMost block.
// The running sum is kept relative to the largest term seen so far.
double log_unbounded_weighted_sum(const EventSpec& ev, const MagnitudeBlock& b, std::size_t start) {
    double log_scale = b.rule.log_c(start, b.first) + log_weight(ev, start);
    CompensatedSum sum;
    for (std::size_t n = start; n < start + 50'000'000; ++n) {
        const double lt = b.rule.log_c(n, b.first) + log_weight(ev, n);
        if (lt > log_scale) {
            const double shrink = std::exp(log_scale - lt);
            CompensatedSum rescaled;
            rescaled.add(sum.value() * shrink);
            sum = rescaled;
            log_scale = lt;
        }
        sum.add(std::exp(lt - log_scale));
        const double q = sup_term_ratio(ev.model, ev.r, b.rule, n + 1);
        const double next = std::exp(b.rule.log_c(n + 1, b.first) + log_weight(ev, n + 1) - log_scale);
        if (q < 1.0 && next / (1.0 - q) <= 1e-17 * sum.value()) {
            sum.add(next / (1.0 - q));
            return log_scale + std::log(sum.value());
        }
    }
    throw InconclusiveError("weighted tail sum did not converge");
}

// sum_{n >= start} log(1 - e^{-c_n^2}) and sum e^{-c_n^2} over an unbounded AtMost block.
// Both sums carry a certified remainder (increments of c_n^2 are nondecreasing
// for affine and sqrt rules, so the ratio e^{-(c_{n+1}^2 - c_n^2)} is nonincreasing).
struct UnboundedLogProb {
    double exact = 0.0;
    double small_bound = 0.0;   // sum over c_n^2 < 1 of log(c_n^2 / 2)
    double union_mass = 0.0;    // sum over c_n^2 >= 1 of e^{-c_n^2}
    double pooled_exact = 0.0;  // sum over c_n^2 >= 1 of log(1 - e^{-c_n^2})
};

UnboundedLogProb unbounded_log_prob(const MagnitudeBlock& b) {
    UnboundedLogProb out;
    CompensatedSum exact;
    CompensatedSum pooled;
    CompensatedSum mass;
    for (std::size_t n = b.first; n < b.first + 50'000'000; ++n) {
        const double lc2 = 2.0 * b.rule.log_c(n, b.first);
        const double c2 = std::exp(lc2);
        const double term = log_exp_cdf(lc2);
        exact.add(term);
        if (c2 < 1.0) {
            out.small_bound += lc2 - std::numbers::ln2;
        } else {
            pooled.add(term);
            mass.add(std::exp(-c2));
        }
        const double c2_next = std::exp(2.0 * b.rule.log_c(n + 1, b.first));
        const double c2_next2 = std::exp(2.0 * b.rule.log_c(n + 2, b.first));
        const double q = std::exp(-(c2_next2 - c2_next));
        const double head = std::exp(-c2_next);
        if (c2_next >= 1.0 && head <= 0.5 && q < 1.0) {
            const double remainder = 2.0 * head / (1.0 - q);
            if (remainder < 1e-17) {
                exact.add(-remainder);
                pooled.add(-remainder);
                mass.add(remainder);
                break;
            }
        }
    }
    out.exact = exact.value();
    out.pooled_exact = pooled.value();
    out.union_mass = mass.value();
    return out;
}

std::size_t block_last_or(const MagnitudeBlock& b, std::size_t fallback) { return b.last ? *b.last : fallback; }

}  // namespace

// ---------------------------------------------------------------------------
// ThresholdRule, EventSpec helpers
// ---------------------------------------------------------------------------

ThresholdRule ThresholdRule::constant(double c) {
    ThresholdRule t;
    t.form = Form::Constant;
    t.log_value = std::log(c);
    return t;
}

ThresholdRule ThresholdRule::explicit_log(std::vector<double> log_c) {
    ThresholdRule t;
    t.form = Form::Explicit;
    t.log_explicit = std::move(log_c);
    return t;
}

ThresholdRule ThresholdRule::affine(double slope, double offset) {
    ThresholdRule t;
    t.form = Form::Affine;
    t.slope = slope;
    t.offset = offset;
    return t;
}

ThresholdRule ThresholdRule::sqrt(double scale) {
    ThresholdRule t;
    t.form = Form::Sqrt;
    t.scale = scale;
    return t;
}

double ThresholdRule::log_c(std::size_t n, std::size_t first) const {
    switch (form) {
        case Form::Constant:
            return log_value;
        case Form::Explicit:
            return log_explicit.at(n - first);
        case Form::Affine:
            return std::log(slope * static_cast<double>(n) + offset);
        case Form::Sqrt:
            return std::log(scale) + 0.5 * std::log(static_cast<double>(n));
    }
    return kNegInf;
}

std::string to_string(EventKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "Unknown";
}

EventKind event_kind_from_string(const std::string& name) {
    for (const auto& [k, label] : kKindNames) {
        if (name == label) return k;
    }
    throw DomainError("unknown event kind '" + name + "'");
}

std::optional<std::size_t> EventSpec::block_of(std::size_t n) const {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (blocks[i].contains(n)) return i;
    }
    return std::nullopt;
}

std::size_t EventSpec::last_finite_index() const {
    std::size_t last = m;
    for (const auto& b : blocks) {
        if (b.last) last = std::max(last, *b.last);
        else last = std::max(last, b.first);
    }
    if (aggregate) last = std::max(last, aggregate->last);
    return last;
}

void validate_event(const EventSpec& ev) {
    ev.model.check_radius(ev.r);
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    constexpr std::size_t kOpen = std::numeric_limits<std::size_t>::max();
    for (const auto& b : ev.blocks) {
        const std::size_t last = block_last_or(b, kOpen);
        if (last < b.first) throw DomainError("event block '" + b.label + "' is empty");
        ranges.emplace_back(b.first, last);
        if (b.rule.form == ThresholdRule::Form::Explicit &&
            (!b.last || b.rule.log_explicit.size() != last - b.first + 1)) {
            throw DomainError("event block '" + b.label + "' has a mismatched explicit threshold list");
        }
        if (!b.last) {
            if (b.bound == Bound::AtLeast) {
                throw DomainError("unbounded AtLeast block '" + b.label + "' has probability zero");
            }
            const bool growing = (b.rule.form == ThresholdRule::Form::Affine && b.rule.slope > 0.0) ||
                                 (b.rule.form == ThresholdRule::Form::Sqrt && b.rule.scale > 0.0);
            if (!growing) {
                throw DomainError("unbounded block '" + b.label + "' needs a growing threshold");
            }
        }
        const std::size_t probe_last = b.last ? *b.last : b.first + 1;
        for (std::size_t n = b.first; n <= probe_last; ++n) {
            const double lc = b.rule.log_c(n, b.first);
            if (!(std::isfinite(lc))) {
                throw DomainError("event block '" + b.label + "' has a non-finite or non-positive threshold");
            }
        }
    }
    if (ev.aggregate) {
        if (ev.aggregate->last < ev.aggregate->first) throw DomainError("aggregate block is empty");
        if (!std::isfinite(ev.aggregate->log_s)) throw DomainError("aggregate bound must be positive");
        ranges.emplace_back(ev.aggregate->first, ev.aggregate->last);
    }
    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 1; i < ranges.size(); ++i) {
        if (ranges[i].first <= ranges[i - 1].second) throw DomainError("event blocks overlap");
    }
}

// ---------------------------------------------------------------------------
// Domination constant and builders
// ---------------------------------------------------------------------------

double domination_constant(const GafModel& model, double r, std::size_t m) {
    if (m < 1) throw DomainError("domination_constant requires m >= 1");
    model.check_radius(r);
    EventSpec probe;
    probe.model = model;
    probe.r = r;
    probe.m = m;
    MagnitudeBlock tail;
    tail.first = m + 1;
    tail.rule = model.kind() == GafKind::Planar ? ThresholdRule::affine(1.0, 0.0) : ThresholdRule::sqrt(1.0);
    const double log_lead = tail.rule.log_c(m, tail.first) + log_weight(probe, m);
    const double C = std::exp(log_unbounded_weighted_sum(probe, tail, m + 1) - log_lead);
    if (!std::isfinite(C)) throw DomainError("domination constant overflows at this radius");
    return C;
}

namespace {

MagnitudeBlock lead_block(std::size_t m, double threshold) {
    MagnitudeBlock b;
    b.first = m;
    b.last = m;
    b.bound = Bound::AtLeast;
    b.rule = ThresholdRule::constant(threshold);
    b.rule.log_value += kLogGrow;
    b.label = "lead";
    return b;
}

// |a_n| sigma_n r^n < scale sigma_m r^m for 0 <= n < m.
MagnitudeBlock low_block(const EventSpec& ev, double log_scale) {
    MagnitudeBlock b;
    b.first = 0;
    b.last = ev.m - 1;
    b.bound = Bound::AtMost;
    std::vector<double> log_c(ev.m);
    const double lead = log_weight(ev, ev.m);
    for (std::size_t n = 0; n < ev.m; ++n) log_c[n] = log_scale + lead - log_weight(ev, n) + kLogShrink;
    b.rule = ThresholdRule::explicit_log(std::move(log_c));
    b.label = "low";
    return b;
}

MagnitudeBlock high_block(std::size_t m, ThresholdRule rule) {
    MagnitudeBlock b;
    b.first = m + 1;
    b.bound = Bound::AtMost;
    b.rule = std::move(rule);
    b.label = "high";
    return b;
}

MagnitudeBlock constant_block(std::size_t first, std::size_t last, double c, std::string label) {
    MagnitudeBlock b;
    b.first = first;
    b.last = last;
    b.bound = Bound::AtMost;
    b.rule = ThresholdRule::constant(c);
    b.rule.log_value += kLogShrink;
    b.label = std::move(label);
    return b;
}

}  // namespace

EventSpec build_planar_domination(double r, std::size_t m, const BuildOptions& options) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    if (m < 1) throw DomainError("PlanarDomination requires m >= 1");
    EventSpec ev;
    ev.model = GafModel::planar();
    ev.r = r;
    ev.m = m;
    ev.kind = EventKind::PlanarDomination;
    const double C = domination_constant(ev.model, r, m);
    const double alpha = options.alpha_override.value_or(C);
    if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
    ev.params.C = C;
    ev.params.alpha = alpha;
    const double md = static_cast<double>(m);
    ev.blocks.push_back(low_block(ev, 0.0));
    ev.blocks.push_back(lead_block(m, (alpha + 1.0) * md));
    ev.blocks.push_back(high_block(m, ThresholdRule::affine(1.0, 0.0)));
    validate_event(ev);
    return ev;
}

EventSpec build_hyperbolic_domination(double rho, double r, std::size_t m) {
    if (m < 1) throw DomainError("HyperbolicDomination requires m >= 1");
    EventSpec ev;
    ev.model = GafModel::hyperbolic(rho);
    ev.model.check_radius(r);
    ev.r = r;
    ev.m = m;
    ev.kind = EventKind::HyperbolicDomination;
    const double C = domination_constant(ev.model, r, m);
    ev.params.C = C;
    ev.params.alpha = C;
    const double md = static_cast<double>(m);
    ev.blocks.push_back(low_block(ev, -0.5 * std::log(md)));
    ev.blocks.push_back(lead_block(m, (C + 1.0) * std::sqrt(md)));
    ev.blocks.push_back(high_block(m, ThresholdRule::sqrt(1.0)));
    validate_event(ev);
    return ev;
}

EventSpec build_very_large(double r, double alpha, double gamma) {
    if (!(alpha > 2.0)) throw DomainError("VeryLargeDomination requires alpha > 2");
    if (!(gamma > 0.0)) throw DomainError("VeryLargeDomination requires gamma > 0");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    const double excess = gamma * std::pow(r, alpha);
    EventSpec ev;
    ev.model = GafModel::planar();
    ev.r = r;
    ev.m = static_cast<std::size_t>(std::ceil(r * r + excess));
    ev.kind = EventKind::VeryLargeDomination;
    const double md = static_cast<double>(ev.m);
    const double C = domination_constant(ev.model, r, ev.m);
    // Low terms contribute at most gamma r^alpha; the high family |a_n| <= lambda n
    // contributes lambda C m <= r^2, so the total stays below m <= |a_m|.
    const double lambda = std::min(1.0, r * r / (C * md));
    ev.params.alpha = alpha;
    ev.params.gamma = gamma;
    ev.params.C = C;
    ev.params.lambda = lambda;
    ev.blocks.push_back(low_block(ev, std::log(excess / md)));
    ev.blocks.push_back(lead_block(ev.m, md));
    ev.blocks.push_back(high_block(ev.m, ThresholdRule::affine(lambda * (1.0 - kShrink), 0.0)));
    validate_event(ev);
    return ev;
}

EventSpec build_moderate(double r, double alpha, double gamma) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("ModerateGrouped requires 1 < alpha < 2");
    if (!(gamma > 0.0)) throw DomainError("ModerateGrouped requires gamma > 0");
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    const double excess = gamma * std::pow(r, alpha);
    const double x = r * r;
    const auto m = static_cast<std::size_t>(std::ceil(x + excess));
    const double M_real = std::floor(x - excess);
    const auto top = static_cast<std::size_t>(std::floor(2.0 * x));
    if (!(M_real >= 1.0) || top <= m) {
        throw DomainError("ModerateGrouped needs r^2 - gamma r^alpha >= 1 and 2 r^2 > m");
    }
    const auto M = static_cast<std::size_t>(M_real);
    const double Md = M_real;
    // Smallest C with e^{-gamma C} <= 1/4, and the group width p = 2 C r^{2 - alpha}.
    const double C = std::log(4.0) / gamma;
    const auto p = static_cast<std::size_t>(std::ceil(2.0 * C * std::pow(r, 2.0 - alpha)));
    const std::size_t K = (M + p - 1) / p;

    EventSpec ev;
    ev.model = GafModel::planar();
    ev.r = r;
    ev.m = m;
    ev.kind = EventKind::ModerateGrouped;
    ev.params.alpha = alpha;
    ev.params.gamma = gamma;
    ev.params.C = C;
    ev.params.M = M;
    ev.params.p = p;

    // A_k = (M - kp, M - (k-1)p], the last one extended down to 0.
    for (std::size_t k = K; k >= 1; --k) {
        const std::size_t hi = M - (k - 1) * p;
        const std::size_t lo = k == K ? 0 : M - k * p + 1;
        ev.blocks.push_back(
            constant_block(lo, hi, std::ldexp(1.0, static_cast<int>(k)) / Md, "A" + std::to_string(k)));
    }
    if (M + 1 <= m - 1) {
        const double log_s = std::log(16.0) + static_cast<double>(m) * std::log(x) - x -
                             std::lgamma(static_cast<double>(m) + 1.0) + kLogShrink;
        ev.aggregate = AggregateBlock{M + 1, m - 1, log_s, "B"};
    }
    const std::size_t lead_index = ev.blocks.size();
    ev.blocks.push_back(lead_block(m, 15.0));
    // D_k = (m + (k-1)p, m + kp], truncated at 2 r^2; continued until 2 r^2 is covered.
    for (std::size_t k = 1; m + (k - 1) * p < top; ++k) {
        const std::size_t lo = m + (k - 1) * p + 1;
        const std::size_t hi = std::min(top, m + k * p);
        ev.blocks.push_back(
            constant_block(lo, hi, std::ldexp(1.0, static_cast<int>(k)) / Md,
                           "D" + std::to_string(k)));
    }
    // C = (2 r^2, inf) with |a_n| < n - 2 r^2.
    ev.blocks.push_back(high_block(top, ThresholdRule::affine(1.0 - kShrink, -2.0 * x * (1.0 - kShrink))));
    ev.blocks.back().label = "C";

    // Raise the lead threshold if the group bounds need more than 15.
    const DominationBudget budget = domination_budget(ev);
    if (!(budget.others_over_lead < 15.0)) {
        ev.blocks[lead_index] = lead_block(m, budget.others_over_lead * (1.0 + 1e-6));
    }
    validate_event(ev);
    return ev;
}

// ---------------------------------------------------------------------------
// Pricing
// ---------------------------------------------------------------------------

EventProbability event_log_prob(const EventSpec& ev) {
    validate_event(ev);
    CompensatedSum exact;
    CompensatedSum bound;
    for (const auto& b : ev.blocks) {
        if (!b.last) {
            const UnboundedLogProb u = unbounded_log_prob(b);
            exact.add(u.exact);
            bound.add(u.small_bound);
            bound.add(u.union_mass < 1.0 ? std::log1p(-u.union_mass) : u.pooled_exact);
            continue;
        }
        if (b.bound == Bound::AtLeast) {
            for (std::size_t n = b.first; n <= *b.last; ++n) {
                const double c2 = std::exp(2.0 * b.rule.log_c(n, b.first));
                exact.add(-c2);
                bound.add(-c2);
            }
            continue;
        }
        double mass = 0.0;
        CompensatedSum pooled;
        for (std::size_t n = b.first; n <= *b.last; ++n) {
            const double lc2 = 2.0 * b.rule.log_c(n, b.first);
            const double term = log_exp_cdf(lc2);
            exact.add(term);
            if (lc2 < 0.0) {
                bound.add(lc2 - std::numbers::ln2);
            } else {
                pooled.add(term);
                mass += std::exp(-std::exp(lc2));
            }
        }
        bound.add(mass < 1.0 ? std::log1p(-mass) : pooled.value());
    }
    if (ev.aggregate) {
        const auto& a = *ev.aggregate;
        const double k = static_cast<double>(a.size());
        const double lp = log_gamma_p_from_log(k, a.log_s);
        exact.add(lp);
        const double s = std::exp(a.log_s);
        if (s < k) {
            // P[Y < s] >= phi(s/2) s/2 with phi the Gamma(k,1) density.
            const double half = a.log_s - std::numbers::ln2;
            bound.add(k * half - 0.5 * s - std::lgamma(k));
        } else {
            bound.add(lp);
        }
    }
    return {exact.value(), bound.value()};
}

// ---------------------------------------------------------------------------
// Domination budget and tails
// ---------------------------------------------------------------------------

namespace {

// sum over AtMost blocks restricted to indices > N (or all if N is nullopt),
// excluding the lead index, as log of sum c_n sigma_n r^n. Returns +inf if an
// uncovered index or an AtLeast block (other than the lead) contributes.
double log_constrained_mass(const EventSpec& ev, std::optional<std::size_t> above) {
    const std::size_t start_min = above ? *above + 1 : 0;
    double acc = kNegInf;
    for (const auto& b : ev.blocks) {
        if (b.last && *b.last < start_min) continue;
        const std::size_t start = std::max(b.first, start_min);
        if (b.bound == Bound::AtLeast) {
            const bool only_lead = b.last && b.first == ev.m && *b.last == ev.m;
            if (!only_lead) return kInf;
            continue;
        }
        if (!b.last) {
            acc = log_add(acc, log_unbounded_weighted_sum(ev, b, start));
            continue;
        }
        for (std::size_t n = start; n <= *b.last; ++n) {
            acc = log_add(acc, b.rule.log_c(n, b.first) + log_weight(ev, n));
        }
    }
    if (ev.aggregate && ev.aggregate->last >= start_min) {
        const auto& a = *ev.aggregate;
        double lw2 = kNegInf;
        for (std::size_t n = std::max(a.first, start_min); n <= a.last; ++n) {
            lw2 = log_add(lw2, 2.0 * log_weight(ev, n));
        }
        // Cauchy-Schwarz: sum |a_n| w_n <= sqrt(sum |a_n|^2 sum w_n^2)
        acc = log_add(acc, 0.5 * (a.log_s + lw2));
    }
    return acc;
}

bool covers_everything(const EventSpec& ev) {
    std::vector<std::pair<std::size_t, std::optional<std::size_t>>> ranges;
    for (const auto& b : ev.blocks) ranges.emplace_back(b.first, b.last);
    if (ev.aggregate) ranges.emplace_back(ev.aggregate->first, ev.aggregate->last);
    std::sort(ranges.begin(), ranges.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t next = 0;
    for (const auto& [first, last] : ranges) {
        if (first != next) return false;
        if (!last) return true;
        next = *last + 1;
    }
    return false;
}

}  // namespace

DominationBudget domination_budget(const EventSpec& ev) {
    DominationBudget out;
    const auto lead = ev.block_of(ev.m);
    if (lead && ev.blocks[*lead].bound == Bound::AtLeast) {
        out.lead_threshold = std::exp(ev.blocks[*lead].rule.log_c(ev.m, ev.blocks[*lead].first));
    }
    if (!covers_everything(ev)) {
        out.others_over_lead = kInf;
        return out;
    }
    out.others_over_lead = std::exp(log_constrained_mass(ev, std::nullopt) - log_weight(ev, ev.m));
    return out;
}

double event_tail_bound(const EventSpec& ev, std::size_t N) {
    if (N < ev.m) throw DomainError("event_tail_bound requires N >= m");
    return std::exp(log_constrained_mass(ev, N));
}

std::size_t event_truncation(const EventSpec& ev, double rel_tol) {
    const auto lead = ev.block_of(ev.m);
    double log_lead = log_weight(ev, ev.m);
    if (lead) log_lead += ev.blocks[*lead].rule.log_c(ev.m, ev.blocks[*lead].first);
    const double target = std::log(rel_tol) + log_lead;
    std::size_t N = ev.last_finite_index();
    while (log_constrained_mass(ev, N) > target) N += std::max<std::size_t>(1, N / 16);
    return N;
}

// ---------------------------------------------------------------------------
// Sampling and verification
// ---------------------------------------------------------------------------

namespace {

// |a|^2 ~ Exp(1) conditioned on [0, c^2] (AtMost) or [c^2, inf) (AtLeast).
double conditioned_square(RandomStream& rng, Bound bound, double log_c) {
    const double c2 = std::exp(2.0 * log_c);
    if (bound == Bound::AtLeast) return c2 + rng.exponential();
    const double mass = -std::expm1(-c2);
    const double xi = -std::log1p(-rng.uniform() * mass);
    return std::min(xi, c2);
}

// Y ~ Gamma(k,1) conditioned on Y <= s, by inverting the log CDF in log y.
double truncated_gamma(RandomStream& rng, double k, double log_s) {
    const double target = std::log(rng.uniform()) + log_gamma_p_from_log(k, log_s);
    double hi = log_s;
    double lo = log_s - 1.0;
    while (log_gamma_p_from_log(k, lo) > target) lo = hi - 2.0 * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (log_gamma_p_from_log(k, mid) > target) hi = mid;
        else lo = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace

CoefficientDraw conditioned_sample(const EventSpec& ev, RandomStream& rng, std::size_t N) {
    validate_event(ev);
    if (N < ev.last_finite_index()) throw DomainError("conditioned_sample needs N >= the last constrained index");
    CoefficientDraw draw;
    draw.stream = rng.id();
    draw.values.assign(N + 1, cplx{0.0});
    for (std::size_t n = 0; n <= N; ++n) {
        if (ev.aggregate && n == ev.aggregate->first) {
            const auto& a = *ev.aggregate;
            const std::size_t k = a.size();
            const double y = truncated_gamma(rng, static_cast<double>(k), a.log_s);
            std::vector<double> e(k);
            CompensatedSum total;
            for (auto& v : e) {
                v = rng.exponential();
                total.add(v);
            }
            // Dirichlet(1,...,1) split; the final rescale guards against rounding past s.
            const double scale = std::min(y / total.value(), std::exp(a.log_s) / total.value() * (1.0 - 1e-15));
            for (std::size_t i = 0; i < k; ++i) {
                draw.values[a.first + i] = std::sqrt(e[i] * scale) * rng.unit_phase();
            }
            n = a.last;
            continue;
        }
        const auto idx = ev.block_of(n);
        if (!idx) {
            draw.values[n] = rng.complex_normal();
            continue;
        }
        const auto& b = ev.blocks[*idx];
        const double xi = conditioned_square(rng, b.bound, b.rule.log_c(n, b.first));
        draw.values[n] = std::sqrt(xi) * rng.unit_phase();
    }
    return draw;
}

bool satisfies(const EventSpec& ev, const CoefficientDraw& sample) {
    const std::size_t N = sample.values.size() - 1;
    if (sample.values.empty() || N < ev.last_finite_index()) return false;
    const double slack = std::log1p(kMembershipSlack);
    for (std::size_t n = 0; n <= N; ++n) {
        const auto idx = ev.block_of(n);
        if (!idx) continue;
        const auto& b = ev.blocks[*idx];
        const double la = std::log(std::abs(sample.values[n]));
        const double lc = b.rule.log_c(n, b.first);
        if (b.bound == Bound::AtMost && la > lc + slack) return false;
        if (b.bound == Bound::AtLeast && la < lc - slack) return false;
    }
    if (ev.aggregate) {
        CompensatedSum s;
        for (std::size_t n = ev.aggregate->first; n <= ev.aggregate->last; ++n) s.add(std::norm(sample.values[n]));
        if (std::log(s.value()) > ev.aggregate->log_s + 2.0 * slack) return false;
    }
    return true;
}

bool verify_domination(const EventSpec& ev, const CoefficientDraw& sample) {
    if (!satisfies(ev, sample)) return false;
    const std::size_t N = sample.values.size() - 1;
    const double lead_log = log_weight(ev, ev.m);
    const double lead = std::abs(sample.values[ev.m]);
    const double tail = std::exp(log_constrained_mass(ev, N) - lead_log);

    // b_n = a_n sigma_n r^n / (sigma_m r^m); the circle |z| = r maps to |w| = 1.
    std::vector<cplx> b(N + 1, cplx{0.0});
    CompensatedSum others;
    double lipschitz = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
        if (n == ev.m) continue;
        b[n] = sample.values[n] * std::exp(log_weight(ev, n) - lead_log);
        others.add(std::abs(b[n]));
        lipschitz += static_cast<double>(n) * std::abs(b[n]);
    }
    if (others.value() + tail < lead * (1.0 - 1e-12)) return true;

    // Grid maximum of |sum_{n != m} b_n e^{i n theta}| plus the Lipschitz gap.
    for (std::size_t K = std::max<std::size_t>(4096, 8 * (N + 1)); K <= (std::size_t{1} << 20); K *= 4) {
        double grid_max = 0.0;
        for (std::size_t j = 0; j < K; ++j) {
            const cplx w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(K));
            cplx acc = b[N];
            for (std::size_t n = N; n-- > 0;) acc = acc * w + b[n];
            grid_max = std::max(grid_max, std::abs(acc));
        }
        const double sup = grid_max + lipschitz * std::numbers::pi / static_cast<double>(K) + tail;
        if (sup < lead * (1.0 - 1e-12)) return true;
        if (grid_max + tail >= lead) return false;
    }
    return false;
}

}  // namespace gafz
