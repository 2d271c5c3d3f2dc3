#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gafzeros/gaf.hpp"
#include "gafzeros/random.hpp"

// Constructive coefficient events. Each event is an independent product of
// constraints on disjoint sets of coefficients, chosen so that on the event
// the m-th term strictly dominates the rest of the series on |z| = r; by
// Rouche the GAF then has exactly m zeros in D(0, r).
namespace gafz {

enum class EventKind { PlanarDomination, HyperbolicDomination, VeryLargeDomination, ModerateGrouped };

std::string to_string(EventKind kind);
EventKind event_kind_from_string(const std::string& name);

enum class Bound { AtMost, AtLeast };

/// Threshold c_n as a function of the index, stored in log form.
struct ThresholdRule {
    enum class Form { Constant, Explicit, Affine, Sqrt };

    Form form = Form::Constant;
    double log_value = 0.0;              // Constant: log c
    std::vector<double> log_explicit;    // Explicit: log c_n for n = first, first+1, ...
    double slope = 0.0, offset = 0.0;    // Affine: c_n = slope n + offset
    double scale = 0.0;                  // Sqrt: c_n = scale sqrt(n)

    static ThresholdRule constant(double c);
    static ThresholdRule explicit_log(std::vector<double> log_c);
    static ThresholdRule affine(double slope, double offset);
    static ThresholdRule sqrt(double scale);

    /// log c_n for an index n of a block starting at `first`.
    double log_c(std::size_t n, std::size_t first) const;
};

/// |a_n| <= c_n (AtMost) or |a_n| >= c_n (AtLeast) for every n in [first, last].
struct MagnitudeBlock {
    std::size_t first = 0;
    std::optional<std::size_t> last;  // inclusive; nullopt = unbounded
    Bound bound = Bound::AtMost;
    ThresholdRule rule;
    std::string label;

    bool contains(std::size_t n) const { return n >= first && (!last || n <= *last); }
};

/// sum_{n in [first, last]} |a_n|^2 <= s.
struct AggregateBlock {
    std::size_t first = 0;
    std::size_t last = 0;
    double log_s = 0.0;
    std::string label;

    std::size_t size() const { return last - first + 1; }
};

struct EventParams {
    std::optional<double> alpha;
    std::optional<double> gamma;
    /// Domination constant used by the construction.
    std::optional<double> C;
    /// Multiplier on the |a_n| <= n family (very-large event).
    std::optional<double> lambda;
    /// Moderate event: M and the group width p.
    std::optional<std::size_t> M;
    std::optional<std::size_t> p;
};

struct EventSpec {
    GafModel model = GafModel::planar();
    double r = 0.0;
    std::size_t m = 0;
    EventKind kind = EventKind::PlanarDomination;
    std::vector<MagnitudeBlock> blocks;
    std::optional<AggregateBlock> aggregate;
    EventParams params;

    /// Index of the block containing n, if any.
    std::optional<std::size_t> block_of(std::size_t n) const;
    /// Largest index covered by a bounded block or the aggregate.
    std::size_t last_finite_index() const;
};

/// Smallest C with sum_{n>m} w_n sigma_n r^n <= C w_m sigma_m r^m, where
/// w_n = n (planar) or sqrt(n) (hyperbolic). Summed with a certified remainder.
double domination_constant(const GafModel& model, double r, std::size_t m);

struct BuildOptions {
    /// PlanarDomination only: use |a_m| >= (alpha + 1) m with this alpha
    /// instead of the computed domination constant (the resulting event need
    /// not imply domination; verify_domination reports it).
    std::optional<double> alpha_override;
};

EventSpec build_planar_domination(double r, std::size_t m, const BuildOptions& options = {});
EventSpec build_hyperbolic_domination(double rho, double r, std::size_t m);
/// m = ceil(r^2 + gamma r^alpha), alpha > 2.
EventSpec build_very_large(double r, double alpha, double gamma);
/// m = ceil(r^2 + gamma r^alpha), M = floor(r^2 - gamma r^alpha), 1 < alpha < 2.
EventSpec build_moderate(double r, double alpha, double gamma);

/// Throws DomainError when blocks overlap, thresholds are not positive, or
/// an unbounded block has a rule whose product of probabilities vanishes.
void validate_event(const EventSpec& ev);

struct EventProbability {
    /// Exact log-probability (exponential and Gamma CDFs).
    double exact = 0.0;
    /// The same event priced with the simplifying lower bounds
    /// P[xi < x] >= x/2 (x < 1), union bounds, and phi(x/2) x/2 for the aggregate.
    double bound_form = 0.0;
};

EventProbability event_log_prob(const EventSpec& ev);

/// Upper bound on sum_{n != m} |a_n| sigma_n r^n implied by the event alone,
/// as a multiple of sigma_m r^m; and the lower bound on |a_m|.
struct DominationBudget {
    double others_over_lead = 0.0;
    double lead_threshold = 0.0;

    bool implies_domination() const { return others_over_lead < lead_threshold; }
};

DominationBudget domination_budget(const EventSpec& ev);

/// sup_{|z|=r} |sum_{n>N} a_n sigma_n z^n| on the event: sum_{n>N} c_n sigma_n r^n.
double event_tail_bound(const EventSpec& ev, std::size_t N);

/// Truncation depth N >= last_finite_index() with event_tail_bound below
/// rel_tol times the smallest admissible leading term.
std::size_t event_truncation(const EventSpec& ev, double rel_tol = 1e-12);

/// Coefficients a_0..a_N drawn from the exact conditional law given the event.
CoefficientDraw conditioned_sample(const EventSpec& ev, RandomStream& rng, std::size_t N);

/// True iff every coefficient in the draw satisfies its constraint.
bool satisfies(const EventSpec& ev, const CoefficientDraw& sample);

/// Confirms |a_m sigma_m z^m| > |sum_{n != m} a_n sigma_n z^n| + tail on |z| = r.
/// False means "not confirmed" (including samples that violate the event).
bool verify_domination(const EventSpec& ev, const CoefficientDraw& sample);

}  // namespace gafz
