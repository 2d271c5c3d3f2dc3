#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>

#include "gafzeros/gaf.hpp"
#include "gafzeros/radial.hpp"
#include "gafzeros/rare_event.hpp"

namespace gafz {

/// What is being simulated: a GAF (zeros counted by winding number) or one
/// of the exact radial ensembles (points counted from the radial law).
using PointProcess = std::variant<GafModel, RadialEnsemble>;

enum class TailMethod { ExactDP, MonteCarlo, EventLowerBound };

std::string to_string(TailMethod method);

struct TailEstimate {
    double log_p = 0.0;
    double log_lo = 0.0;
    double log_hi = 0.0;
    TailMethod method = TailMethod::MonteCarlo;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::size_t successes = 0;
    /// Replicas whose count stayed inconclusive after all retries (counted as failures).
    std::size_t inconclusive = 0;
    /// Total radius-perturbation retries over all replicas.
    std::size_t retries = 0;
};

struct McOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    double confidence = 0.99;
    int max_retries = 3;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Exact binomial interval for k successes out of n at the given two-sided confidence.
Interval clopper_pearson(std::size_t k, std::size_t n, double confidence);

/// Fraction of independent replicas with n(r) >= m. Replica i draws from
/// stream (seed, i), so results do not depend on the thread count.
TailEstimate direct_mc_tail(const PointProcess& process, double r, std::size_t m, const McOptions& options);

/// Exact tail for a radial ensemble: the Poisson-binomial DP bracket.
TailEstimate exact_tail(RadialEnsemble ens, double r, std::size_t m);

/// Event probability as a lower bound (log_hi = 0).
TailEstimate event_lower_bound(const EventSpec& ev);

struct CountStats {
    double mean = 0.0;
    double variance = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
    std::size_t inconclusive = 0;
    std::size_t retries = 0;
};

/// Mean and variance of n(r) over certified replicas.
CountStats mc_count_stats(const PointProcess& process, double r, const McOptions& options);

/// One replica of n(r) for a GAF: sampled with radius_of_use slightly beyond r,
/// truncation tail certified by Rouche. Throws InconclusiveError after retries.
struct GafCount {
    int count = 0;
    int retries = 0;
};
GafCount count_gaf_zeros(const GafModel& model, double r, RandomStream& rng, int max_retries = 3);

}  // namespace gafz
