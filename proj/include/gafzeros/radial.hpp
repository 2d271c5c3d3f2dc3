#pragma once

#include <cstddef>
#include <vector>

#include "gafzeros/random.hpp"

// Exact radial laws of the two determinantal zero/eigenvalue processes.
// The number of points in D(0, r) is a sum of independent Bernoulli(p_n):
//   Ginibre:        p_n = P[Gamma(n,1) < r^2] = P[Pois(r^2) >= n]
//   hyperbolic, rho=1: p_n = r^{2n}
namespace gafz {

enum class RadialEnsemble { Ginibre, HyperbolicOne };

class BernoulliProfile {
  public:
    /// Indices 1..N with N the smallest count whose neglected mass bound is < eps.
    BernoulliProfile(RadialEnsemble ens, double r, double eps);

    RadialEnsemble ensemble() const noexcept { return ens_; }
    double radius() const noexcept { return r_; }
    std::size_t size() const noexcept { return log_p_.size(); }

    /// p_n for n = 1..size(), stored at [n-1].
    std::vector<double> probs() const;
    const std::vector<double>& log_probs() const noexcept { return log_p_; }
    /// log(1 - p_n), computed directly (not via 1 - p_n).
    const std::vector<double>& log_complements() const noexcept { return log_q_; }

    /// Upper bound for sum_{n > size()} p_n, and its log.
    double neglected_mass() const;
    double log_neglected_mass() const noexcept { return log_neglected_; }

    /// Append indices up to N (no-op if N <= size()).
    void extend_to(std::size_t N);

  private:
    void push_next();
    double log_neglected_after(std::size_t N) const;

    RadialEnsemble ens_;
    double r_;
    std::vector<double> log_p_;
    std::vector<double> log_q_;
    double log_neglected_;
};

BernoulliProfile bernoulli_probs(RadialEnsemble ens, double r, double eps = 1e-12);

/// Radii of the first N points of the radial law (not sorted).
/// Ginibre: sqrt of independent Gamma(n,1); hyperbolic rho=1: U_n^{1/(2n)}.
std::vector<double> sample_radii(RadialEnsemble ens, RandomStream& rng, std::size_t N);

/// Index depth N with sum_{n>N} p_n < 1e-15; deeper indices are ignored by count_below.
std::size_t count_depth(RadialEnsemble ens, double r);

/// Number of points in D(0, r) for one draw of the process over indices
/// 1..depth, without materializing radii. depth = 0 means count_depth(ens, r).
std::size_t count_below(RadialEnsemble ens, double r, RandomStream& rng, std::size_t depth = 0);

struct LogBracket {
    double log_lower = 0.0;
    double log_upper = 0.0;
    /// Number of Bernoulli indices used by the DP.
    std::size_t indices = 0;

    double width() const noexcept { return log_upper - log_lower; }
};

/// log P[sum_n Bern(p_n) >= m]. The lower end is the exact DP over the
/// profile's indices; the upper end adds the worst case of the neglected
/// indices, using P[T >= j] <= mu^j / j! for their sum T with mean mu.
/// The profile is extended (on a copy) until the width is <= max_width or
/// max_indices is reached.
LogBracket poisson_binomial_tail_log(const BernoulliProfile& profile, std::size_t m,
                                     double max_width = 1e-6, std::size_t max_indices = 100000);

/// Exact DP over exactly the given log-probabilities (no neglected mass).
double poisson_binomial_tail_log_exact(const std::vector<double>& log_p,
                                       const std::vector<double>& log_q, std::size_t m);

}  // namespace gafz
