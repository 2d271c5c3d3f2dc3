#pragma once

#include <cstddef>
#include <limits>
#include <span>

// Log-space numerical kernels. Overcrowding probabilities routinely reach
// e^{-10^5}, so nothing in the library materializes them linearly.
namespace gafz {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(e^a + e^b), exact for infinite arguments.
double log_add(double a, double b);

/// log(sum_i e^{x_i}); -inf for an empty span.
double log_sum_exp(std::span<const double> xs);

/// log(1 - e^a) for a <= 0.
double log1m_exp(double a);

/// log P[xi <= x] for xi ~ Exp(1), where x = e^{log_x}: log(1 - e^{-x}).
/// Accurate when x underflows (log_x << -745).
double log_exp_cdf(double log_x);

/// log of the regularized lower incomplete gamma P(s, x) = P[Gamma(s,1) <= x].
/// Series for x < s + 1, continued fraction for Q otherwise.
double log_gamma_p(double s, double x);

/// log of the regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double log_gamma_q(double s, double x);

/// log P[Gamma(s,1) <= x] with x supplied as log_x; usable when x underflows.
double log_gamma_p_from_log(double s, double log_x);

/// log C(n, k) via log-gamma.
double log_binomial(double n, double k);

/// Neumaier-compensated running sum.
class CompensatedSum {
  public:
    void add(double x);
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace gafz
