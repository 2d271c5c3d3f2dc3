#include "gafzeros/logspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gafzeros/errors.hpp"

namespace gafz {

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> xs) {
    double hi = kNegInf;
    for (double x : xs) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    if (std::isinf(hi)) return hi;
    CompensatedSum acc;
    for (double x : xs) acc.add(std::exp(x - hi));
    return hi + std::log(acc.value());
}

double log1m_exp(double a) {
    if (a > 0.0) throw DomainError("log1m_exp: argument must be <= 0");
    if (a == 0.0) return kNegInf;
    if (a > -std::numbers::ln2) return std::log(-std::expm1(a));
    return std::log1p(-std::exp(a));
}

double log_exp_cdf(double log_x) {
    if (log_x == kNegInf) return kNegInf;
    if (log_x < -20.0) {
        // log(1 - e^{-x}) = log x - x/2 + x^2/24 - ...
        const double x = std::exp(log_x);
        return log_x - 0.5 * x;
    }
    const double x = std::exp(log_x);
    if (x < 700.0) return std::log(-std::expm1(-x));
    return -std::exp(-x);
}

namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 1000000;

// log sum_{k>=0} x^k / ((s+1)...(s+k)); requires x < s + 1.
double log_series_tail(double s, double x) {
    CompensatedSum sum;
    double term = 1.0;
    sum.add(term);
    for (int k = 1; k < kMaxIter; ++k) {
        term *= x / (s + k);
        sum.add(term);
        if (term < kEps * sum.value()) return std::log(sum.value());
    }
    throw InconclusiveError("incomplete gamma series did not converge");
}

// log Q(s, x) by modified Lentz continued fraction; requires x >= s + 1.
double log_q_continued_fraction(double s, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            return -x + s * std::log(x) - std::lgamma(s) + std::log(h);
        }
    }
    throw InconclusiveError("incomplete gamma continued fraction did not converge");
}

void check_shape(double s) {
    if (!(s > 0.0)) throw DomainError("incomplete gamma: shape must be > 0");
}

}  // namespace

double log_gamma_p_from_log(double s, double log_x) {
    check_shape(s);
    if (log_x == kNegInf) return kNegInf;
    const double x = std::exp(log_x);
    if (x < s + 1.0) {
        return s * log_x - x - std::lgamma(s + 1.0) + log_series_tail(s, x);
    }
    return log1m_exp(log_q_continued_fraction(s, x));
}

double log_gamma_p(double s, double x) {
    if (x < 0.0) throw DomainError("incomplete gamma: x must be >= 0");
    if (x == 0.0) {
        check_shape(s);
        return kNegInf;
    }
    return log_gamma_p_from_log(s, std::log(x));
}

double log_gamma_q(double s, double x) {
    check_shape(s);
    if (x < 0.0) throw DomainError("incomplete gamma: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (x < s + 1.0) return log1m_exp(log_gamma_p(s, x));
    return log_q_continued_fraction(s, x);
}

double log_binomial(double n, double k) {
    if (k < 0.0 || k > n) throw DomainError("log_binomial: need 0 <= k <= n");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
    } else {
        comp_ += (x - t) + sum_;
    }
    sum_ = t;
}

}  // namespace gafz
