#include "gafzeros/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gafzeros/errors.hpp"
#include "gafzeros/logspace.hpp"

namespace gafz {

namespace {

void check_radius(RadialEnsemble ens, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    if (ens == RadialEnsemble::HyperbolicOne && !(r < 1.0)) {
        throw DomainError("hyperbolic rho=1 ensemble requires r < 1");
    }
}

double standard_normal(RandomStream& rng) {
    const double u = rng.uniform();
    const double v = rng.uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

// Gamma(shape, 1) for integer shape >= 1. Small shapes sum exponentials;
// larger ones use Marsaglia-Tsang squeeze rejection.
double gamma_variate(RandomStream& rng, std::size_t shape) {
    if (shape <= 16) {
        double s = 0.0;
        for (std::size_t k = 0; k < shape; ++k) s += rng.exponential();
        return s;
    }
    const double d = static_cast<double>(shape) - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = standard_normal(rng);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

}  // namespace

BernoulliProfile::BernoulliProfile(RadialEnsemble ens, double r, double eps)
    : ens_(ens), r_(r), log_neglected_(std::numeric_limits<double>::infinity()) {
    check_radius(ens, r);
    if (!(eps > 0.0 && eps <= 1e-3)) throw DomainError("eps must lie in (0, 1e-3]");
    const double log_eps = std::log(eps);
    do {
        push_next();
    } while (!(log_neglected_ < log_eps));
}

void BernoulliProfile::push_next() {
    const std::size_t n = log_p_.size() + 1;
    const double nd = static_cast<double>(n);
    if (ens_ == RadialEnsemble::Ginibre) {
        const double x = r_ * r_;
        log_p_.push_back(log_gamma_p(nd, x));
        log_q_.push_back(log_gamma_q(nd, x));
    } else {
        const double lp = 2.0 * nd * std::log(r_);
        log_p_.push_back(lp);
        log_q_.push_back(log1m_exp(lp));
    }
    log_neglected_ = log_neglected_after(n);
}

double BernoulliProfile::log_neglected_after(std::size_t N) const {
    const double Nd = static_cast<double>(N);
    if (ens_ == RadialEnsemble::HyperbolicOne) {
        return (2.0 * Nd + 2.0) * std::log(r_) - std::log1p(-r_ * r_);
    }
    // p_{n+1} <= p_n x / (n+1), so sum_{n>N} p_n <= p_N q / (1 - q), q = x / (N+1).
    const double q = r_ * r_ / (Nd + 1.0);
    if (!(q < 1.0)) return std::numeric_limits<double>::infinity();
    return log_p_[N - 1] + std::log(q) - std::log1p(-q);
}

std::vector<double> BernoulliProfile::probs() const {
    std::vector<double> out(log_p_.size());
    std::transform(log_p_.begin(), log_p_.end(), out.begin(), [](double lp) { return std::exp(lp); });
    return out;
}

double BernoulliProfile::neglected_mass() const { return std::exp(log_neglected_); }

void BernoulliProfile::extend_to(std::size_t N) {
    while (log_p_.size() < N) push_next();
}

BernoulliProfile bernoulli_probs(RadialEnsemble ens, double r, double eps) {
    return BernoulliProfile(ens, r, eps);
}

std::vector<double> sample_radii(RadialEnsemble ens, RandomStream& rng, std::size_t N) {
    if (N < 1) throw DomainError("sample_radii requires N >= 1");
    std::vector<double> radii(N);
    for (std::size_t n = 1; n <= N; ++n) {
        if (ens == RadialEnsemble::Ginibre) {
            radii[n - 1] = std::sqrt(gamma_variate(rng, n));
        } else {
            radii[n - 1] = std::exp(std::log(rng.uniform()) / (2.0 * static_cast<double>(n)));
        }
    }
    return radii;
}

std::size_t count_depth(RadialEnsemble ens, double r) {
    return BernoulliProfile(ens, r, 1e-15).size();
}

std::size_t count_below(RadialEnsemble ens, double r, RandomStream& rng, std::size_t depth) {
    check_radius(ens, r);
    const std::size_t N = depth == 0 ? count_depth(ens, r) : depth;
    const double x = r * r;
    const double log_r2 = std::log(x);
    std::size_t count = 0;
    for (std::size_t n = 1; n <= N; ++n) {
        if (ens == RadialEnsemble::HyperbolicOne) {
            if (std::log(rng.uniform()) < static_cast<double>(n) * log_r2) ++count;
            continue;
        }
        // Gamma(n,1) < x iff the first n of n fresh exponentials sum below x; stop early otherwise.
        double s = 0.0;
        std::size_t k = 0;
        while (k < n && s < x) {
            s += rng.exponential();
            ++k;
        }
        if (k == n && s < x) ++count;
    }
    return count;
}

namespace {

// state[k] = log P[S = k] for k < m; state[m] = log P[S >= m]
std::vector<double> dp_states(const std::vector<double>& log_p, const std::vector<double>& log_q,
                              std::size_t m) {
    std::vector<double> state(m + 1, kNegInf);
    state[0] = 0.0;
    for (std::size_t i = 0; i < log_p.size(); ++i) {
        state[m] = log_add(state[m], state[m - 1] + log_p[i]);
        for (std::size_t k = m - 1; k >= 1; --k) {
            state[k] = log_add(state[k] + log_q[i], state[k - 1] + log_p[i]);
        }
        state[0] += log_q[i];
    }
    return state;
}

}  // namespace

double poisson_binomial_tail_log_exact(const std::vector<double>& log_p,
                                       const std::vector<double>& log_q, std::size_t m) {
    if (m == 0) return 0.0;
    if (log_p.size() != log_q.size()) throw DomainError("log_p and log_q differ in length");
    return dp_states(log_p, log_q, m)[m];
}

namespace {

struct DpResult {
    double log_tail;
    double log_upper;
};

DpResult bracketed_dp(const BernoulliProfile& profile, std::size_t m) {
    const std::vector<double> state = dp_states(profile.log_probs(), profile.log_complements(), m);
    // P[S >= m] = P[S_N >= m] + sum_{k<m} P[S_N = k] P[T >= m - k]
    const double log_mu = profile.log_neglected_mass();
    double upper = state[m];
    for (std::size_t k = 0; k < m; ++k) {
        const double j = static_cast<double>(m - k);
        const double log_tail_t = std::min(0.0, j * log_mu - std::lgamma(j + 1.0));
        upper = log_add(upper, state[k] + log_tail_t);
    }
    return {state[m], upper};
}

}  // namespace

LogBracket poisson_binomial_tail_log(const BernoulliProfile& profile, std::size_t m, double max_width,
                                     std::size_t max_indices) {
    if (m == 0) return {0.0, 0.0, profile.size()};
    BernoulliProfile work = profile;
    work.extend_to(std::min(max_indices, m));
    for (;;) {
        const DpResult dp = bracketed_dp(work, m);
        LogBracket out{dp.log_tail, dp.log_upper, work.size()};
        if (out.width() <= max_width || work.size() >= max_indices) return out;
        work.extend_to(std::min(max_indices, work.size() + std::max<std::size_t>(8, work.size() / 4)));
    }
}

}  // namespace gafz
