#include "gafzeros/gaf.hpp"

#include <cmath>
#include <string>

#include "gafzeros/errors.hpp"
#include "gafzeros/logspace.hpp"

namespace gafz {

GafModel GafModel::hyperbolic(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw DomainError("hyperbolic GAF requires rho > 0, got " + std::to_string(rho));
    }
    return GafModel(GafKind::Hyperbolic, rho);
}

double GafModel::log_sigma(std::size_t n) const {
    const double nd = static_cast<double>(n);
    if (kind_ == GafKind::Planar) return -0.5 * std::lgamma(nd + 1.0);
    // |(-rho choose n)| = Gamma(n + rho) / (Gamma(n + 1) Gamma(rho))
    return 0.5 * (std::lgamma(nd + rho_) - std::lgamma(nd + 1.0) - std::lgamma(rho_));
}

double GafModel::sigma(std::size_t n) const { return std::exp(log_sigma(n)); }

void GafModel::check_radius(double r) const {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("radius must be positive and finite");
    if (is_hyperbolic() && !(r < 1.0)) throw DomainError("hyperbolic GAF requires radius < 1");
}

double sigma(const GafModel& model, std::size_t n) { return model.sigma(n); }

cplx covariance(const GafModel& model, cplx z, cplx w) {
    const cplx zw = z * std::conj(w);
    if (model.kind() == GafKind::Planar) return std::exp(zw);
    if (!(std::abs(zw) < 1.0)) throw DomainError("hyperbolic covariance requires |z conj(w)| < 1");
    return std::pow(1.0 - zw, -model.rho());
}

CoefficientDraw sample_coefficients(RandomStream& rng, std::size_t N) {
    CoefficientDraw draw;
    draw.stream = rng.id();
    draw.values.resize(N + 1);
    for (auto& a : draw.values) a = rng.complex_normal();
    return draw;
}

namespace {

// log sum_{n >= first} t_n where t_first = e^{log_first} and t_{n+1} = t_n ratio(n).
// sup_ratio(n) bounds ratio(j) for all j >= n; the loop stops once the geometric
// remainder bound is below 1e-17 of the running sum.
template <class Ratio, class SupRatio>
double log_tail_sum(double log_first, std::size_t first, Ratio ratio, SupRatio sup_ratio) {
    if (log_first == kNegInf) return kNegInf;
    CompensatedSum sum;
    double t = 1.0;
    for (std::size_t n = first; n < first + 100'000'000; ++n) {
        sum.add(t);
        const double next = t * ratio(n);
        const double q = sup_ratio(n + 1);
        if (q < 1.0 && next / (1.0 - q) <= 1e-17 * sum.value()) break;
        if (next < 1e-300) break;
        t = next;
    }
    return log_first + std::log(sum.value());
}

double log_weighted_tail(const GafModel& model, std::size_t N, double r, double power) {
    // sum_{n>N} sigma_n^power r^{power n}, power in {1, 2}
    const std::size_t first = N + 1;
    const double log_first = power * (model.log_sigma(first) + static_cast<double>(first) * std::log(r));
    if (model.kind() == GafKind::Planar) {
        auto ratio = [&](std::size_t n) {
            return std::pow(r, power) / std::pow(static_cast<double>(n) + 1.0, power / 2.0);
        };
        return log_tail_sum(log_first, first, ratio, ratio);
    }
    const double rho = model.rho();
    auto ratio = [&](std::size_t n) {
        const double nd = static_cast<double>(n);
        return std::pow(r, power) * std::pow((nd + rho) / (nd + 1.0), power / 2.0);
    };
    auto sup_ratio = [&](std::size_t n) { return rho >= 1.0 ? ratio(n) : std::pow(r, power); };
    return log_tail_sum(log_first, first, ratio, sup_ratio);
}

}  // namespace

double tail_sd(const GafModel& model, std::size_t N, double r) {
    model.check_radius(r);
    if (model.kind() == GafKind::Planar) {
        // sum_{n>N} r^{2n}/n! = e^{r^2} P[Pois(r^2) >= N+1] = e^{r^2} P(N+1, r^2)
        const double x = r * r;
        return std::exp(0.5 * (x + log_gamma_p(static_cast<double>(N) + 1.0, x)));
    }
    return std::exp(0.5 * log_weighted_tail(model, N, r, 2.0));
}

double tail_abs_sum(const GafModel& model, std::size_t N, double r) {
    model.check_radius(r);
    return std::exp(log_weighted_tail(model, N, r, 1.0));
}

double expected_count(const GafModel& model, double r) {
    model.check_radius(r);
    const double x = r * r;
    if (model.kind() == GafKind::Planar) return x;
    return model.rho() * x / (1.0 - x);
}

std::size_t default_truncation(const GafModel& model, double r, double rel_tol) {
    model.check_radius(r);
    const double target = rel_tol * std::sqrt(covariance(model, r, r).real());
    std::size_t N = 0;
    while (tail_sd(model, N, r) > target) ++N;
    return N;
}

TruncatedGaf::TruncatedGaf(GafModel model, CoefficientDraw coeffs, double radius_of_use)
    : model_(model), coeffs_(std::move(coeffs)), radius_(radius_of_use) {
    model_.check_radius(radius_);
    if (coeffs_.values.empty()) throw DomainError("truncated GAF needs at least one coefficient");
    tail_sd_ = gafz::tail_sd(model_, degree(), radius_);
    scaled_.resize(coeffs_.values.size());
    for (std::size_t n = 0; n < scaled_.size(); ++n) scaled_[n] = coeffs_.values[n] * model_.sigma(n);
}

cplx TruncatedGaf::evaluate(cplx z) const {
    if (std::abs(z) > radius_ * (1.0 + 1e-12)) {
        throw DomainError("evaluation point outside radius_of_use");
    }
    cplx acc = scaled_.back();
    for (std::size_t k = scaled_.size() - 1; k-- > 0;) acc = acc * z + scaled_[k];
    return acc;
}

double TruncatedGaf::tail_sup_bound(double r) const {
    if (r > radius_ * (1.0 + 1e-12)) throw DomainError("tail bound requested outside radius_of_use");
    return kTailSigmas * tail_abs_sum(model_, degree(), r);
}

TruncatedGaf sample_truncated_gaf(const GafModel& model, double radius, RandomStream& rng,
                                  std::optional<std::size_t> N) {
    const std::size_t degree = N ? *N : default_truncation(model, radius);
    return TruncatedGaf(model, sample_coefficients(rng, degree), radius);
}

cplx evaluate(const TruncatedGaf& f, cplx z) { return f.evaluate(z); }

}  // namespace gafz
