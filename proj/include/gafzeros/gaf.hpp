#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gafzeros/random.hpp"

namespace gafz {

using cplx = std::complex<double>;

enum class GafKind { Planar, Hyperbolic };

/// Which Gaussian analytic function: the planar series sum a_n z^n / sqrt(n!)
/// or the hyperbolic series sum |(-rho choose n)|^{1/2} a_n z^n on the unit disk.
///
/// The coefficient weight sigma_n satisfies sum sigma_n^2 r^{2n} = e^{r^2}
/// (planar) and (1 - r^2)^{-rho} (hyperbolic). Weights are computed through
/// log-gamma so that large n neither overflows nor underflows early.
class GafModel {
  public:
    static GafModel planar() { return GafModel(GafKind::Planar, 0.0); }
    static GafModel hyperbolic(double rho);

    GafKind kind() const noexcept { return kind_; }
    bool is_hyperbolic() const noexcept { return kind_ == GafKind::Hyperbolic; }
    /// Only meaningful for hyperbolic models.
    double rho() const noexcept { return rho_; }

    double log_sigma(std::size_t n) const;
    double sigma(std::size_t n) const;

    /// Throws DomainError unless r > 0 (and r < 1 when hyperbolic).
    void check_radius(double r) const;

    friend bool operator==(const GafModel&, const GafModel&) = default;

  private:
    GafModel(GafKind kind, double rho) : kind_(kind), rho_(rho) {}

    GafKind kind_;
    double rho_;
};

double sigma(const GafModel& model, std::size_t n);

/// Covariance sum sigma_n^2 z^n conj(w)^n in closed form.
cplx covariance(const GafModel& model, cplx z, cplx w);

/// a_0..a_N, i.i.d. standard complex normal with E|a|^2 = 1.
struct CoefficientDraw {
    std::vector<cplx> values;
    StreamId stream;
};

CoefficientDraw sample_coefficients(RandomStream& rng, std::size_t N);

/// sqrt(sum_{n>N} sigma_n^2 r^{2n}).
double tail_sd(const GafModel& model, std::size_t N, double r);

/// sum_{n>N} sigma_n r^n, the l1 weight of the discarded tail on |z| = r.
double tail_abs_sum(const GafModel& model, std::size_t N, double r);

/// Expected number of zeros in D(0, r): r^2 planar, rho r^2 / (1 - r^2) hyperbolic.
double expected_count(const GafModel& model, double r);

/// Smallest N with tail_sd(model, N, r) <= rel_tol * sqrt(covariance(r, r)).
std::size_t default_truncation(const GafModel& model, double r, double rel_tol = 1e-9);

/// A sampled polynomial truncation of a GAF, valid for use on |z| <= radius_of_use.
class TruncatedGaf {
  public:
    // Per-sample tail bound multiplier: sup_{|z|=r} |tail| <= kTailSigmas * tail_abs_sum
    // fails only if some discarded |a_n| exceeds kTailSigmas (probability ~ e^{-100}).
    static constexpr double kTailSigmas = 10.0;

    TruncatedGaf(GafModel model, CoefficientDraw coeffs, double radius_of_use);

    const GafModel& model() const noexcept { return model_; }
    const CoefficientDraw& coeffs() const noexcept { return coeffs_; }
    double radius_of_use() const noexcept { return radius_; }
    double tail_sd() const noexcept { return tail_sd_; }
    std::size_t degree() const noexcept { return coeffs_.values.size() - 1; }

    /// c_n = a_n sigma_n, the polynomial coefficients in the monomial basis.
    std::span<const cplx> scaled_coefficients() const noexcept { return scaled_; }

    /// Horner evaluation; throws DomainError for |z| > radius_of_use.
    cplx evaluate(cplx z) const;

    /// Practical almost-sure bound on sup_{|z|=r} of the discarded tail.
    double tail_sup_bound(double r) const;

  private:
    GafModel model_;
    CoefficientDraw coeffs_;
    double radius_;
    double tail_sd_;
    std::vector<cplx> scaled_;
};

/// Draw a truncated GAF for use on |z| <= radius; N defaults to default_truncation.
TruncatedGaf sample_truncated_gaf(const GafModel& model, double radius, RandomStream& rng,
                                  std::optional<std::size_t> N = std::nullopt);

cplx evaluate(const TruncatedGaf& f, cplx z);

}  // namespace gafz
