#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gafzeros/gaf.hpp"

namespace gafz {

/// A function that can be evaluated on a circle. `derivative_bound(r)`, when
/// set, must return an upper bound for |f'| on |z| = r; it turns the winding
/// count and the minimum-modulus estimate into certified statements.
struct Analytic {
    std::function<cplx(cplx)> eval;
    std::function<double(double)> derivative_bound;
    /// Polynomial degree when known; 0 if unknown. Sets the initial circle grid.
    std::size_t degree_hint = 0;
};

/// Dense polynomial sum c_k z^k.
class Polynomial {
  public:
    explicit Polynomial(std::vector<cplx> coeffs);

    std::span<const cplx> coefficients() const noexcept { return coeffs_; }
    std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

    cplx operator()(cplx z) const;
    /// sum |c_k| r^k
    double abs_sum(double r) const;
    /// sum k |c_k| r^{k-1}, bounds |p'| on |z| = r.
    double derivative_bound(double r) const;

  private:
    std::vector<cplx> coeffs_;
};

Analytic as_analytic(Polynomial p);
Analytic as_analytic(const TruncatedGaf& f);

struct CountResult {
    int count = 0;
    bool certified = false;
    /// Minimum of |f| over the sampled nodes.
    double min_modulus_on_circle = 0.0;
    /// Certified lower bound for min |f| on the whole circle (requires a
    /// derivative bound; otherwise an empirical modulus-of-continuity estimate).
    double min_modulus_lower_bound = 0.0;
    std::size_t circle_nodes_used = 0;
    /// Radius actually used (differs from the request after a retry).
    double radius = 0.0;
    int retries = 0;
};

struct CountOptions {
    std::size_t initial_nodes = 64;
    std::size_t max_nodes = std::size_t{1} << 20;
};

/// Number of zeros of f in D(0, r) by the argument principle. The circle is
/// subdivided until every phase increment is below pi/2 (and, with a
/// derivative bound L, until L h < |f| at each node so no zero can hide
/// between nodes). `certified` means min |f| on the circle provably exceeds
/// `floor`. Throws InconclusiveError if some sampled |f| < floor or the node
/// cap is reached.
CountResult count_zeros_winding(const Analytic& f, double r, double floor,
                                const CountOptions& options = {});

/// count_zeros_winding with the radius perturbation policy: on an inconclusive
/// or uncertified count, retry at r (1 - k 1e-6), k = 1..max_retries, then throw.
CountResult count_zeros_with_retry(const Analytic& f, double r, double floor, int max_retries = 3,
                                   const CountOptions& options = {});

struct RootsResult {
    std::vector<cplx> roots;
    bool converged = false;
    std::size_t iterations = 0;
    /// max over roots of |p(z)| / sum |c_k| |z|^k
    double max_relative_residual = 0.0;
};

/// All roots of sum c_k z^k by Aberth-Ehrlich iteration from Newton-polygon
/// starting points, with a final Newton polish. Vanishing leading coefficients
/// are stripped; vanishing low-order coefficients give exact zero roots.
/// Throws DomainError for the zero polynomial.
RootsResult find_roots(std::span<const cplx> coeffs, std::size_t max_iterations = 500);

std::size_t count_in_disk(std::span<const cplx> roots, double r);

/// (1/2pi) int log|f(s e^{i theta})| d theta by nested trapezoid rules, doubling
/// until successive estimates differ by less than tol.
double circle_mean_log_abs(const Analytic& f, double s, double tol = 1e-10);

struct JensenCheck {
    double r = 0.0;
    double R = 0.0;
    double mean_log_R = 0.0;
    double mean_log_r = 0.0;
    /// int_r^R n(u)/u du, evaluated exactly from the roots.
    double integral_n_over_u = 0.0;
    double residual = 0.0;
    /// Number of roots in D(0, r).
    std::size_t n_r = 0;
};

JensenCheck jensen_residual(const TruncatedGaf& f, double r, double R, double tol = 1e-10);

/// True iff min_{|z|=r} |f_trunc| (minus the continuity margin) > tail_bound,
/// in which case the truncation and the full series have equally many zeros in D(0, r).
bool rouche_certify(const TruncatedGaf& f, double r, double tail_bound);

/// max |f| on |z| = r (equal to the disk maximum by the maximum principle).
double max_modulus(const Analytic& f, double r);

}  // namespace gafz
