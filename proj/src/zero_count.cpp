#include "gafzeros/zero_count.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <memory>
#include <numbers>

#include "gafzeros/errors.hpp"
#include "gafzeros/logspace.hpp"

namespace gafz {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuarterTurn = 0.5 * std::numbers::pi;

}  // namespace

Polynomial::Polynomial(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

cplx Polynomial::operator()(cplx z) const {
    cplx acc = coeffs_.back();
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
}

double Polynomial::abs_sum(double r) const {
    double acc = std::abs(coeffs_.back());
    for (std::size_t k = coeffs_.size() - 1; k-- > 0;) acc = acc * r + std::abs(coeffs_[k]);
    return acc;
}

double Polynomial::derivative_bound(double r) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) {
        acc = acc * r + static_cast<double>(k) * std::abs(coeffs_[k]);
    }
    return acc;
}

Analytic as_analytic(Polynomial p) {
    auto shared = std::make_shared<const Polynomial>(std::move(p));
    Analytic f;
    f.eval = [shared](cplx z) { return (*shared)(z); };
    f.derivative_bound = [shared](double r) { return shared->derivative_bound(r); };
    f.degree_hint = shared->degree();
    return f;
}

Analytic as_analytic(const TruncatedGaf& g) {
    auto shared = std::make_shared<const TruncatedGaf>(g);
    auto poly = std::make_shared<const Polynomial>(
        std::vector<cplx>(g.scaled_coefficients().begin(), g.scaled_coefficients().end()));
    Analytic f;
    f.eval = [shared](cplx z) { return shared->evaluate(z); };
    f.derivative_bound = [poly](double r) { return poly->derivative_bound(r); };
    f.degree_hint = g.degree();
    return f;
}

// ---------------------------------------------------------------------------
// Winding number
// ---------------------------------------------------------------------------

namespace {

struct Node {
    double theta;
    cplx value;
};

class CircleWalker {
  public:
    CircleWalker(const Analytic& f, double r, double floor, const CountOptions& options)
        : f_(f), r_(r), floor_(floor), options_(options) {
        if (f_.derivative_bound) lipschitz_ = f_.derivative_bound(r_);
    }

    CountResult run() {
        const std::size_t initial = std::max(options_.initial_nodes, 4 * (f_.degree_hint + 1));
        std::vector<Node> grid(initial + 1);
        for (std::size_t k = 0; k < initial; ++k) {
            const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(initial);
            grid[k] = {theta, at(theta)};
        }
        grid[initial] = {kTwoPi, grid[0].value};

        nodes_.push_back(grid[0]);
        for (std::size_t k = 0; k < initial; ++k) refine(grid[k], grid[k + 1], 0);

        CountResult out;
        out.radius = r_;
        out.circle_nodes_used = nodes_.size() - 1;
        out.min_modulus_on_circle = min_sampled_;
        out.min_modulus_lower_bound = lower_bound_;
        if (min_sampled_ < floor_) {
            throw InconclusiveError("sampled |f| below floor on the counting circle");
        }
        const double turns = phase_.value() / kTwoPi;
        const double rounded = std::round(turns);
        if (std::abs(turns - rounded) > 1e-6) {
            throw InconclusiveError("winding number is not an integer");
        }
        out.count = static_cast<int>(rounded);
        out.certified = lower_bound_ > floor_;
        return out;
    }

  private:
    cplx at(double theta) const { return f_.eval(std::polar(r_, theta)); }

    bool accept(const Node& a, const Node& b, double h) const {
        const double fa = std::abs(a.value);
        const double fb = std::abs(b.value);
        if (fa == 0.0 || fb == 0.0) return true;  // reported through min_sampled_
        if (std::abs(std::arg(b.value * std::conj(a.value))) >= kQuarterTurn) return false;
        if (lipschitz_ > 0.0) {
            // Arc image lies in the disk D(f(a), L h), which avoids 0.
            if (lipschitz_ * h >= fa) return false;
            if (std::min(fa, fb) - 0.5 * lipschitz_ * h <= floor_) return false;
        }
        return true;
    }

    void refine(const Node& a, const Node& b, int depth) {
        const double h = r_ * (b.theta - a.theta);
        if (!accept(a, b, h)) {
            if (depth >= 60 || min_sampled_ < floor_) {
                if (min_sampled_ >= floor_) {
                    throw InconclusiveError("circle refinement depth exhausted near a small |f|");
                }
                // Fall through: a sub-floor sample was already seen and will be reported.
            } else {
                const double mid_theta = 0.5 * (a.theta + b.theta);
                const Node mid{mid_theta, at(mid_theta)};
                note_sample(mid);
                refine(a, mid, depth + 1);
                refine(mid, b, depth + 1);
                return;
            }
        }
        note_sample(a);
        note_sample(b);
        phase_.add(std::arg(b.value * std::conj(a.value)));
        const double fa = std::abs(a.value);
        const double fb = std::abs(b.value);
        const double margin =
            lipschitz_ > 0.0 ? 0.5 * lipschitz_ * h : 0.5 * std::abs(b.value - a.value);
        lower_bound_ = std::min(lower_bound_, std::min(fa, fb) - margin);
        nodes_.push_back(b);
        if (nodes_.size() > options_.max_nodes) {
            throw InconclusiveError("circle node cap reached");
        }
    }

    void note_sample(const Node& n) { min_sampled_ = std::min(min_sampled_, std::abs(n.value)); }

    const Analytic& f_;
    double r_;
    double floor_;
    CountOptions options_;
    double lipschitz_ = 0.0;
    std::vector<Node> nodes_;
    CompensatedSum phase_;
    double min_sampled_ = std::numeric_limits<double>::infinity();
    double lower_bound_ = std::numeric_limits<double>::infinity();
};

}  // namespace

CountResult count_zeros_winding(const Analytic& f, double r, double floor,
                                const CountOptions& options) {
    if (!(r > 0.0)) throw DomainError("counting radius must be positive");
    if (!(floor >= 0.0)) throw DomainError("floor must be nonnegative");
    return CircleWalker(f, r, floor, options).run();
}

CountResult count_zeros_with_retry(const Analytic& f, double r, double floor, int max_retries,
                                   const CountOptions& options) {
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        const double radius = r * (1.0 - 1e-6 * attempt);
        try {
            CountResult res = count_zeros_winding(f, radius, floor, options);
            res.retries = attempt;
            if (res.certified) return res;
        } catch (const InconclusiveError&) {
        }
    }
    throw InconclusiveError("zero count inconclusive after radius perturbation retries");
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

namespace {

struct NewtonStep {
    cplx correction;         // p(z) / p'(z)
    double backward_error;   // |p(z)| / sum |c_k| |z|^k
};

// Horner for p, p' and the absolute-value scale. For |z| > 1 the reversed
// polynomial is used so that high powers of z never overflow.
NewtonStep newton_step(std::span<const cplx> c, cplx z) {
    const std::size_t d = c.size() - 1;
    const double az = std::abs(z);
    if (az <= 1.0) {
        cplx p = c[d];
        cplx dp = 0.0;
        double s = std::abs(c[d]);
        for (std::size_t k = d; k-- > 0;) {
            dp = dp * z + p;
            p = p * z + c[k];
            s = s * az + std::abs(c[k]);
        }
        return {p / dp, std::abs(p) / s};
    }
    const cplx y = 1.0 / z;
    const double ay = 1.0 / az;
    cplx q = c[0];
    cplx dq = 0.0;
    double s = std::abs(c[0]);
    for (std::size_t k = 1; k <= d; ++k) {
        dq = dq * y + q;
        q = q * y + c[k];
        s = s * ay + std::abs(c[k]);
    }
    // p(z) = z^d q(y),  p'/p = (d - y q'(y)/q(y)) / z
    const cplx log_derivative = (static_cast<double>(d) - y * dq / q) / z;
    return {1.0 / log_derivative, std::abs(q) / s};
}

std::vector<cplx> newton_polygon_start(std::span<const cplx> c) {
    const std::size_t d = c.size() - 1;
    std::vector<std::size_t> hull;
    auto height = [&](std::size_t k) { return std::log(std::abs(c[k])); };
    for (std::size_t k = 0; k <= d; ++k) {
        if (c[k] == cplx{0.0}) continue;
        while (hull.size() >= 2) {
            const std::size_t i = hull[hull.size() - 2];
            const std::size_t j = hull.back();
            const double cross = (static_cast<double>(j) - i) * (height(k) - height(i)) -
                                 (height(j) - height(i)) * (static_cast<double>(k) - i);
            if (cross >= 0.0) {
                hull.pop_back();
            } else {
                break;
            }
        }
        hull.push_back(k);
    }
    std::vector<cplx> start;
    start.reserve(d);
    constexpr double offset = 0.7;
    for (std::size_t s = 0; s + 1 < hull.size(); ++s) {
        const std::size_t i = hull[s];
        const std::size_t j = hull[s + 1];
        const double span = static_cast<double>(j - i);
        const double radius = std::exp((height(i) - height(j)) / span);
        for (std::size_t t = 0; t < j - i; ++t) {
            const double angle = kTwoPi * (static_cast<double>(t) / span + static_cast<double>(i) / d) +
                                 offset;
            start.push_back(std::polar(radius, angle));
        }
    }
    return start;
}

}  // namespace

RootsResult find_roots(std::span<const cplx> coeffs, std::size_t max_iterations) {
    std::size_t hi = coeffs.size();
    while (hi > 0 && coeffs[hi - 1] == cplx{0.0}) --hi;
    if (hi == 0) throw DomainError("find_roots: zero polynomial");
    std::size_t lo = 0;
    while (coeffs[lo] == cplx{0.0}) ++lo;

    RootsResult out;
    out.roots.assign(lo, cplx{0.0});
    const std::span<const cplx> c = coeffs.subspan(lo, hi - lo);
    const std::size_t d = c.size() - 1;
    if (d == 0) {
        out.converged = true;
        return out;
    }
    if (d == 1) {
        out.roots.push_back(-c[0] / c[1]);
        out.converged = true;
        return out;
    }

    std::vector<cplx> z = newton_polygon_start(c);
    std::vector<char> done(d, 0);
    const double tolerance = 8.0 * static_cast<double>(d) * DBL_EPSILON;
    std::size_t iter = 0;
    for (; iter < max_iterations; ++iter) {
        bool all_done = true;
        for (std::size_t i = 0; i < d; ++i) {
            if (done[i]) continue;
            const NewtonStep step = newton_step(c, z[i]);
            if (step.backward_error <= tolerance || !std::isfinite(std::abs(step.correction))) {
                done[i] = 1;
                continue;
            }
            all_done = false;
            cplx repulsion = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                if (j != i) repulsion += 1.0 / (z[i] - z[j]);
            }
            const cplx w = step.correction;
            const cplx delta = w / (1.0 - w * repulsion);
            z[i] -= delta;
            if (std::abs(delta) <= 2.0 * DBL_EPSILON * std::abs(z[i])) done[i] = 1;
        }
        if (all_done) break;
    }
    out.iterations = iter;

    // Newton polish, kept only where it lowers the backward error.
    for (auto& root : z) {
        for (int k = 0; k < 2; ++k) {
            const NewtonStep step = newton_step(c, root);
            const cplx candidate = root - step.correction;
            if (!std::isfinite(std::abs(candidate))) break;
            if (newton_step(c, candidate).backward_error < step.backward_error) {
                root = candidate;
            } else {
                break;
            }
        }
    }

    double worst = 0.0;
    for (const cplx root : z) worst = std::max(worst, newton_step(c, root).backward_error);
    out.max_relative_residual = worst;
    out.converged = worst <= 1e-10;
    out.roots.insert(out.roots.end(), z.begin(), z.end());
    return out;
}

std::size_t count_in_disk(std::span<const cplx> roots, double r) {
    return static_cast<std::size_t>(
        std::count_if(roots.begin(), roots.end(), [r](cplx z) { return std::abs(z) < r; }));
}

// ---------------------------------------------------------------------------
// Circle means, Jensen, Rouche, maximum modulus
// ---------------------------------------------------------------------------

double circle_mean_log_abs(const Analytic& f, double s, double tol) {
    if (!(s > 0.0)) throw DomainError("circle radius must be positive");
    constexpr std::size_t kMaxNodes = std::size_t{1} << 20;
    auto log_abs_at = [&](double theta) {
        const double v = std::abs(f.eval(std::polar(s, theta)));
        if (!(v >= 1e-300)) throw InconclusiveError("|f| below 1e-300 on the quadrature circle");
        return std::log(v);
    };
    std::size_t n = std::max<std::size_t>(64, 4 * (f.degree_hint + 1));
    CompensatedSum first;
    for (std::size_t k = 0; k < n; ++k) first.add(log_abs_at(kTwoPi * k / n));
    double estimate = first.value() / n;
    while (2 * n <= kMaxNodes) {
        CompensatedSum odd;
        for (std::size_t k = 0; k < n; ++k) odd.add(log_abs_at(kTwoPi * (k + 0.5) / n));
        const double refined = 0.5 * (estimate + odd.value() / n);
        n *= 2;
        if (std::abs(refined - estimate) < tol && n >= 256) return refined;
        estimate = refined;
    }
    throw InconclusiveError("circle mean of log|f| unstable at the node cap");
}

JensenCheck jensen_residual(const TruncatedGaf& f, double r, double R, double tol) {
    if (!(r > 0.0 && r < R)) throw DomainError("jensen_residual requires 0 < r < R");
    if (R > f.radius_of_use() * (1.0 + 1e-12)) throw DomainError("R exceeds radius_of_use");
    if (f.scaled_coefficients()[0] == cplx{0.0}) throw DomainError("jensen_residual requires f(0) != 0");

    const Analytic a = as_analytic(f);
    JensenCheck out;
    out.r = r;
    out.R = R;
    out.mean_log_R = circle_mean_log_abs(a, R, tol);
    out.mean_log_r = circle_mean_log_abs(a, r, tol);

    const RootsResult roots = find_roots(f.scaled_coefficients());
    if (!roots.converged) throw InconclusiveError("root finder did not converge");
    CompensatedSum integral;
    for (const cplx z : roots.roots) {
        const double az = std::abs(z);
        if (az < R) integral.add(std::log(R / std::max(r, az)));
    }
    out.integral_n_over_u = integral.value();
    out.n_r = count_in_disk(roots.roots, r);
    out.residual = std::abs(out.mean_log_R - out.mean_log_r - out.integral_n_over_u);
    return out;
}

bool rouche_certify(const TruncatedGaf& f, double r, double tail_bound) {
    try {
        return count_zeros_winding(as_analytic(f), r, tail_bound).certified;
    } catch (const InconclusiveError&) {
        return false;
    }
}

double max_modulus(const Analytic& f, double r) {
    if (!(r > 0.0)) throw DomainError("radius must be positive");
    const std::size_t n = std::max<std::size_t>(1024, 16 * (f.degree_hint + 1));
    const double h = kTwoPi / static_cast<double>(n);
    std::vector<double> mod(n);
    for (std::size_t k = 0; k < n; ++k) mod[k] = std::abs(f.eval(std::polar(r, h * k)));

    auto modulus = [&](double theta) { return std::abs(f.eval(std::polar(r, theta))); };
    double best = *std::max_element(mod.begin(), mod.end());
    const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double prev = mod[(k + n - 1) % n];
        const double next = mod[(k + 1) % n];
        if (mod[k] < prev || mod[k] < next) continue;
        // Golden-section search for the local maximum in [theta_{k-1}, theta_{k+1}].
        double a = h * (static_cast<double>(k) - 1.0);
        double b = h * (static_cast<double>(k) + 1.0);
        double x1 = b - invphi * (b - a);
        double x2 = a + invphi * (b - a);
        double f1 = modulus(x1);
        double f2 = modulus(x2);
        for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = modulus(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = modulus(x1);
            }
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

}  // namespace gafz
