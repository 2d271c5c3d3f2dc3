#include "gafzeros/fit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "gafzeros/errors.hpp"

namespace gafz {

std::string to_string(FitBasis basis) {
    switch (basis) {
        case FitBasis::MLogMPlusM2:
            return "m2logm+m2";
        case FitBasis::MLogMOnly:
            return "m2logm";
        case FitBasis::R2AlphaLogR:
            return "r2alogr";
        case FitBasis::R3AlphaMinus2:
            return "r3a-2";
    }
    return "unknown";
}

FitBasis fit_basis_from_string(const std::string& name) {
    for (FitBasis b : {FitBasis::MLogMPlusM2, FitBasis::MLogMOnly, FitBasis::R2AlphaLogR, FitBasis::R3AlphaMinus2}) {
        if (to_string(b) == name) return b;
    }
    throw DomainError("unknown fit basis '" + name + "'");
}

FitResult exponent_fit(std::span<const FitPoint> points, FitBasis basis, std::optional<double> alpha,
                       double flag_threshold) {
    if (points.size() < 3) throw DomainError("exponent_fit needs at least 3 points");
    std::vector<double> xs;
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DomainError("exponent_fit: non-finite point");
        xs.push_back(p.x);
    }
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        throw DomainError("exponent_fit needs distinct abscissae");
    }
    const bool r_basis = basis == FitBasis::R2AlphaLogR || basis == FitBasis::R3AlphaMinus2;
    if (r_basis && !alpha) throw DomainError("exponent_fit: alpha is required for this basis");

    const auto rows = static_cast<Eigen::Index>(points.size());
    const Eigen::Index cols = basis == FitBasis::MLogMPlusM2 ? 2 : 1;
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double x = points[static_cast<std::size_t>(i)].x;
        if (!(x > 0.0)) throw DomainError("exponent_fit: abscissae must be positive");
        y(i) = points[static_cast<std::size_t>(i)].y;
        switch (basis) {
            case FitBasis::MLogMPlusM2:
                X(i, 0) = x * x * std::log(x);
                X(i, 1) = x * x;
                break;
            case FitBasis::MLogMOnly:
                X(i, 0) = x * x * std::log(x);
                break;
            case FitBasis::R2AlphaLogR:
                X(i, 0) = std::pow(x, 2.0 * *alpha) * std::log(x);
                break;
            case FitBasis::R3AlphaMinus2:
                X(i, 0) = std::pow(x, 3.0 * *alpha - 2.0);
                break;
        }
    }
    // Column scaling keeps the QR rank decision independent of units.
    Eigen::VectorXd scale = X.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (!(scale(j) > 0.0)) throw DomainError("exponent_fit: rank-deficient design");
        X.col(j) /= scale(j);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-12);
    if (qr.rank() < cols) throw DomainError("exponent_fit: rank-deficient design");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd fitted = X * beta;

    FitResult out;
    for (Eigen::Index j = 0; j < cols; ++j) out.coefficients.push_back(beta(j) / scale(j));
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double denom = std::max(std::abs(y(i)), 1e-300);
        const double rel = std::abs(y(i) - fitted(i)) / denom;
        out.relative_residuals.push_back(rel);
        out.max_relative_residual = std::max(out.max_relative_residual, rel);
    }
    out.residual_flag = out.max_relative_residual > flag_threshold;
    return out;
}

}  // namespace gafz
