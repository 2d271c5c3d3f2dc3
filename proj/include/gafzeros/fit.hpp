#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gafz {

enum class FitBasis {
    MLogMPlusM2,    // y = c1 m^2 log m + c2 m^2
    MLogMOnly,      // y = c1 m^2 log m
    R2AlphaLogR,    // y = c1 r^{2 alpha} log r
    R3AlphaMinus2,  // y = c1 r^{3 alpha - 2}
};

std::string to_string(FitBasis basis);
FitBasis fit_basis_from_string(const std::string& name);

struct FitPoint {
    double x = 0.0;  // m or r
    double y = 0.0;  // -log P
};

struct FitResult {
    std::vector<double> coefficients;
    std::vector<double> relative_residuals;
    double max_relative_residual = 0.0;
    /// max_relative_residual exceeded the flag threshold.
    bool residual_flag = false;
};

/// Least squares on the basis via column-pivoted QR. Requires >= 3 points
/// with distinct x; alpha is required for the r bases. Throws DomainError
/// on bad input or a rank-deficient design.
FitResult exponent_fit(std::span<const FitPoint> points, FitBasis basis,
                       std::optional<double> alpha = std::nullopt, double flag_threshold = 1e-2);

}  // namespace gafz
