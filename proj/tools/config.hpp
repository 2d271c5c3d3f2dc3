#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gafzeros/fit.hpp"
#include "gafzeros/montecarlo.hpp"
#include "gafzeros/rare_event.hpp"

namespace gafz::cli {

struct ProcessSpec {
    enum class Kind { Planar, Hyperbolic, Ginibre, HyperbolicOne };
    Kind kind = Kind::Planar;
    double rho = 1.0;

    PointProcess process() const;
    std::string name() const;
    /// E n(r): r^2 for the planar and Ginibre cases, the covariance formula otherwise.
    double expected_count(double r) const;
};

struct ScatterConfig {
    double r = 2.0;
    std::size_t m = 16;
    std::size_t samples = 1;
    double window = 4.0;
    std::optional<double> alpha;
};

struct McTailConfig {
    ProcessSpec process;
    std::vector<double> radii;
    std::vector<std::size_t> ms;
    std::size_t trials = 1000;
    double confidence = 0.99;
    int max_retries = 3;
};

struct ExactTailConfig {
    RadialEnsemble ensemble = RadialEnsemble::Ginibre;
    std::vector<double> radii;
    std::vector<std::size_t> ms;
};

struct EventBoundConfig {
    EventKind kind = EventKind::PlanarDomination;
    double rho = 1.0;
    std::vector<double> radii;
    std::vector<std::size_t> ms;  // empty for the very-large and moderate kinds
    double alpha = 0.0;
    double gamma = 0.0;
};

struct ExponentFitConfig {
    FitBasis basis = FitBasis::MLogMPlusM2;
    std::variant<ExactTailConfig, EventBoundConfig> data;
    double flag_threshold = 1e-2;
};

struct JensenConfig {
    std::size_t samples = 1000;
    double r_min = 0.5;
    double r_max = 2.0;
    double outer_factor = 1.5;
    double outer_max = 3.0;
    std::size_t max_degree = 200;
};

struct IntensityConfig {
    ProcessSpec process;
    std::vector<double> radii;
    std::size_t trials = 10000;
    int max_retries = 3;
};

struct KappaConfig {
    std::vector<double> radii;
    double tol = 1e-10;
};

using ExperimentParams = std::variant<ScatterConfig, McTailConfig, ExactTailConfig, EventBoundConfig,
                                      ExponentFitConfig, JensenConfig, IntensityConfig, KappaConfig>;

struct RunConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// FNV-1a of the canonical JSON with "seed" and "threads" removed, as 16 hex digits.
    std::string hash;
    ExperimentParams params;
};

const std::vector<std::string>& experiment_names();

/// Parses and validates a config document for the given subcommand. The seed
/// comes from the override when given, else from the mandatory "seed" field.
/// Throws ConfigError with a JSON-pointer path on any problem.
RunConfig parse_config(const std::string& json_text, const std::string& experiment,
                       std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig load_config(const std::string& path, const std::string& experiment,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

std::string config_hash(const std::string& canonical_json);

}  // namespace gafz::cli
