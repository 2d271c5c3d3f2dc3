#pragma once

#include <stdexcept>
#include <string>

namespace gafz {

// Argument outside the mathematical domain of an operation (r >= 1 for a
// hyperbolic model, a <= theta in a Poisson tail bound, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// A numerical procedure could not reach a trustworthy answer: a zero too
// close to the integration circle, a refinement cap, an unstable quadrature.
// Callers are expected to retry with perturbed inputs.
class InconclusiveError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Invalid experiment configuration. `path` is a JSON-pointer style field path.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

}  // namespace gafz
