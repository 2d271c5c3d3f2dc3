#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace gafz::cli {

/// Runs the configured experiment and writes its CSV files into out_dir
/// (created if missing). Returns the paths written. Library errors
/// (DomainError, InconclusiveError) propagate to the caller.
std::vector<std::string> run_experiment(const RunConfig& config, const std::string& out_dir);

}  // namespace gafz::cli
