#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gci/cli/scenario.hpp"
#include "gci/cli/table.hpp"

namespace gci::cli {

struct RunOptions {
  std::optional<double> alpha;       // replaces the scenario's alpha / generator grid
  std::optional<std::size_t> steps;  // replaces staircase and isotherm stair counts
  std::uint64_t seed = 0;            // random_validity only
  std::optional<double> tolerance;   // integration and root-finding tolerance
  double temperature_scale = 1.0;    // multiplies every temperature
};

std::vector<std::string> columns_for(const ScenarioBody& body);

// Throws gci::Error on numeric failure.
Table run_scenario(const Scenario& scenario, const RunOptions& opts = {});

enum class SweepParameter { Alpha, Steps, TemperatureScale, Seed };
SweepParameter parse_sweep_parameter(const std::string& name);  // throws ScenarioError
const char* to_string(SweepParameter p);

// One block of rows per grid point, in grid order; failing points yield a single row with an
// error status instead of aborting. Runs up to `threads` points concurrently.
Table sweep(const Scenario& scenario, SweepParameter param, const std::vector<double>& grid,
            const RunOptions& base = {}, std::size_t threads = 1);

// GCI_THREADS when set to a positive integer, otherwise 1.
std::size_t threads_from_env();

}  // namespace gci::cli
