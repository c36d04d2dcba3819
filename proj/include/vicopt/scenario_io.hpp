#pragma once

// Scenario files: JSON objects with a strict schema (unknown keys are
// rejected). Every field except "name" is optional and defaults to the
// LoopConfig / MetricsConfig / InitialGains defaults. Vectors of six axis
// values may be given as a single number, which is broadcast.

#include "vicopt/config.hpp"

#include <filesystem>
#include <string>

namespace vicopt {

/// Throws ParseError (syntax, unknown key, wrong type; with line and field)
/// or ValidationError (violated invariant).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Fully resolved scenario as a JSON string; parse_scenario(to_json(s))
/// reproduces s. `indent` < 0 gives a single line.
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

}  // namespace vicopt
