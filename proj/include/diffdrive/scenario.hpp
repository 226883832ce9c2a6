#pragma once

// Scenario files and trace serialization.
//
// Scenarios are JSON documents with a strict schema: unknown keys are
// rejected, and every error names the offending key path. See README.md for
// the full schema.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffdrive/sim.hpp"

namespace diffdrive {

/// Parses a scenario document and fills defaults. `overrides` are applied
/// before validation as "dotted.key.path=value"; the value is parsed as JSON
/// when possible and taken as a string otherwise.
ScenarioConfig parse_scenario(nlohmann::json document,
                              const std::vector<std::string>& overrides = {});

/// Reads and parses a scenario file. Throws ConfigError.
ScenarioConfig load_scenario(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides = {});

/// Sets `key_path` (dot separated) in `document`, creating objects as needed.
void apply_override(nlohmann::json& document, std::string_view assignment);

/// Column names of the trace CSV, in order.
const std::vector<std::string>& trace_csv_columns();

/// Header plus one row per record, numbers with 9 significant digits, "\n"
/// line endings. For regulation traces err1..err3 carry (r, e_theta, theta_E).
void write_trace_csv(const SimTrace& trace, std::ostream& out);

/// write_trace_csv into a file. Throws Error on I/O failure.
void emit_trace_csv(const SimTrace& trace, const std::filesystem::path& path);

/// Summary block as JSON. Contains no wall-clock or host data, so it is a
/// pure function of the scenario.
nlohmann::json summary_to_json(const SimTrace& trace);

}  // namespace diffdrive
