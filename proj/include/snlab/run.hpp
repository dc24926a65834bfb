#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "snlab/config.hpp"
#include "snlab/errors.hpp"
#include "snlab/scenarios.hpp"
#include "snlab/units.hpp"

namespace snlab {

inline constexpr int kArtifactSchemaVersion = 1;
const char* library_version();

/// Process exit status for an error kind: 2 for parse/validation/argument and
/// resolution problems, 3 for convergence, 4 for numerical blowup and step-size
/// failures, 1 otherwise.
int exit_code(ErrorKind kind);

/// Internal unit system of a config: mass_kg and width_m.
UnitSystem config_units(const RunConfig& cfg);

/// Runs the configured scenario in internal units. kappa is the unit system's
/// value times gravity_scale.
ScenarioResult execute(const RunConfig& cfg);

/// Writes metadata.txt, timeseries.csv (primary table), timeseries_<name>.csv
/// (further tables) and summary.txt into `out_dir`, creating it if needed.
void write_artifacts(const RunConfig& cfg, const ScenarioResult& result, const std::filesystem::path& out_dir);

/// execute + write_artifacts. Errors are reported on `err` and mapped to exit codes.
int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& err);

/// Summary document as written to summary.txt.
std::string summary_text(const RunConfig& cfg, const ScenarioResult& result);

}  // namespace snlab
