#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace snlab {

/// One run of one scenario. Physical quantities are SI with the unit in the key
/// name; `width_m` doubles as the internal length scale and `mass_kg` as the
/// internal mass unit. Scenario defaults for lengths and times are multiples of
/// the width and of the derived time scale m width^2 / hbar.
struct RunConfig {
  // [run]
  std::string scenario = "evolve";
  std::uint64_t seed = 1;
  // [physics]
  double mass_kg = 1e-17;
  double width_m = 0.5e-6;
  double radius_m = 0.0;
  double gravity_scale = 1.0;  // multiplies G; 0 switches gravity off
  // [grid]
  int dimension = 1;
  int points_per_axis = 512;
  double box_length_m = 0.0;
  double softening_m = 0.0;  // 0: two grid spacings (1D kernels)
  // [time]
  double dt_s = 0.0;
  long steps = 1;
  long record_every = 1;
  double fit_time_s = 0.0;
  double detection_time_s = 0.0;
  // [two_packet]
  double separation_m = 0.0;
  // [stern_gerlach]
  double wavenumber_per_m = 0.0;
  // [ground_state]
  double tolerance = 1e-6;
  long max_iterations = 50000;
  // [collapse]
  int sites = 16;
  double cutoff_r0_m = 0.0;
  double gamma_multiplier = 1.0;
  double packet_offset_m = 0.0;
  long ensemble_size = 2000;
  std::string hamiltonian = "free";
  int workers = 1;
  // [signalling]
  double d0_m = 1e-6;
  double delta_d_m = 1e-6;
  double velocity_m_s = 1.0;
  double travel_m = 1.0;
  // [heating]
  std::vector<double> r0_list_m;

  bool operator==(const RunConfig&) const = default;
};

/// Subcommand names accepted as scenarios.
const std::vector<std::string>& scenario_names();

/// Defaults for a scenario. Lengths and times are fixed multiples of the width
/// and of m width^2 / hbar; the ground-state box follows the soliton size
/// hbar^2 / (G m^3). Unset mass and width take the scenario's default physics.
RunConfig default_config(const std::string& scenario, std::optional<double> mass_kg = {},
                         std::optional<double> width_m = {});

/// Parses INI text ([section] headers, key = value, '#' or ';' comments).
/// `overrides` are (section.key, value) pairs applied after the text.
/// The scenario comes from [run] scenario or from `scenario` (non-empty
/// arguments must agree). Throws ParseError (with line) for malformed text and
/// unknown keys, ValidationError naming the field for constraint violations.
RunConfig parse_config_text(const std::string& text, const std::string& scenario = "",
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});
RunConfig parse_config_file(const std::string& path, const std::string& scenario = "",
                            const std::vector<std::pair<std::string, std::string>>& overrides = {});

/// Throws ValidationError naming the offending field.
void validate(const RunConfig& cfg);

/// Deterministic INI text holding every field; parse_config_text of the
/// result returns an equal RunConfig.
std::string serialize_config(const RunConfig& cfg);

/// Flattened (section.key, value) pairs in serialization order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

/// %.17g formatting used by every artifact.
std::string format_double(double v);

}  // namespace snlab
