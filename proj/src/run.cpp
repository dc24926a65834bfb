#include "snlab/run.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "snlab/collapse.hpp"

namespace snlab {
namespace {

bool ends_with(const std::string& s, const std::string& tail) {
  return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

// SI factor of a unit string built from length_scale, time_scale and
// energy_scale with optional integer powers, '*' or ' ' products and one '/'.
// Returns NaN for strings that are already SI or dimensionless.
double si_factor(const std::string& units, const UnitSystem& u) {
  auto factor = [&](std::string tok, int sign) {
    int power = 1;
    if (const auto c = tok.find('^'); c != std::string::npos) {
      power = std::stoi(tok.substr(c + 1));
      tok = tok.substr(0, c);
    }
    double base = 0.0;
    if (tok == "length_scale") base = u.length_scale;
    else if (tok == "time_scale") base = u.time_scale;
    else if (tok == "energy_scale") base = u.energy_scale();
    else if (tok == "1") return std::pair{1.0, false};
    else return std::pair{std::nan(""), false};
    return std::pair{std::pow(base, sign * power), true};
  };
  double f = 1.0;
  bool scaled = false;
  const auto slash = units.find('/');
  const std::string parts[2] = {units.substr(0, slash), slash == std::string::npos ? "" : units.substr(slash + 1)};
  for (int side = 0; side < 2; ++side) {
    std::string p = parts[side];
    for (char& ch : p) {
      if (ch == '*') ch = ' ';
    }
    std::istringstream in(p);
    std::string tok;
    while (in >> tok) {
      const auto [v, s] = factor(tok, side == 0 ? 1 : -1);
      if (std::isnan(v)) return std::nan("");
      f *= v;
      scaled = scaled || s;
    }
  }
  return scaled ? f : std::nan("");
}

std::string si_units(const std::string& units) {
  std::string out;
  const auto slash = units.find('/');
  auto map = [](std::string s) {
    for (const auto& [from, to] : {std::pair<std::string, std::string>{"length_scale", "m"},
                                   {"time_scale", "s"}, {"energy_scale", "J"}}) {
      for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from)) s.replace(pos, from.size(), to);
    }
    return s;
  };
  if (slash == std::string::npos) return map(units);
  return map(units.substr(0, slash)) + "/" + map(units.substr(slash + 1));
}

std::string column_units(const std::string& col, int dimension) {
  if (col == "time") return "time_scale";
  if (ends_with(col, "_J_per_s")) return "J/s";
  if (ends_with(col, "_K_per_s")) return "K/s";
  if (ends_with(col, "_kg")) return "kg";
  if (ends_with(col, "_m")) return "m";
  if (col.find("energy") != std::string::npos) return "energy_scale";
  if (col == "density") return "length_scale^-" + std::to_string(dimension);
  for (const char* c : {"com_x", "com_y", "com_z", "width", "packet_left", "packet_right", "com_mean", "com_width",
                        "com_width_free_law", "relative_width", "x"}) {
    if (col == c) return "length_scale";
  }
  return "1";
}

std::string comment_block(const RunConfig& cfg) {
  std::string out = "# snlab " + std::string(library_version()) + " schema " +
                    std::to_string(kArtifactSchemaVersion) + " seed " + std::to_string(cfg.seed) + "\n";
  std::istringstream in(serialize_config(cfg));
  std::string line;
  while (std::getline(in, line)) out += "# " + line + "\n";
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw InvalidArgument("write failed for '" + path.string() + "'");
}

std::string table_csv(const RunConfig& cfg, const Table& t) {
  std::string out = comment_block(cfg);
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!std::isfinite(row[c])) {
        throw NumericalBlowup(0, "non-finite value in column '" + t.columns[c] + "'");
      }
      out += (c ? "," : "") + format_double(row[c]);
    }
    out += "\n";
  }
  return out;
}

std::string table_file(const ScenarioResult& r, std::size_t i) {
  return i == 0 ? "timeseries.csv" : "timeseries_" + r.tables[i].first + ".csv";
}

int dimension_of(const RunConfig& cfg) {
  const std::string& s = cfg.scenario;
  return (s == "evolve" || s == "ground-state") ? cfg.dimension : 1;
}

}  // namespace

const char* library_version() { return "0.3.0"; }

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse:
    case ErrorKind::validation:
    case ErrorKind::invalid_argument:
    case ErrorKind::resolution:
      return 2;
    case ErrorKind::convergence:
      return 3;
    case ErrorKind::numerical_blowup:
    case ErrorKind::step_size:
      return 4;
    case ErrorKind::contract_violation:
      return 1;
  }
  return 1;
}

UnitSystem config_units(const RunConfig& cfg) { return make_unit_system(cfg.mass_kg, cfg.width_m); }

ScenarioResult execute(const RunConfig& cfg) {
  validate(cfg);
  const UnitSystem u = config_units(cfg);
  const double kappa = u.kappa * cfg.gravity_scale;
  auto len = [&](double m) { return u.length_from_si(m); };
  auto tim = [&](double s) { return u.time_from_si(s); };
  const std::string& s = cfg.scenario;

  if (s == "evolve") {
    SelfFocusParams p;
    p.dimension = cfg.dimension;
    p.points = cfg.points_per_axis;
    p.box = len(cfg.box_length_m);
    p.width = 1.0;
    p.kappa = kappa;
    p.dt = tim(cfg.dt_s);
    p.steps = cfg.steps;
    p.record_every = cfg.record_every;
    p.softening = len(cfg.softening_m);
    return run_self_focus(p);
  }
  if (s == "two-packet") {
    TwoPacketParams p;
    p.points = cfg.points_per_axis;
    p.box = len(cfg.box_length_m);
    p.width = 1.0;
    p.separation = len(cfg.separation_m);
    p.kappa = kappa;
    p.dt = tim(cfg.dt_s);
    p.steps = cfg.steps;
    p.record_every = cfg.record_every;
    p.softening = len(cfg.softening_m);
    p.fit_time = tim(cfg.fit_time_s);
    return run_two_packet(p);
  }
  if (s == "stern-gerlach") {
    SternGerlachParams p;
    p.points = cfg.points_per_axis;
    p.box = len(cfg.box_length_m);
    p.width = 1.0;
    p.momentum = cfg.wavenumber_per_m * u.length_scale;
    p.kappa = kappa;
    p.dt = tim(cfg.dt_s);
    p.detection_time = tim(cfg.detection_time_s);
    p.record_every = cfg.record_every;
    p.softening = len(cfg.softening_m);
    return run_stern_gerlach(p);
  }
  if (s == "two-particle") {
    TwoParticleParams p;
    p.points = cfg.points_per_axis;
    p.box = len(cfg.box_length_m);
    p.width = 1.0;
    p.kappa = kappa;
    p.dt = tim(cfg.dt_s);
    p.steps = cfg.steps;
    p.record_every = cfg.record_every;
    p.softening = len(cfg.softening_m);
    return run_two_particle(p);
  }
  if (s == "ground-state") {
    GroundStateParams p;
    p.dimension = cfg.dimension;
    p.points = cfg.points_per_axis;
    p.box = len(cfg.box_length_m);
    p.kappa = kappa;
    p.tolerance = cfg.tolerance;
    p.max_iterations = cfg.max_iterations;
    p.softening = len(cfg.softening_m);
    return run_ground_state(p, u);
  }
  if (s == "collapse-lindblad" || s == "collapse-sde") {
    CollapseParams p;
    p.sites = cfg.sites;
    p.box = len(cfg.box_length_m);
    p.r0 = len(cfg.cutoff_r0_m);
    p.gamma = cfg.gamma_multiplier * kappa / (2.0 * std::numbers::pi * std::numbers::pi);
    p.packet_width = 1.0;
    p.packet_offset = len(cfg.packet_offset_m);
    p.dt = tim(cfg.dt_s);
    p.steps = cfg.steps;
    p.record_every = cfg.record_every;
    p.free_hamiltonian = cfg.hamiltonian == "free";
    p.seed = cfg.seed;
    p.ensemble_size = cfg.ensemble_size;
    p.workers = cfg.workers;
    return s == "collapse-lindblad" ? run_collapse_lindblad(p) : run_collapse_sde(p);
  }
  if (s == "signalling") return run_signalling(cfg.mass_kg, cfg.d0_m, cfg.delta_d_m, cfg.velocity_m_s, cfg.travel_m);
  if (s == "regime") return run_regime(cfg.mass_kg, cfg.width_m, cfg.radius_m);
  if (s == "heating") return run_heating(cfg.mass_kg, cfg.r0_list_m);
  throw ValidationError("run.scenario", "unknown scenario '" + s + "'");
}

std::string summary_text(const RunConfig& cfg, const ScenarioResult& r) {
  const UnitSystem u = config_units(cfg);
  std::string out = comment_block(cfg);
  out += "scenario: " + cfg.scenario + "\n";
  out += "seed: " + std::to_string(cfg.seed) + "\n";
  for (const auto& [k, v] : r.labels) out += k + ": " + v + "\n";
  for (const auto& [k, v] : r.summary) {
    out += k + ": " + format_double(v.value) + "\n";
    out += k + ".units: " + v.units + "\n";
    out += k + ".estimator: " + v.estimator + "\n";
    const double f = si_factor(v.units, u);
    if (!std::isnan(f)) {
      out += k + "_si: " + format_double(v.value * f) + "\n";
      out += k + "_si.units: " + si_units(v.units) + "\n";
    }
  }
  return out;
}

void write_artifacts(const RunConfig& cfg, const ScenarioResult& r, const std::filesystem::path& out_dir) {
  const UnitSystem u = config_units(cfg);
  const PhysicalConstants& pc = PhysicalConstants::codata2018();
  const int dim = dimension_of(cfg);

  std::string meta = comment_block(cfg);
  meta += "schema_version: " + std::to_string(kArtifactSchemaVersion) + "\n";
  meta += "library_version: " + std::string(library_version()) + "\n";
  meta += "scenario: " + cfg.scenario + "\n";
  meta += "result_name: " + r.name + "\n";
  meta += "seed: " + std::to_string(cfg.seed) + "\n";
  for (const auto& [k, v] : config_entries(cfg)) meta += "config." + k + ": " + v + "\n";
  meta += "constants.G: " + format_double(pc.G) + "\n";
  meta += "constants.hbar: " + format_double(pc.hbar) + "\n";
  meta += "constants.c: " + format_double(pc.c) + "\n";
  meta += "constants.kB: " + format_double(pc.kB) + "\n";
  meta += "constants.atomic_mass_unit: " + format_double(pc.atomic_mass_unit) + "\n";
  meta += "constants.proton_mass: " + format_double(pc.proton_mass) + "\n";
  meta += "constants.planck_mass: " + format_double(pc.planck_mass) + "\n";
  meta += "constants.planck_length: " + format_double(pc.planck_length) + "\n";
  meta += "constants.light_year_m: " + format_double(kLightYearMetres) + "\n";
  meta += "units.mass_kg: " + format_double(u.mass) + "\n";
  meta += "units.length_scale_m: " + format_double(u.length_scale) + "\n";
  meta += "units.time_scale_s: " + format_double(u.time_scale) + "\n";
  meta += "units.energy_scale_J: " + format_double(u.energy_scale(pc)) + "\n";
  meta += "units.kappa: " + format_double(u.kappa) + "\n";
  meta += "units.kappa_effective: " + format_double(u.kappa * cfg.gravity_scale) + "\n";
  meta += "conventions.units: hbar = m = 1, lengths in width_m, times in m width_m^2 / hbar\n";
  meta += "conventions.grid: periodic, x_j = (j - n/2) h, h = box / n\n";
  meta += "conventions.fft: forward unnormalized, inverse scaled by 1/n\n";
  meta += "conventions.potential: Phi = -kappa K * |psi|^2; 3D kernels corrected to isolated boundary conditions\n";
  meta += "conventions.csv: '#' comment lines, one header row, %.17g values\n";
  for (const auto& [k, v] : r.parameters) meta += "parameters." + k + ": " + v + "\n";
  for (std::size_t i = 0; i < r.tables.size(); ++i) {
    const auto& [name, t] = r.tables[i];
    std::string cols;
    std::string units;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      cols += (c ? "," : "") + t.columns[c];
      units += (c ? "," : "") + column_units(t.columns[c], dim);
    }
    meta += "table." + name + ".file: " + table_file(r, i) + "\n";
    meta += "table." + name + ".columns: " + cols + "\n";
    meta += "table." + name + ".units: " + units + "\n";
    meta += "table." + name + ".rows: " + std::to_string(t.rows.size()) + "\n";
  }
  meta += "summary.file: summary.txt\n";

  // render everything before touching the directory so a failure leaves no partial set
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < r.tables.size(); ++i) files.emplace_back(table_file(r, i), table_csv(cfg, r.tables[i].second));
  files.emplace_back("summary.txt", summary_text(cfg, r));
  files.emplace_back("metadata.txt", meta);
  std::filesystem::create_directories(out_dir);
  for (const auto& [name, content] : files) write_file(out_dir / name, content);
}

int run(const RunConfig& cfg, const std::filesystem::path& out_dir, std::ostream& err) {
  try {
    write_artifacts(cfg, execute(cfg), out_dir);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace snlab
