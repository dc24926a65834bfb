#include "snlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "snlab/errors.hpp"
#include "snlab/units.hpp"

namespace snlab {
namespace {

namespace pt = boost::property_tree;

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Thrown by value parsers; the caller attaches the line.
struct BadValue {
  std::string what;
};

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw BadValue{"not a number: '" + s + "'"};
  return v;
}

template <class Int>
Int parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) throw BadValue{"not an integer: '" + s + "'"};
  return v;
}

std::vector<double> parse_list(const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw BadValue{"empty list"};
  return out;
}

template <class M>
Field real(const char* sec, const char* key, M RunConfig::*m) {
  return {sec, key, [m](const RunConfig& c) { return format_double(c.*m); },
          [m](RunConfig& c, const std::string& v) { c.*m = parse_double(v); }};
}

template <class M>
Field integer(const char* sec, const char* key, M RunConfig::*m) {
  return {sec, key, [m](const RunConfig& c) { return std::to_string(c.*m); },
          [m](RunConfig& c, const std::string& v) { c.*m = parse_int<M>(v); }};
}

Field text(const char* sec, const char* key, std::string RunConfig::*m) {
  return {sec, key, [m](const RunConfig& c) { return c.*m; },
          [m](RunConfig& c, const std::string& v) { c.*m = trim(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      text("run", "scenario", &RunConfig::scenario),
      integer("run", "seed", &RunConfig::seed),
      real("physics", "mass_kg", &RunConfig::mass_kg),
      real("physics", "width_m", &RunConfig::width_m),
      real("physics", "radius_m", &RunConfig::radius_m),
      real("physics", "gravity_scale", &RunConfig::gravity_scale),
      integer("grid", "dimension", &RunConfig::dimension),
      integer("grid", "points_per_axis", &RunConfig::points_per_axis),
      real("grid", "box_length_m", &RunConfig::box_length_m),
      real("grid", "softening_m", &RunConfig::softening_m),
      real("time", "dt_s", &RunConfig::dt_s),
      integer("time", "steps", &RunConfig::steps),
      integer("time", "record_every", &RunConfig::record_every),
      real("time", "fit_time_s", &RunConfig::fit_time_s),
      real("time", "detection_time_s", &RunConfig::detection_time_s),
      real("two_packet", "separation_m", &RunConfig::separation_m),
      real("stern_gerlach", "wavenumber_per_m", &RunConfig::wavenumber_per_m),
      real("ground_state", "tolerance", &RunConfig::tolerance),
      integer("ground_state", "max_iterations", &RunConfig::max_iterations),
      integer("collapse", "sites", &RunConfig::sites),
      real("collapse", "cutoff_r0_m", &RunConfig::cutoff_r0_m),
      real("collapse", "gamma_multiplier", &RunConfig::gamma_multiplier),
      real("collapse", "packet_offset_m", &RunConfig::packet_offset_m),
      integer("collapse", "ensemble_size", &RunConfig::ensemble_size),
      text("collapse", "hamiltonian", &RunConfig::hamiltonian),
      integer("collapse", "workers", &RunConfig::workers),
      real("signalling", "d0_m", &RunConfig::d0_m),
      real("signalling", "delta_d_m", &RunConfig::delta_d_m),
      real("signalling", "velocity_m_s", &RunConfig::velocity_m_s),
      real("signalling", "travel_m", &RunConfig::travel_m),
      {"heating", "r0_list_m",
       [](const RunConfig& c) {
         std::string s;
         for (std::size_t i = 0; i < c.r0_list_m.size(); ++i) s += (i ? ", " : "") + format_double(c.r0_list_m[i]);
         return s;
       },
       [](RunConfig& c, const std::string& v) { c.r0_list_m = parse_list(v); }},
  };
  return f;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

// Line of `key` under `[section]` in the raw text, 0 if not found.
int locate(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  std::string current;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      current = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    const std::string k = trim(t.substr(0, eq));
    if (current == section && k == key) return n;
    if (section.empty() && current.empty() && k == key) return n;
  }
  return 0;
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;  // 0 for command-line overrides
};

std::vector<Entry> collect(const std::string& text,
                           const std::vector<std::pair<std::string, std::string>>& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(static_cast<int>(e.line()), e.message());
  }
  std::vector<Entry> out;
  for (const auto& [section, node] : tree) {
    if (node.empty()) {
      throw ParseError(locate(text, "", section), "key '" + section + "' outside any section");
    }
    for (const auto& [key, leaf] : node) {
      out.push_back({section, key, leaf.data(), locate(text, section, key)});
    }
  }
  for (const auto& [path, value] : overrides) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ParseError(0, "override '" + path + "' is not of the form section.key");
    out.push_back({path.substr(0, dot), path.substr(dot + 1), value, 0});
  }
  for (const auto& e : out) {
    if (!find_field(e.section, e.key)) throw ParseError(e.line, "unknown key '" + e.section + "." + e.key + "'");
  }
  return out;
}

void apply(RunConfig& cfg, const Entry& e) {
  try {
    find_field(e.section, e.key)->set(cfg, e.value);
  } catch (const BadValue& b) {
    throw ParseError(e.line, e.section + "." + e.key + ": " + b.what);
  }
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }
bool non_negative(double v) { return v >= 0.0 && std::isfinite(v); }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"ground-state",      "evolve",       "two-packet", "stern-gerlach",
                                                 "two-particle",      "collapse-lindblad", "collapse-sde",
                                                 "signalling",        "regime",       "heating"};
  return names;
}

RunConfig default_config(const std::string& scenario, std::optional<double> mass_kg, std::optional<double> width_m) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), scenario) == names.end()) {
    throw ValidationError("run.scenario", "unknown scenario '" + scenario + "'");
  }
  const PhysicalConstants& pc = PhysicalConstants::codata2018();
  RunConfig c;
  c.scenario = scenario;
  if (scenario == "signalling") c.mass_kg = 10000.0 * pc.atomic_mass_unit;
  if (scenario == "heating") c.mass_kg = pc.proton_mass;
  if (mass_kg) c.mass_kg = *mass_kg;
  if (width_m) c.width_m = *width_m;
  if (!positive(c.mass_kg)) throw ValidationError("physics.mass_kg", "must be positive and finite");
  if (!positive(c.width_m)) throw ValidationError("physics.width_m", "must be positive and finite");

  const UnitSystem u = make_unit_system(c.mass_kg, c.width_m, pc);
  const double w = c.width_m;
  const double T = u.time_scale;
  c.record_every = 10;
  if (scenario == "evolve") {
    c.points_per_axis = 512;
    c.box_length_m = 80.0 * w;
    c.dt_s = 0.01 * T;
    c.steps = 1000;
  } else if (scenario == "two-packet") {
    c.points_per_axis = 1024;
    c.box_length_m = 100.0 * w;
    c.separation_m = 8.0 * w;
    c.dt_s = 0.005 * T;
    c.steps = 3000;
    c.fit_time_s = 1.5 * T;
  } else if (scenario == "stern-gerlach") {
    c.points_per_axis = 1024;
    c.box_length_m = 160.0 * w;
    c.wavenumber_per_m = 1.0 / w;
    c.dt_s = 0.01 * T;
    c.steps = 1000;
    c.detection_time_s = 10.0 * T;
  } else if (scenario == "two-particle") {
    c.points_per_axis = 128;
    c.box_length_m = 40.0 * w;
    c.dt_s = 0.01 * T;
    c.steps = 500;
  } else if (scenario == "ground-state") {
    c.dimension = 3;
    c.points_per_axis = 64;
    c.box_length_m = 40.0 * w / u.kappa;
    c.steps = 1;
    c.record_every = 1;
  } else if (scenario == "collapse-lindblad" || scenario == "collapse-sde") {
    c.sites = 16;
    c.points_per_axis = 16;
    c.box_length_m = 16.0 * w;
    c.cutoff_r0_m = 1.5 * w;
    c.packet_offset_m = 4.0 * w;
    c.dt_s = 0.01 * T;
    c.steps = 200;
  } else if (scenario == "regime") {
    c.radius_m = 0.01 * w;
    c.steps = 1;
    c.record_every = 1;
  } else {
    c.steps = 1;
    c.record_every = 1;
  }
  if (scenario == "heating") c.r0_list_m = {1e-15, 1e-7};
  return c;
}

void validate(const RunConfig& c) {
  const auto& names = scenario_names();
  require(std::find(names.begin(), names.end(), c.scenario) != names.end(), "run.scenario",
          "unknown scenario '" + c.scenario + "'");
  require(positive(c.mass_kg), "physics.mass_kg", "must be positive and finite");
  require(positive(c.width_m), "physics.width_m", "must be positive and finite");
  require(non_negative(c.radius_m), "physics.radius_m", "must be non-negative");
  require(non_negative(c.gravity_scale), "physics.gravity_scale", "must be non-negative");
  require(c.dimension == 1 || c.dimension == 3, "grid.dimension", "must be 1 or 3");
  require(c.points_per_axis >= 8 && c.points_per_axis % 2 == 0, "grid.points_per_axis", "must be even and >= 8");
  require(positive(c.box_length_m) || c.scenario == "signalling" || c.scenario == "regime" || c.scenario == "heating",
          "grid.box_length_m", "must be positive");
  require(non_negative(c.softening_m), "grid.softening_m", "must be non-negative");
  require(c.steps >= 1, "time.steps", "must be at least 1");
  require(c.record_every >= 1 && c.record_every <= c.steps, "time.record_every", "must be in [1, steps]");
  require(non_negative(c.fit_time_s), "time.fit_time_s", "must be non-negative");
  require(non_negative(c.detection_time_s), "time.detection_time_s", "must be non-negative");
  require(positive(c.tolerance), "ground_state.tolerance", "must be positive");
  require(c.max_iterations >= 10, "ground_state.max_iterations", "must be at least 10");

  const std::string& s = c.scenario;
  const bool timed = s == "evolve" || s == "two-packet" || s == "stern-gerlach" || s == "two-particle" ||
                     s == "collapse-lindblad" || s == "collapse-sde";
  if (timed) require(positive(c.dt_s), "time.dt_s", "must be positive");
  if (s == "two-packet") require(positive(c.separation_m), "two_packet.separation_m", "must be positive");
  if (s == "stern-gerlach") {
    require(positive(c.wavenumber_per_m), "stern_gerlach.wavenumber_per_m", "must be positive");
  }
  if (s == "two-particle" || s == "two-packet" || s == "stern-gerlach") {
    require(c.dimension == 1, "grid.dimension", "scenario '" + s + "' is one-dimensional");
  }
  if (s == "two-particle") require(c.points_per_axis <= 256, "grid.points_per_axis", "must be <= 256 for two-particle");
  if (s == "collapse-lindblad" || s == "collapse-sde") {
    require(c.sites >= 8 && c.sites <= 64 && c.sites % 2 == 0, "collapse.sites", "must be even and in [8, 64]");
    require(positive(c.cutoff_r0_m), "collapse.cutoff_r0_m", "must be positive");
    require(non_negative(c.gamma_multiplier), "collapse.gamma_multiplier", "must be non-negative");
    require(non_negative(c.packet_offset_m), "collapse.packet_offset_m", "must be non-negative");
    require(c.ensemble_size >= 1, "collapse.ensemble_size", "must be at least 1");
    require(c.hamiltonian == "free" || c.hamiltonian == "none", "collapse.hamiltonian", "must be 'free' or 'none'");
    require(c.workers >= 1, "collapse.workers", "must be at least 1");
  }
  if (s == "signalling") {
    require(positive(c.d0_m), "signalling.d0_m", "must be positive");
    require(positive(c.delta_d_m), "signalling.delta_d_m", "must be positive");
    require(positive(c.velocity_m_s), "signalling.velocity_m_s", "must be positive");
    require(positive(c.travel_m), "signalling.travel_m", "must be positive");
  }
  if (s == "ground-state") require(c.gravity_scale > 0.0, "physics.gravity_scale", "must be positive for ground-state");
  if (s == "regime") require(positive(c.radius_m), "physics.radius_m", "must be positive for regime");
  if (s == "heating") {
    require(!c.r0_list_m.empty(), "heating.r0_list_m", "must not be empty");
    for (double r : c.r0_list_m) require(positive(r), "heating.r0_list_m", "entries must be positive");
  }
}

RunConfig parse_config_text(const std::string& text, const std::string& scenario,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  const std::vector<Entry> entries = collect(text, overrides);

  // Scenario, mass and width fix the defaults; later entries win.
  RunConfig head;
  head.scenario.clear();
  bool mass_set = false;
  bool width_set = false;
  for (const auto& e : entries) {
    if (e.section == "run" && e.key == "scenario") apply(head, e);
    if (e.section == "physics" && e.key == "mass_kg") apply(head, e), mass_set = true;
    if (e.section == "physics" && e.key == "width_m") apply(head, e), width_set = true;
  }
  std::string name = head.scenario;
  if (!scenario.empty()) {
    if (!name.empty() && name != scenario) {
      throw ValidationError("run.scenario", "config names '" + name + "' but '" + scenario + "' was requested");
    }
    name = scenario;
  }
  if (name.empty()) throw ValidationError("run.scenario", "no scenario given");
  if (mass_set) require(positive(head.mass_kg), "physics.mass_kg", "must be positive and finite");
  if (width_set) require(positive(head.width_m), "physics.width_m", "must be positive and finite");

  RunConfig cfg = default_config(name, mass_set ? std::optional<double>(head.mass_kg) : std::nullopt,
                                 width_set ? std::optional<double>(head.width_m) : std::nullopt);
  for (const auto& e : entries) apply(cfg, e);
  cfg.scenario = name;
  validate(cfg);
  return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::string& scenario,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), scenario, overrides);
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) {
    if (std::string(f.key) == "r0_list_m" && cfg.r0_list_m.empty()) continue;
    out.emplace_back(std::string(f.section) + "." + f.key, f.get(cfg));
  }
  return out;
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (std::string(f.key) == "r0_list_m" && cfg.r0_list_m.empty()) continue;
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace snlab
