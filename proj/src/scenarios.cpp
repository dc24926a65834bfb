#include "snlab/scenarios.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "snlab/collapse.hpp"
#include "snlab/diagnostics.hpp"
#include "snlab/dynamics.hpp"
#include "snlab/errors.hpp"
#include "snlab/spinor.hpp"
#include "snlab/two_particle.hpp"

namespace snlab {

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw InvalidArgument("table row has the wrong number of columns");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InvalidArgument("no column '" + name + "'");
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

void ScenarioResult::add(const std::string& key, double value, const std::string& units,
                         const std::string& estimator) {
  summary.emplace_back(key, SummaryValue{value, units, estimator});
}

void ScenarioResult::label(const std::string& key, const std::string& value) { labels.emplace_back(key, value); }

void ScenarioResult::param(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  parameters.emplace_back(key, buf);
}

void ScenarioResult::param(const std::string& key, const std::string& value) { parameters.emplace_back(key, value); }

const SummaryValue& ScenarioResult::at(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  throw InvalidArgument("no summary value '" + key + "' in " + name);
}

const Table& ScenarioResult::table(const std::string& name_) const {
  for (const auto& [k, t] : tables) {
    if (k == name_) return t;
  }
  throw InvalidArgument("no table '" + name_ + "' in " + name);
}

std::vector<std::string> diagnostics_columns() {
  return {"time", "norm", "kinetic_energy", "gravitational_energy", "total_energy", "com_x", "com_y",
          "com_z", "width", "packet_left", "packet_right"};
}

Table diagnostics_table(const std::vector<DiagnosticsRecord>& records) {
  Table t{diagnostics_columns(), {}};
  for (const auto& r : records) {
    const double left = r.packet_positions.size() > 0 ? r.packet_positions[0] : r.centre_of_mass[0];
    const double right = r.packet_positions.size() > 1 ? r.packet_positions[1] : r.centre_of_mass[0];
    t.add_row({r.time, r.norm, r.kinetic_energy, r.gravitational_energy, r.total_energy, r.centre_of_mass[0],
               r.centre_of_mass[1], r.centre_of_mass[2], r.width, left, right});
  }
  return t;
}

namespace {

constexpr double kPi = std::numbers::pi;

KernelSpec kernel_for(const Grid& grid, double softening) {
  if (grid.dimension() == 1) return KernelSpec::softened(softening > 0.0 ? softening : 2.0 * grid.spacing());
  return KernelSpec::newtonian();
}

double max_relative_drift(const std::vector<DiagnosticsRecord>& recs) {
  double e0 = recs.front().total_energy;
  double worst = 0.0;
  for (const auto& r : recs) worst = std::max(worst, std::abs(r.total_energy - e0));
  return e0 != 0.0 ? worst / std::abs(e0) : worst;
}

double max_norm_drift(const std::vector<DiagnosticsRecord>& recs) {
  double worst = 0.0;
  for (const auto& r : recs) worst = std::max(worst, std::abs(r.norm - recs.front().norm));
  return worst;
}

void grid_params(ScenarioResult& r, const Grid& grid, const KernelSpec& kernel) {
  r.param("grid.dimension", static_cast<double>(grid.dimension()));
  r.param("grid.points_per_axis", static_cast<double>(grid.points_per_axis()));
  r.param("grid.spacing", grid.spacing());
  r.param("grid.box_length", grid.box_length());
  r.param("kernel.kind", to_string(kernel.kind));
  if (kernel.kind == KernelKind::softened_1d) r.param("kernel.softening", kernel.softening);
  if (kernel.dimension() == 3) r.param("kernel.image_correction", kernel.image_correction ? "true" : "false");
}

// Rms width sqrt(sum of per-axis variances) of a free Gaussian with initial
// per-axis rms `width`.
double free_width(double width, double t, int dimension) {
  const double s2 = width * width + t * t / (4.0 * width * width);
  return std::sqrt(dimension * s2);
}

}  // namespace

ScenarioResult run_self_focus(const SelfFocusParams& p) {
  const Grid grid = Grid::with_box(p.dimension, p.points, p.box);
  const KernelSpec kernel = kernel_for(grid, p.softening);
  const WaveFunction psi0 = make_gaussian(grid, p.width);

  EvolutionConfig cfg;
  cfg.dt = p.dt;
  cfg.steps = p.steps;
  cfg.kappa = p.kappa;
  cfg.kernel = kernel;
  cfg.record_every = p.record_every;
  cfg.mode = EvolutionMode::sn;
  const Evolution sn = evolve(psi0, cfg);
  cfg.mode = EvolutionMode::free;
  const Evolution fr = evolve(psi0, cfg);

  ScenarioResult r;
  r.name = "self_focus";
  grid_params(r, grid, kernel);
  r.param("width", p.width);
  r.param("kappa", p.kappa);
  r.param("dt", p.dt);
  r.param("steps", static_cast<double>(p.steps));
  r.param("record_every", static_cast<double>(p.record_every));
  r.tables.emplace_back("sn", diagnostics_table(sn.records));
  r.tables.emplace_back("free", diagnostics_table(fr.records));

  double law_dev = 0.0;
  for (const auto& rec : fr.records) {
    const double law = free_width(p.width, rec.time, p.dimension);
    law_dev = std::max(law_dev, std::abs(rec.width - law) / law);
  }
  const double t_end = sn.records.back().time;
  r.add("kappa", p.kappa, "1", "input coupling G m^3 L / hbar^2");
  r.add("final_time", t_end, "time_scale", "steps * dt");
  r.add("final_width_sn", sn.records.back().width, "length_scale", "rms spread of |psi|^2 at final time, sn mode");
  r.add("final_width_free", fr.records.back().width, "length_scale", "rms spread of |psi|^2 at final time, free mode");
  r.add("width_ratio", sn.records.back().width / fr.records.back().width, "1", "final_width_sn / final_width_free");
  r.add("free_width_analytic", free_width(p.width, t_end, p.dimension), "length_scale",
        "sqrt(d (sigma^2 + t^2 / (4 sigma^2)))");
  r.add("free_law_max_deviation", law_dev, "1", "max over records of |width_free - law| / law");
  r.add("energy_drift_sn", max_relative_drift(sn.records), "1", "max |E(t) - E(0)| / |E(0)|, sn mode");
  r.add("norm_drift_sn", max_norm_drift(sn.records), "1", "max |N(t) - N(0)|, sn mode");
  return r;
}

namespace {

// Least-squares fit of y = c0 + c1 t + c2 t^2.
Eigen::Vector3d quadratic_fit(const std::vector<double>& t, const std::vector<double>& y) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(t.size()), 3);
  Eigen::VectorXd b(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    a(ii, 0) = 1.0;
    a(ii, 1) = t[i];
    a(ii, 2) = t[i] * t[i];
    b(ii) = y[i];
  }
  return a.colPivHouseholderQr().solve(b);
}

}  // namespace

ScenarioResult run_two_packet(const TwoPacketParams& p) {
  if (!(p.separation > 0.0)) throw InvalidArgument("separation must be positive");
  const Grid grid = Grid::with_box(1, p.points, p.box);
  const KernelSpec kernel = kernel_for(grid, p.softening);
  const WaveFunction a = make_gaussian(grid, p.width, {-0.5 * p.separation, 0.0, 0.0});
  const WaveFunction b = make_gaussian(grid, p.width, {0.5 * p.separation, 0.0, 0.0});
  ComplexField amps(grid.size());
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = a.amplitudes()[i] + b.amplitudes()[i];
  const WaveFunction psi0 = WaveFunction::normalized(grid, std::move(amps));

  EvolutionConfig cfg;
  cfg.dt = p.dt;
  cfg.steps = p.steps;
  cfg.kappa = p.kappa;
  cfg.kernel = kernel;
  cfg.record_every = p.record_every;
  const Evolution ev = evolve(psi0, cfg, [&](const WaveFunction& s, DiagnosticsRecord& rec) {
    const auto pos = half_axis_positions(grid, s.density(), 0);
    rec.packet_positions = {pos[0], pos[1]};
  });

  ScenarioResult r;
  r.name = "two_packet";
  grid_params(r, grid, kernel);
  r.param("width", p.width);
  r.param("separation", p.separation);
  r.param("kappa", p.kappa);
  r.param("dt", p.dt);
  r.param("steps", static_cast<double>(p.steps));
  r.param("record_every", static_cast<double>(p.record_every));
  r.param("fit_time", p.fit_time);
  r.tables.emplace_back("sn", diagnostics_table(ev.records));

  std::vector<double> t;
  std::vector<double> sep;
  double com_drift = 0.0;
  for (const auto& rec : ev.records) {
    t.push_back(rec.time);
    sep.push_back(rec.packet_positions[1] - rec.packet_positions[0]);
    com_drift = std::max(com_drift, std::abs(rec.centre_of_mass[0]));
  }
  const double d0 = sep.front();
  double half_time = -1.0;
  double min_sep = d0;
  for (std::size_t i = 0; i < sep.size(); ++i) {
    min_sep = std::min(min_sep, sep[i]);
    if (half_time < 0.0 && sep[i] <= 0.5 * d0) half_time = t[i];
  }
  // first time the separation stops decreasing
  double monotone_until = t.back();
  for (std::size_t i = 1; i < sep.size(); ++i) {
    if (!(sep[i] < sep[i - 1])) {
      monotone_until = t[i - 1];
      break;
    }
  }
  std::vector<double> ft;
  std::vector<double> fs;
  for (std::size_t i = 0; i < t.size() && t[i] <= p.fit_time + 1e-12; ++i) {
    ft.push_back(t[i]);
    fs.push_back(sep[i]);
  }
  const double eps = kernel.softening;
  const double point_mass = -p.kappa * d0 / std::pow(d0 * d0 + eps * eps, 1.5);
  double fitted = std::numeric_limits<double>::quiet_NaN();
  if (ft.size() >= 4) fitted = 2.0 * quadratic_fit(ft, fs)(2);

  r.add("kappa", p.kappa, "1", "input coupling");
  r.add("initial_separation", d0, "length_scale", "difference of density-weighted half-axis means at t = 0");
  r.add("final_separation", sep.back(), "length_scale", "same estimator at the final time");
  r.add("min_separation", min_sep, "length_scale", "minimum over records of the half-axis separation");
  r.add("time_to_half_separation", half_time, "time_scale",
        "first recorded time with separation <= initial / 2; -1 if never reached");
  r.add("monotone_until", monotone_until, "time_scale",
        "last recorded time before the separation first fails to decrease");
  r.add("com_drift_max", com_drift, "length_scale", "max over records of |centre of mass|");
  r.add("early_acceleration", fitted, "length_scale/time_scale^2",
        "2 c2 from least-squares fit sep = c0 + c1 t + c2 t^2 over t <= fit_time");
  r.add("point_mass_acceleration", point_mass, "length_scale/time_scale^2",
        "-kappa D / (D^2 + eps^2)^{3/2}: two half-weight point masses under the softened kernel");
  r.add("acceleration_ratio", fitted / point_mass, "1", "early_acceleration / point_mass_acceleration");
  r.add("energy_drift", max_relative_drift(ev.records), "1", "max |E(t) - E(0)| / |E(0)|");
  r.add("norm_drift", max_norm_drift(ev.records), "1", "max |N(t) - N(0)|");
  return r;
}

ScenarioResult run_stern_gerlach(const SternGerlachParams& p) {
  if (!(p.momentum > 0.0)) throw InvalidArgument("momentum must be positive");
  const Grid grid = Grid::with_box(1, p.points, p.box);
  const KernelSpec kernel = kernel_for(grid, p.softening);
  const double t_detect = p.detection_time > 0.0 ? p.detection_time : 10.0 * p.width / p.momentum;
  const long steps = std::max(1L, std::lround(t_detect / p.dt));
  const SpinorWaveFunction psi0 = make_split_spinor(make_gaussian(grid, p.width), p.momentum, 0);

  EvolutionConfig cfg;
  cfg.dt = p.dt;
  cfg.steps = steps;
  cfg.kappa = p.kappa;
  cfg.kernel = kernel;
  cfg.record_every = p.record_every;

  ScenarioResult r;
  r.name = "stern_gerlach";
  grid_params(r, grid, kernel);
  r.param("width", p.width);
  r.param("momentum", p.momentum);
  r.param("kappa", p.kappa);
  r.param("dt", p.dt);
  r.param("detection_time", t_detect);
  r.param("steps", static_cast<double>(steps));
  r.param("record_every", static_cast<double>(p.record_every));

  double final_half[2] = {0.0, 0.0};
  double drift[2] = {0.0, 0.0};
  double component_drift[2] = {0.0, 0.0};
  const SpinorCoupling modes[2] = {SpinorCoupling::separate, SpinorCoupling::shared};
  for (int m = 0; m < 2; ++m) {
    const SpinorStepper stepper(grid, cfg, modes[m]);
    SpinorWaveFunction s = psi0;
    std::vector<DiagnosticsRecord> recs;
    double e0 = 0.0;
    const double np0 = s.plus_norm();
    const double nm0 = s.minus_norm();
    auto record = [&](long step) {
      const auto d = spinor_diagnostics(s, stepper.solver(), p.kappa, modes[m], 0, static_cast<double>(step) * p.dt);
      RealField rho(grid.size());
      for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(s.plus()[i]) + std::norm(s.minus()[i]);
      const auto mom = density_moments(grid, rho);
      DiagnosticsRecord rec;
      rec.time = d.time;
      rec.norm = d.plus_norm + d.minus_norm;
      rec.kinetic_energy = d.kinetic_energy;
      rec.gravitational_energy = d.gravitational_energy;
      rec.total_energy = d.total_energy;
      rec.centre_of_mass = mom.centre;
      rec.width = mom.width;
      rec.packet_positions = {d.minus_position, d.plus_position};
      if (step == 0) e0 = d.total_energy;
      drift[m] = std::max(drift[m], std::abs(d.total_energy - e0) / std::abs(e0));
      component_drift[m] = std::max({component_drift[m], std::abs(d.plus_norm - np0), std::abs(d.minus_norm - nm0)});
      final_half[m] = d.half_separation;
      recs.push_back(std::move(rec));
    };
    record(0);
    for (long k = 1; k <= steps; ++k) {
      stepper.step(s, k);
      if (k % p.record_every == 0 || k == steps) record(k);
    }
    r.tables.emplace_back(to_string(modes[m]), diagnostics_table(recs));
  }
  const double t_end = static_cast<double>(steps) * p.dt;
  r.add("kappa", p.kappa, "1", "input coupling");
  r.add("detection_time", t_end, "time_scale", "steps * dt");
  r.add("d", final_half[0], "length_scale",
        "(mean z of plus component - mean z of minus component) / 2 at detection, separate coupling");
  r.add("d_prime", final_half[1], "length_scale", "same estimator, shared coupling");
  r.add("d_minus_d_prime", final_half[0] - final_half[1], "length_scale", "d - d_prime");
  r.add("ballistic_d", p.momentum * t_end, "length_scale", "k t");
  r.add("ballistic_deviation", std::abs(final_half[0] - p.momentum * t_end) / (p.momentum * t_end), "1",
        "|d - k t| / (k t)");
  r.add("energy_drift_separate", drift[0], "1", "max |E(t) - E(0)| / |E(0)|, separate coupling");
  r.add("energy_drift_shared", drift[1], "1", "max |E(t) - E(0)| / |E(0)|, shared coupling");
  r.add("component_norm_drift", std::max(component_drift[0], component_drift[1]), "1",
        "max change of either component norm over both runs");
  return r;
}

ScenarioResult run_two_particle(const TwoParticleParams& p) {
  const Grid grid = Grid::with_box(1, p.points, p.box);
  const KernelSpec kernel = kernel_for(grid, p.softening);
  const WaveFunction g = make_gaussian(grid, p.width);
  const TwoParticleWaveFunction psi0 = TwoParticleWaveFunction::product(g, g);

  EvolutionConfig cfg;
  cfg.dt = p.dt;
  cfg.steps = p.steps;
  cfg.kappa = p.kappa;
  cfg.kernel = kernel;
  cfg.record_every = p.record_every;

  ScenarioResult r;
  r.name = "two_particle";
  grid_params(r, grid, kernel);
  r.param("width", p.width);
  r.param("kappa", p.kappa);
  r.param("dt", p.dt);
  r.param("steps", static_cast<double>(p.steps));
  r.param("record_every", static_cast<double>(p.record_every));

  const TwoParticleInteraction kinds[3] = {TwoParticleInteraction::linear_pairwise,
                                           TwoParticleInteraction::sn_selfconsistent, TwoParticleInteraction::none};
  double final_com[3] = {};
  double drift[3] = {};
  double ndrift[3] = {};
  int rank_none = 0;
  const double t_end = static_cast<double>(p.steps) * p.dt;
  for (int m = 0; m < 3; ++m) {
    const TwoParticleStepper stepper(grid, cfg, kinds[m]);
    TwoParticleWaveFunction s = psi0;
    Table t{{"time", "norm", "kinetic_energy", "interaction_energy", "total_energy", "com_mean", "com_width",
             "com_width_free_law", "relative_width"},
            {}};
    double e0 = 0.0;
    auto record = [&](long step) {
      const double time = static_cast<double>(step) * p.dt;
      const auto d = two_particle_diagnostics(s, stepper, time);
      if (step == 0) e0 = d.total_energy;
      if (e0 != 0.0) drift[m] = std::max(drift[m], std::abs(d.total_energy - e0) / std::abs(e0));
      ndrift[m] = std::max(ndrift[m], std::abs(d.norm - 1.0));
      const double law = std::sqrt(0.5 * p.width * p.width + time * time / (8.0 * p.width * p.width));
      t.add_row({time, d.norm, d.kinetic_energy, d.interaction_energy, d.total_energy, d.com_mean, d.com_width,
                 law, d.relative_width});
      final_com[m] = d.com_width;
    };
    record(0);
    for (long k = 1; k <= p.steps; ++k) {
      stepper.step(s, k);
      if (k % p.record_every == 0) record(k);
    }
    if (kinds[m] == TwoParticleInteraction::none) rank_none = schmidt_rank(s);
    r.tables.emplace_back(to_string(kinds[m]), std::move(t));
  }
  const double law = std::sqrt(0.5 * p.width * p.width + t_end * t_end / (8.0 * p.width * p.width));
  r.add("kappa", p.kappa, "1", "input coupling");
  r.add("final_time", t_end, "time_scale", "steps * dt");
  r.add("com_width_free_law", law, "length_scale", "sqrt(sigma^2 / 2 + t^2 / (8 sigma^2)): free packet of mass 2");
  r.add("com_width_linear_pairwise", final_com[0], "length_scale", "rms spread of (x1 + x2) / 2, linear pairwise");
  r.add("com_width_sn_selfconsistent", final_com[1], "length_scale", "rms spread of (x1 + x2) / 2, self-consistent");
  r.add("com_width_none", final_com[2], "length_scale", "rms spread of (x1 + x2) / 2, no interaction");
  r.add("linear_pairwise_deviation", std::abs(final_com[0] - law) / law, "1", "|com_width_linear_pairwise - law| / law");
  r.add("sn_com_contraction", (law - final_com[1]) / law, "1", "(law - com_width_sn_selfconsistent) / law");
  r.add("schmidt_rank_none", rank_none, "1", "singular values above 1e-8 of Psi(x1, x2), no interaction, final");
  r.add("energy_drift_linear_pairwise", drift[0], "1", "max |E(t) - E(0)| / |E(0)|");
  r.add("energy_drift_sn_selfconsistent", drift[1], "1", "max |E(t) - E(0)| / |E(0)|");
  r.add("norm_drift", std::max({ndrift[0], ndrift[1], ndrift[2]}), "1", "max |N(t) - 1| over all runs");
  return r;
}

ScenarioResult run_ground_state(const GroundStateParams& p, const std::optional<UnitSystem>& units) {
  const Grid grid = Grid::with_box(p.dimension, p.points, p.box);
  GroundStateOptions o;
  o.tolerance = p.tolerance;
  o.max_iterations = p.max_iterations;
  o.kernel = kernel_for(grid, p.softening);
  const GroundStateResult g = find_ground_state(grid, p.kappa, o);

  ScenarioResult r;
  r.name = "ground_state";
  grid_params(r, grid, o.kernel);
  r.param("kappa", p.kappa);
  r.param("tolerance", p.tolerance);
  r.param("max_iterations", static_cast<double>(p.max_iterations));

  Table t{{"x", "density"}, {}};
  const auto rho = g.state.density();
  const auto n = static_cast<std::size_t>(grid.points_per_axis());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t flat = grid.dimension() == 1 ? i : (i * n + n / 2) * n + n / 2;
    t.add_row({grid.coordinates()[i], rho[flat]});
  }
  r.tables.emplace_back("profile", std::move(t));

  const auto& d = g.diagnostics;
  r.add("kappa", p.kappa, "1", "input coupling");
  r.add("energy", d.total_energy, "energy_scale", "kinetic + gravitational energy of the converged state");
  r.add("kinetic_energy", d.kinetic_energy, "energy_scale", "spectral sum of k^2/2 |psi(k)|^2");
  r.add("gravitational_energy", d.gravitational_energy, "energy_scale", "1/2 int Phi |psi|^2");
  r.add("virial_ratio", 2.0 * d.kinetic_energy / std::abs(d.gravitational_energy), "1", "2 T / |V|");
  r.add("chemical_potential", g.chemical_potential, "energy_scale", "<psi| k^2/2 + Phi |psi>");
  r.add("width", d.width, "length_scale", "rms spread of |psi|^2");
  r.add("residual", g.residual, "1", "||psi_{n+1} - psi_n|| / (dtau |mu|) at the last check");
  r.add("iterations", static_cast<double>(g.iterations), "1", "imaginary-time steps taken");
  if (units) {
    r.add("energy_si", d.total_energy * units->energy_scale(), "J", "energy * hbar^2 / (m L^2)");
    r.add("width_si", d.width * units->length_scale, "m", "width * length_scale");
  }
  return r;
}

namespace {

WaveFunction collapse_initial_state(const Grid& grid, const CollapseParams& p, double left_weight) {
  const WaveFunction a = make_gaussian(grid, p.packet_width, {-p.packet_offset, 0.0, 0.0});
  const WaveFunction b = make_gaussian(grid, p.packet_width, {p.packet_offset, 0.0, 0.0});
  ComplexField amps(grid.size());
  const double wa = std::sqrt(left_weight);
  const double wb = std::sqrt(1.0 - left_weight);
  for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = wa * a.amplitudes()[i] + wb * b.amplitudes()[i];
  return WaveFunction::normalized(grid, std::move(amps));
}

std::size_t nearest_site(const Grid& grid, double x) {
  const auto c = grid.coordinates();
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (std::abs(c[i] - x) < std::abs(c[best] - x)) best = i;
  }
  return best;
}

void collapse_params(ScenarioResult& r, const Grid& grid, const CollapseParams& p) {
  r.param("grid.sites", static_cast<double>(grid.points_per_axis()));
  r.param("grid.spacing", grid.spacing());
  r.param("grid.box_length", grid.box_length());
  r.param("cutoff_r0", p.r0);
  r.param("gamma", p.gamma);
  r.param("packet_width", p.packet_width);
  r.param("packet_offset", p.packet_offset);
  r.param("dt", p.dt);
  r.param("steps", static_cast<double>(p.steps));
  r.param("record_every", static_cast<double>(p.record_every));
  r.param("hamiltonian", p.free_hamiltonian ? "free" : "zero");
  r.param("k_measure", "sum over nonzero grid wavenumbers with weight 2 pi / box");
}

}  // namespace

ScenarioResult run_collapse_lindblad(const CollapseParams& p) {
  const Grid grid = Grid::with_box(1, p.sites, p.box);
  const DiosiFamilies fam = diosi_operators(grid, CutoffSpec{p.r0}, p.gamma);
  const Eigen::MatrixXcd h = p.free_hamiltonian ? free_hamiltonian(grid) : Eigen::MatrixXcd::Zero(p.sites, p.sites);
  const WaveFunction psi0 = collapse_initial_state(grid, p, 0.5);
  DensityMatrix rho = DensityMatrix::pure(psi0);
  const LindbladIntegrator integ(fam.hermitian, h);
  const auto il = static_cast<Eigen::Index>(nearest_site(grid, -p.packet_offset));
  const auto ir = static_cast<Eigen::Index>(nearest_site(grid, p.packet_offset));
  const double c0 = std::abs(rho.matrix()(il, ir));

  ScenarioResult r;
  r.name = "collapse_lindblad";
  collapse_params(r, grid, p);
  Table t{{"time", "trace", "purity", "coherence", "left_weight", "min_eigenvalue"}, {}};
  double max_drift = 0.0;
  long warnings = 0;
  auto record = [&](long step) {
    double left = 0.0;
    for (Eigen::Index i = 0; i < p.sites; ++i) {
      if (grid.coordinates()[static_cast<std::size_t>(i)] < 0.0) left += rho.matrix()(i, i).real();
    }
    t.add_row({static_cast<double>(step) * p.dt, rho.trace().real(), rho.purity(),
               std::abs(rho.matrix()(il, ir)) / c0, left, rho.min_eigenvalue()});
  };
  record(0);
  for (long k = 1; k <= p.steps; ++k) {
    LindbladStepReport rep;
    rho = integ.step(rho, p.dt, &rep);
    max_drift = std::max(max_drift, std::abs(rho.trace().real() - 1.0));
    if (rep.positivity_warning) ++warnings;
    if (p.record_every > 0 && k % p.record_every == 0) record(k);
  }
  r.tables.emplace_back("lindblad", std::move(t));

  const DensityMatrix start = DensityMatrix::pure(psi0);
  const double equiv = (dissipator(fam.modes, start.matrix()) - dissipator(fam.hermitian, start.matrix()))
                           .cwiseAbs()
                           .maxCoeff();
  const Eigen::MatrixXcd rates = dephasing_rates(fam.hermitian);
  r.add("gamma", p.gamma, "1", "dimensionless coupling (kappa / (2 pi^2) for the Diosi model)");
  r.add("final_purity", rho.purity(), "1", "Tr rho^2 at the final time");
  r.add("final_coherence", std::abs(rho.matrix()(il, ir)) / c0, "1",
        "|rho(x_L, x_R)| / initial value at the sites nearest the packet centres");
  r.add("pair_dephasing_rate", -rates(il, ir).real(), "1/time_scale",
        "-Gamma(x_L, x_R) of the dissipator written as Gamma o rho");
  r.add("max_trace_drift", max_drift, "1", "max |Tr rho - 1| over steps");
  r.add("positivity_warnings", static_cast<double>(warnings), "1", "steps with min eigenvalue below -1e-8");
  r.add("dissipator_equivalence", equiv, "1", "max |D_modes[rho0] - D_hermitian[rho0]|");
  return r;
}

ScenarioResult run_collapse_sde(const CollapseParams& p) {
  const Grid grid = Grid::with_box(1, p.sites, p.box);
  ScenarioResult r;
  r.name = "collapse_sde";
  collapse_params(r, grid, p);
  r.param("seed", std::to_string(p.seed));
  r.param("ensemble_size", static_cast<double>(p.ensemble_size));

  // Born statistics: projector onto x < 0, no Hamiltonian, unequal weights.
  constexpr double kLeftWeight = 0.3;
  constexpr double kBornGamma = 4.0;
  constexpr long kBornSteps = 400;
  r.param("born.left_weight", kLeftWeight);
  r.param("born.gamma", kBornGamma);
  r.param("born.steps", static_cast<double>(kBornSteps));
  RealField proj(grid.size(), 0.0);
  for (std::size_t i = 0; i < proj.size(); ++i) proj[i] = grid.coordinates()[i] < 0.0 ? 1.0 : 0.0;
  const LindbladFamily born_family = hermitian_family(grid, {proj}, kBornGamma);
  const WaveFunction born0 = collapse_initial_state(grid, p, kLeftWeight);
  double p_left = 0.0;
  for (std::size_t i = 0; i < proj.size(); ++i) p_left += proj[i] * std::norm(born0.amplitudes()[i]) * grid.spacing();
  TrajectoryConfig bcfg;
  bcfg.dt = p.dt;
  bcfg.steps = kBornSteps;
  bcfg.seed = p.seed;
  bcfg.ensemble_size = p.ensemble_size;
  const EnsembleResult born = sse_ensemble(born0, born_family, Eigen::MatrixXcd::Zero(p.sites, p.sites), bcfg, p.workers);
  long left = 0;
  long undecided = 0;
  for (double w : born.final_weights) {
    if (w > 0.5) ++left;
    if (w > 0.01 && w < 0.99) ++undecided;
  }
  const double n = static_cast<double>(p.ensemble_size);
  const double frac = static_cast<double>(left) / n;
  const double sigma = std::sqrt(p_left * (1.0 - p_left) / n);

  // Ensemble of the Diosi family versus the master equation.
  const DiosiFamilies fam = diosi_operators(grid, CutoffSpec{p.r0}, p.gamma);
  const Eigen::MatrixXcd h = p.free_hamiltonian ? free_hamiltonian(grid) : Eigen::MatrixXcd::Zero(p.sites, p.sites);
  const WaveFunction psi0 = collapse_initial_state(grid, p, 0.5);
  TrajectoryConfig cfg;
  cfg.dt = p.dt;
  cfg.steps = p.steps;
  cfg.seed = p.seed + 1;
  cfg.ensemble_size = p.ensemble_size;
  cfg.record_every = p.record_every;
  const EnsembleResult ens = sse_ensemble(psi0, fam.hermitian, h, cfg, p.workers);
  const LindbladIntegrator integ(fam.hermitian, h);
  DensityMatrix rho = DensityMatrix::pure(psi0);
  Table t{{"time", "lindblad_purity", "ensemble_purity", "trace_distance"}, {}};
  double worst = 0.0;
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    if (k > 0) rho = integ.evolve(rho, p.dt, p.record_every);
    const Eigen::MatrixXcd& e = ens.recorded[k];
    const double dist = trace_distance(e, rho.matrix());
    worst = std::max(worst, dist);
    t.add_row({ens.times[k], rho.purity(), (e * e).trace().real(), dist});
  }
  if (ens.times.empty()) {
    rho = integ.evolve(rho, p.dt, p.steps);
    worst = trace_distance(ens.mean_state.matrix(), rho.matrix());
    t.add_row({static_cast<double>(p.steps) * p.dt, rho.purity(), ens.mean_state.purity(), worst});
  }
  r.tables.emplace_back("ensemble", std::move(t));

  r.add("born_expected_left", p_left, "1", "<P_left> of the initial state");
  r.add("born_observed_left", frac, "1", "fraction of trajectories with final <P_left> > 0.5");
  r.add("born_sigma", sigma, "1", "sqrt(p (1 - p) / N) binomial standard error");
  r.add("born_z", (frac - p_left) / sigma, "1", "(observed - expected) / sigma");
  r.add("born_undecided", static_cast<double>(undecided), "1", "trajectories with 0.01 < final <P_left> < 0.99");
  r.add("trace_distance_final", trace_distance(ens.mean_state.matrix(), rho.matrix()), "1",
        "sum |eig(rho_ensemble - rho_lindblad)| at the final time");
  r.add("trace_distance_max", worst, "1", "max over recorded times of the trace distance");
  r.add("trace_distance_bound", 5.0 / std::sqrt(n), "1", "5 / sqrt(ensemble_size)");
  r.add("prenorm_mean", ens.prenorm_mean, "1", "mean over steps and trajectories of |psi|^2 - 1 before renormalization");
  r.add("prenorm_stderr", ens.prenorm_stderr, "1", "standard error of prenorm_mean");
  return r;
}

SignallingEstimate signalling_distance(double mass_kg, double d0_m, double delta_d_m, double v_m_s, double s_m,
                                       const PhysicalConstants& pc) {
  if (!(mass_kg > 0.0) || !(d0_m > 0.0) || !(delta_d_m > 0.0) || !(v_m_s > 0.0) || !(s_m > 0.0)) {
    throw InvalidArgument("signalling inputs must be positive");
  }
  SignallingEstimate e;
  e.delta_d_predicted = pc.G * mass_kg * s_m * s_m / (2.0 * v_m_s * v_m_s * d0_m * d0_m);
  e.s_min = pc.c * d0_m * std::sqrt(2.0 * delta_d_m / (pc.G * mass_kg));
  e.s_min_lightyears = e.s_min / kLightYearMetres;
  return e;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::wide: return "wide";
    case Regime::narrow: return "narrow";
    case Regime::indeterminate: return "indeterminate";
  }
  return "unknown";
}

RegimeVerdict regime_classifier(double mass_kg, double sigma_m, double radius_m, const PhysicalConstants& pc) {
  if (!(mass_kg > 0.0) || !(sigma_m > 0.0) || !(radius_m > 0.0)) {
    throw InvalidArgument("regime inputs must be positive");
  }
  const double threshold = std::pow(pc.planck_mass, 3) * pc.planck_length;
  const double m3 = mass_kg * mass_kg * mass_kg;
  const double ratio = radius_m / sigma_m;
  RegimeVerdict v;
  if (ratio > 10.0) {
    v.regime = Regime::narrow;
    v.margin = m3 * sigma_m * sigma_m / radius_m / threshold;
    v.nonlinear = v.margin >= 1.0;
  } else {
    v.regime = ratio < 0.1 ? Regime::wide : Regime::indeterminate;
    v.margin = m3 * sigma_m / threshold;
    v.nonlinear = v.regime == Regime::wide && v.margin >= 1.0;
  }
  return v;
}

std::vector<HeatingRow> heating_table(double mass_kg, const std::vector<double>& r0_list, const PhysicalConstants& pc) {
  std::vector<HeatingRow> rows;
  for (double r0 : r0_list) {
    const HeatingRate h = heating_rate(mass_kg, r0, pc);
    rows.push_back({r0, h.joules_per_second, h.kelvin_per_second});
  }
  return rows;
}

ScenarioResult run_signalling(double mass_kg, double d0_m, double delta_d_m, double v_m_s, double s_m) {
  const SignallingEstimate e = signalling_distance(mass_kg, d0_m, delta_d_m, v_m_s, s_m);
  const auto& pc = PhysicalConstants::codata2018();
  ScenarioResult r;
  r.name = "signalling";
  r.param("mass_kg", mass_kg);
  r.param("d0_m", d0_m);
  r.param("delta_d_m", delta_d_m);
  r.param("velocity_m_s", v_m_s);
  r.param("travel_m", s_m);
  // the travel distance that produces delta_d at this velocity
  const double s_needed = v_m_s * d0_m * std::sqrt(2.0 * delta_d_m / (pc.G * mass_kg));
  Table t{{"travel_m", "delta_d_predicted_m"}, {}};
  for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    t.add_row({f * s_m, signalling_distance(mass_kg, d0_m, delta_d_m, v_m_s, f * s_m).delta_d_predicted});
  }
  r.tables.emplace_back("travel_sweep", std::move(t));
  r.add("delta_d_predicted", e.delta_d_predicted, "m", "G m s^2 / (2 v^2 d0^2)");
  r.add("S_min", e.s_min, "m", "c d0 sqrt(2 delta_d / (G m))");
  r.add("S_min_lightyears", e.s_min_lightyears, "ly", "S_min / 9460730472580800 m");
  r.add("travel_for_delta_d", s_needed, "m", "v d0 sqrt(2 delta_d / (G m))");
  return r;
}

ScenarioResult run_regime(double mass_kg, double sigma_m, double radius_m) {
  const RegimeVerdict v = regime_classifier(mass_kg, sigma_m, radius_m);
  const auto& pc = PhysicalConstants::codata2018();
  ScenarioResult r;
  r.name = "regime";
  r.param("mass_kg", mass_kg);
  r.param("width_m", sigma_m);
  r.param("radius_m", radius_m);
  Table t{{"mass_kg", "margin"}, {}};
  for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) t.add_row({f * mass_kg, regime_classifier(f * mass_kg, sigma_m, radius_m).margin});
  r.tables.emplace_back("mass_sweep", std::move(t));
  r.label("regime", to_string(v.regime));
  r.label("nonlinear", v.nonlinear ? "true" : "false");
  r.add("margin", v.margin, "1",
        v.regime == Regime::narrow ? "m^3 sigma^2 / (R m_p^3 l_p)" : "m^3 sigma / (m_p^3 l_p)");
  r.add("radius_over_width", radius_m / sigma_m, "1", "R / sigma; < 0.1 wide, > 10 narrow");
  r.add("planck_threshold", std::pow(pc.planck_mass, 3) * pc.planck_length, "kg^3 m", "m_p^3 l_p = hbar^2 / G");
  r.add("kappa_at_width", make_unit_system(mass_kg, sigma_m).kappa, "1", "G m^3 sigma / hbar^2");
  return r;
}

ScenarioResult run_heating(double mass_kg, const std::vector<double>& r0_list) {
  if (r0_list.empty()) throw InvalidArgument("heating needs at least one cutoff");
  ScenarioResult r;
  r.name = "heating";
  r.param("mass_kg", mass_kg);
  std::string list;
  for (double v : r0_list) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s%.17g", list.empty() ? "" : ",", v);
    list += buf;
  }
  r.param("r0_list_m", list);
  r.param("temperature_convention", "E = kB T");
  r.param("hamiltonian", "p^2 / 2m");
  Table t{{"r0_m", "rate_J_per_s", "rate_K_per_s"}, {}};
  const auto rows = heating_table(mass_kg, r0_list);
  for (const auto& row : rows) t.add_row({row.r0_m, row.joules_per_second, row.kelvin_per_second});
  r.tables.emplace_back("rates", std::move(t));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string k = "rate_" + std::to_string(i);
    r.add(k + "_r0", rows[i].r0_m, "m", "cutoff radius of row " + std::to_string(i));
    r.add(k + "_J_per_s", rows[i].joules_per_second, "J/s", "G m hbar (pi/2)^{3/2} / (4 pi^2 R0^3)");
    r.add(k + "_K_per_s", rows[i].kelvin_per_second, "K/s", "rate_J_per_s / kB");
  }
  r.add("gamma_si", diosi_gamma_si(), "m kg^-2 s^-1", "G / (2 pi^2 hbar)");
  return r;
}

}  // namespace snlab
