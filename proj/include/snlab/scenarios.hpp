#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "snlab/constants.hpp"
#include "snlab/state.hpp"
#include "snlab/units.hpp"

namespace snlab {

struct SummaryValue {
  double value = 0.0;
  std::string units;
  std::string estimator;
};

/// Rectangular numeric table; one row per recorded time (or per evaluated point).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::vector<double> column(const std::string& name) const;
};

struct ScenarioResult {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  /// First table is the primary time series; further tables are named variants.
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, SummaryValue>> summary;
  std::vector<std::pair<std::string, std::string>> labels;

  void add(const std::string& key, double value, const std::string& units, const std::string& estimator);
  void label(const std::string& key, const std::string& value);
  void param(const std::string& key, double value);
  void param(const std::string& key, const std::string& value);
  const SummaryValue& at(const std::string& key) const;
  double value(const std::string& key) const { return at(key).value; }
  const Table& table(const std::string& name) const;
};

/// Columns of DiagnosticsRecord tables.
std::vector<std::string> diagnostics_columns();
Table diagnostics_table(const std::vector<DiagnosticsRecord>& records);

/// Softening 0 selects 2 * spacing for 1D grids.
struct SelfFocusParams {
  int dimension = 1;
  int points = 512;
  double box = 80.0;
  double width = 1.0;
  double kappa = 1.0;
  double dt = 0.01;
  long steps = 1000;
  long record_every = 10;
  double softening = 0.0;
};

ScenarioResult run_self_focus(const SelfFocusParams& p);

struct TwoPacketParams {
  int points = 1024;
  double box = 200.0;
  double width = 2.0;
  double separation = 16.0;
  double kappa = 2.0;
  double dt = 0.02;
  long steps = 3000;
  long record_every = 10;
  double softening = 0.0;
  /// Early-time window for the quadratic fit of the separation.
  double fit_time = 6.0;
};

/// Symmetric superposition of two Gaussians at -+separation/2 (1D).
ScenarioResult run_two_packet(const TwoPacketParams& p);

struct SternGerlachParams {
  int points = 1024;
  double box = 160.0;
  double width = 1.0;
  double momentum = 1.0;
  double kappa = 1.0;
  double dt = 0.01;
  double detection_time = 0.0;  // 0 selects 10 * width / momentum
  long record_every = 10;
  double softening = 0.0;
};

/// 1D spinor runs from identical data exp(+-i k z) phi / sqrt(2), phi a Gaussian:
/// separate coupling gives d, shared coupling gives d'.
ScenarioResult run_stern_gerlach(const SternGerlachParams& p);

struct TwoParticleParams {
  int points = 128;
  double box = 40.0;
  double width = 1.0;
  double kappa = 1.0;
  double dt = 0.01;
  long steps = 500;
  long record_every = 10;
  double softening = 0.0;
};

/// Product Gaussian initial data evolved with no interaction, the linear
/// pairwise potential and the self-consistent N-particle potential.
ScenarioResult run_two_particle(const TwoParticleParams& p);

struct GroundStateParams {
  int dimension = 3;
  int points = 64;
  double box = 40.0;
  double kappa = 1.0;
  double tolerance = 1e-6;
  long max_iterations = 50000;
  double softening = 0.0;
};

ScenarioResult run_ground_state(const GroundStateParams& p, const std::optional<UnitSystem>& units = {});

struct CollapseParams {
  int sites = 16;
  double box = 16.0;
  double r0 = 1.5;
  double gamma = 0.05;
  double packet_width = 1.0;
  double packet_offset = 4.0;  // packets at -+offset
  double dt = 0.01;
  long steps = 200;
  long record_every = 10;
  bool free_hamiltonian = true;
  std::uint64_t seed = 1;
  long ensemble_size = 2000;
  int workers = 1;
};

/// Lindblad evolution of a two-packet superposition under the Hermitian Diosi family.
ScenarioResult run_collapse_lindblad(const CollapseParams& p);
/// Stochastic trajectories: Born statistics for a left/right projector and the
/// ensemble-versus-master-equation comparison for the Diosi family.
ScenarioResult run_collapse_sde(const CollapseParams& p);

struct SignallingEstimate {
  double delta_d_predicted = 0.0;  // m
  double s_min = 0.0;              // m
  double s_min_lightyears = 0.0;
};

/// delta_d = G m s^2 / (2 v^2 d0^2) and S_min = c d0 sqrt(2 delta_d / (G m)).
SignallingEstimate signalling_distance(double mass_kg, double d0_m, double delta_d_m, double v_m_s, double s_m,
                                       const PhysicalConstants& pc = PhysicalConstants::codata2018());

enum class Regime { wide, narrow, indeterminate };
std::string to_string(Regime regime);

struct RegimeVerdict {
  Regime regime = Regime::indeterminate;
  bool nonlinear = false;
  double margin = 0.0;
};

/// R/sigma < 0.1: margin = m^3 sigma / (m_p^3 l_p); R/sigma > 10: margin =
/// m^3 sigma^2 / (R m_p^3 l_p). In between the regime is indeterminate,
/// nonlinear is false and the margin is the wide-packet quotient.
RegimeVerdict regime_classifier(double mass_kg, double sigma_m, double radius_m,
                                const PhysicalConstants& pc = PhysicalConstants::codata2018());

struct HeatingRow {
  double r0_m = 0.0;
  double joules_per_second = 0.0;
  double kelvin_per_second = 0.0;
};

std::vector<HeatingRow> heating_table(double mass_kg, const std::vector<double>& r0_list,
                                      const PhysicalConstants& pc = PhysicalConstants::codata2018());

ScenarioResult run_signalling(double mass_kg, double d0_m, double delta_d_m, double v_m_s, double s_m);
ScenarioResult run_regime(double mass_kg, double sigma_m, double radius_m);
ScenarioResult run_heating(double mass_kg, const std::vector<double>& r0_list);

}  // namespace snlab
