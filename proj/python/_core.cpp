#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snlab/collapse.hpp"
#include "snlab/config.hpp"
#include "snlab/dynamics.hpp"
#include "snlab/run.hpp"
#include "snlab/scenarios.hpp"

namespace py = pybind11;
using namespace snlab;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1D arrays give 1D grids; n x n x n arrays give 3D grids.
Grid grid_of(const py::buffer_info& info, double box) {
  if (info.ndim == 1) return Grid::with_box(1, static_cast<int>(info.shape[0]), box);
  if (info.ndim == 3 && info.shape[0] == info.shape[1] && info.shape[1] == info.shape[2]) {
    return Grid::with_box(3, static_cast<int>(info.shape[0]), box);
  }
  throw InvalidArgument("expected a 1D array or a cubic 3D array");
}

std::vector<py::ssize_t> shape_of(const Grid& g) {
  const auto n = static_cast<py::ssize_t>(g.points_per_axis());
  return g.dimension() == 1 ? std::vector<py::ssize_t>{n} : std::vector<py::ssize_t>{n, n, n};
}

template <class T>
py::array_t<T> to_array(const Grid& g, std::span<const T> data) {
  py::array_t<T> out(shape_of(g));
  std::copy(data.begin(), data.end(), out.mutable_data());
  return out;
}

KernelSpec kernel_of(const Grid& g, const std::string& kind, double softening, double smearing, bool image) {
  KernelSpec k;
  if (kind == "default") {
    k = KernelSpec::default_for(g);
  } else {
    k.kind = kernel_kind_from_string(kind);
    k.softening = softening > 0.0 ? softening : (k.kind == KernelKind::softened_1d ? 2.0 * g.spacing() : 0.0);
    k.smearing = smearing;
  }
  k.image_correction = image;
  k.validate(g);
  return k;
}

py::dict record_dict(const std::vector<DiagnosticsRecord>& recs) {
  py::dict d;
  auto col = [&](auto f) {
    std::vector<double> v;
    for (const auto& r : recs) v.push_back(f(r));
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
  };
  d["time"] = col([](const DiagnosticsRecord& r) { return r.time; });
  d["norm"] = col([](const DiagnosticsRecord& r) { return r.norm; });
  d["kinetic_energy"] = col([](const DiagnosticsRecord& r) { return r.kinetic_energy; });
  d["gravitational_energy"] = col([](const DiagnosticsRecord& r) { return r.gravitational_energy; });
  d["total_energy"] = col([](const DiagnosticsRecord& r) { return r.total_energy; });
  d["com_x"] = col([](const DiagnosticsRecord& r) { return r.centre_of_mass[0]; });
  d["width"] = col([](const DiagnosticsRecord& r) { return r.width; });
  return d;
}

py::dict result_dict(const ScenarioResult& r) {
  py::dict out;
  out["name"] = r.name;
  py::dict params, summary, units, labels, tables;
  for (const auto& [k, v] : r.parameters) params[py::str(k)] = v;
  for (const auto& [k, v] : r.summary) {
    summary[py::str(k)] = v.value;
    units[py::str(k)] = v.units;
  }
  for (const auto& [k, v] : r.labels) labels[py::str(k)] = v;
  for (const auto& [name, t] : r.tables) {
    py::array_t<double> rows({static_cast<py::ssize_t>(t.rows.size()), static_cast<py::ssize_t>(t.columns.size())});
    auto m = rows.mutable_unchecked<2>();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      for (std::size_t j = 0; j < t.columns.size(); ++j) m(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = t.rows[i][j];
    }
    py::dict td;
    td["columns"] = t.columns;
    td["rows"] = rows;
    tables[py::str(name)] = td;
  }
  out["parameters"] = params;
  out["summary"] = summary;
  out["units"] = units;
  out["labels"] = labels;
  out["tables"] = tables;
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs(const std::map<std::string, std::string>& m) {
  return {m.begin(), m.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Schrodinger-Newton and collapse-model solvers";
  m.attr("__version__") = library_version();

  // module-lifetime handles; the module keeps the references
  static const py::handle base = py::exception<Error>(m, "SnlabError", PyExc_RuntimeError).release();
  static const py::handle validation = py::exception<ValidationError>(m, "ValidationError", base).release();
  static const py::handle parse = py::exception<ParseError>(m, "ParseError", base).release();
  static const py::handle convergence = py::exception<ConvergenceError>(m, "ConvergenceError", base).release();
  static const py::handle blowup = py::exception<NumericalBlowup>(m, "NumericalBlowup", base).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      py::set_error(validation, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const ConvergenceError& e) {
      py::set_error(convergence, e.what());
    } catch (const NumericalBlowup& e) {
      py::set_error(blowup, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  m.def("unit_system", [](double mass_kg, double length_m) {
    const UnitSystem u = make_unit_system(mass_kg, length_m);
    py::dict d;
    d["mass_kg"] = u.mass;
    d["length_scale_m"] = u.length_scale;
    d["time_scale_s"] = u.time_scale;
    d["energy_scale_J"] = u.energy_scale();
    d["kappa"] = u.kappa;
    return d;
  }, py::arg("mass_kg"), py::arg("length_m"));

  m.def("gaussian", [](int dimension, int points, double box, double width, std::array<double, 3> centre,
                       std::array<double, 3> momentum) {
    const Grid g = Grid::with_box(dimension, points, box);
    const WaveFunction w = make_gaussian(g, width, centre, momentum);
    return to_array<Complex>(g, w.amplitudes());
  }, py::arg("dimension"), py::arg("points"), py::arg("box"), py::arg("width"),
        py::arg("centre") = std::array<double, 3>{}, py::arg("momentum") = std::array<double, 3>{});

  m.def("potential", [](RArray density, double box, double kappa, const std::string& kernel, double softening,
                        double smearing, bool image_correction) {
    const Grid g = grid_of(density.request(), box);
    const PoissonSolver solver(g, kernel_of(g, kernel, softening, smearing, image_correction));
    const std::span<const double> rho(density.data(), g.size());
    const RealField phi = solver.potential(rho, kappa);
    return to_array<double>(g, phi);
  }, py::arg("density"), py::arg("box"), py::arg("kappa"), py::arg("kernel") = "default",
        py::arg("softening") = 0.0, py::arg("smearing") = 0.0, py::arg("image_correction") = true);

  m.def("kinetic_energy", [](CArray psi, double box) {
    const Grid g = grid_of(psi.request(), box);
    return kinetic_energy(g, std::span<const Complex>(psi.data(), g.size()));
  }, py::arg("psi"), py::arg("box"));

  m.def("evolve", [](CArray psi, double box, double dt, long steps, double kappa, long record_every,
                     const std::string& mode, const std::string& kernel, double softening) {
    const Grid g = grid_of(psi.request(), box);
    EvolutionConfig cfg;
    cfg.dt = dt;
    cfg.steps = steps;
    cfg.kappa = kappa;
    cfg.record_every = record_every;
    cfg.mode = evolution_mode_from_string(mode);
    cfg.kernel = kernel_of(g, kernel, softening, 0.0, true);
    ComplexField amps(psi.data(), psi.data() + g.size());
    const Evolution ev = [&] {
      py::gil_scoped_release release;
      return evolve(WaveFunction::normalized(g, std::move(amps)), cfg);
    }();
    return py::make_tuple(record_dict(ev.records), to_array<Complex>(g, ev.final_state.amplitudes()));
  }, py::arg("psi"), py::arg("box"), py::arg("dt"), py::arg("steps"), py::arg("kappa"), py::arg("record_every") = 1,
        py::arg("mode") = "sn", py::arg("kernel") = "default", py::arg("softening") = 0.0);

  m.def("ground_state", [](int dimension, int points, double box, double kappa, double tolerance,
                           long max_iterations) {
    const Grid g = Grid::with_box(dimension, points, box);
    GroundStateOptions opt;
    opt.tolerance = tolerance;
    opt.max_iterations = max_iterations;
    opt.kernel = KernelSpec::default_for(g);
    GroundStateResult r = [&] {
      py::gil_scoped_release release;
      return find_ground_state(g, kappa, opt);
    }();
    py::dict d;
    d["psi"] = to_array<Complex>(g, r.state.amplitudes());
    d["energy"] = r.diagnostics.total_energy;
    d["kinetic_energy"] = r.diagnostics.kinetic_energy;
    d["gravitational_energy"] = r.diagnostics.gravitational_energy;
    d["chemical_potential"] = r.chemical_potential;
    d["residual"] = r.residual;
    d["iterations"] = r.iterations;
    return d;
  }, py::arg("dimension"), py::arg("points"), py::arg("box"), py::arg("kappa"), py::arg("tolerance") = 1e-6,
        py::arg("max_iterations") = 50000);

  m.def("drift_decomposition", [](CArray psi, double box, double gamma) {
    const Grid g = grid_of(psi.request(), box);
    ComplexField amps(psi.data(), psi.data() + g.size());
    const DriftDecomposition d = drift_decomposition(WaveFunction::normalized(g, std::move(amps)), gamma);
    py::dict out;
    out["gamma"] = d.gamma;
    out["kappa_sn"] = d.kappa_sn;
    out["coefficient_ratio"] = d.coefficient_ratio;
    out["nominal_ratio"] = d.nominal_ratio;
    out["field_discrepancy"] = d.field_discrepancy;
    out["sn_term"] = to_array<Complex>(g, d.sn_term);
    out["substitution_operator"] = to_array<Complex>(g, d.substitution_operator);
    return out;
  }, py::arg("psi"), py::arg("box"), py::arg("gamma"));

  m.def("signalling_distance", [](double mass_kg, double d0_m, double delta_d_m, double v_m_s, double s_m) {
    const SignallingEstimate e = signalling_distance(mass_kg, d0_m, delta_d_m, v_m_s, s_m);
    py::dict d;
    d["delta_d_predicted_m"] = e.delta_d_predicted;
    d["s_min_m"] = e.s_min;
    d["s_min_lightyears"] = e.s_min_lightyears;
    return d;
  }, py::arg("mass_kg"), py::arg("d0_m"), py::arg("delta_d_m"), py::arg("velocity_m_s") = 1.0,
        py::arg("travel_m") = 1.0);

  m.def("regime", [](double mass_kg, double sigma_m, double radius_m) {
    const RegimeVerdict v = regime_classifier(mass_kg, sigma_m, radius_m);
    py::dict d;
    d["regime"] = to_string(v.regime);
    d["nonlinear"] = v.nonlinear;
    d["margin"] = v.margin;
    return d;
  }, py::arg("mass_kg"), py::arg("sigma_m"), py::arg("radius_m"));

  m.def("heating_rate", [](double mass_kg, double r0_m) {
    const HeatingRate h = heating_rate(mass_kg, r0_m);
    return py::make_tuple(h.joules_per_second, h.kelvin_per_second);
  }, py::arg("mass_kg"), py::arg("r0_m"), "(J/s, K/s) with E = kB T");

  m.def("parse_config", [](const std::string& text, const std::string& scenario,
                           const std::map<std::string, std::string>& overrides) {
    return serialize_config(parse_config_text(text, scenario, pairs(overrides)));
  }, py::arg("text"), py::arg("scenario") = "", py::arg("overrides") = std::map<std::string, std::string>{},
        "validated config with defaults filled in, as INI text");

  m.def("run_scenario", [](const std::string& scenario, const std::map<std::string, std::string>& overrides) {
    const RunConfig cfg = parse_config_text("", scenario, pairs(overrides));
    ScenarioResult r = [&] {
      py::gil_scoped_release release;
      return execute(cfg);
    }();
    return result_dict(r);
  }, py::arg("scenario"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def("run", [](const std::string& config_text, const std::string& out_dir) {
    const RunConfig cfg = parse_config_text(config_text);
    py::gil_scoped_release release;
    std::ostringstream err;
    const int code = run(cfg, out_dir, err);
    if (code != 0) {
      py::gil_scoped_acquire acquire;
      PyErr_WarnEx(PyExc_RuntimeWarning, err.str().c_str(), 1);
    }
    return code;
  }, py::arg("config_text"), py::arg("out_dir"), "writes the artifact set and returns the exit status");
}
