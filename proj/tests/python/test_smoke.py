import math

import numpy as np
import pytest

import snlab


def test_version():
    assert snlab.__version__ == "0.3.0"


def test_unit_system_kappa():
    u = snlab.unit_system(1e-17, 0.5e-6)
    assert u["kappa"] == pytest.approx(3.0007, rel=1e-4)
    assert u["time_scale_s"] == pytest.approx(1e-17 * 0.25e-12 / 1.054571817e-34)


def test_gaussian_free_spreading():
    psi = snlab.gaussian(1, 256, 60.0, 1.0)
    assert psi.dtype == np.complex128
    assert psi.shape == (256,)
    records, final = snlab.evolve(psi, 60.0, 0.01, 200, 0.0, record_every=50)
    law = math.sqrt(1.0 + 2.0**2 / 4.0)
    assert records["width"][-1] == pytest.approx(law, rel=1e-4)
    assert np.sum(np.abs(final) ** 2) * 60.0 / 256 == pytest.approx(1.0, abs=1e-12)


def test_self_gravity_slows_spreading():
    psi = snlab.gaussian(1, 256, 60.0, 1.0)
    free, _ = snlab.evolve(psi, 60.0, 0.01, 200, 0.0, record_every=200)
    sn, _ = snlab.evolve(psi, 60.0, 0.01, 200, 5.0, record_every=200)
    assert sn["width"][-1] < free["width"][-1]


def test_potential_is_real_and_attractive():
    psi = snlab.gaussian(3, 16, 12.0, 1.5)
    phi = snlab.potential(np.abs(psi) ** 2, 12.0, 1.0)
    assert phi.shape == (16, 16, 16)
    assert phi[8, 8, 8] < 0.0
    assert phi[8, 8, 8] == phi.min()


def test_kinetic_energy_of_gaussian():
    psi = snlab.gaussian(1, 256, 60.0, 1.0)
    assert snlab.kinetic_energy(psi, 60.0) == pytest.approx(1.0 / 8.0, rel=1e-10)


def test_small_ground_state_is_virial():
    gs = snlab.ground_state(3, 16, 24.0, 1.0, tolerance=1e-5)
    assert gs["energy"] < 0.0
    assert 2 * gs["kinetic_energy"] / abs(gs["gravitational_energy"]) == pytest.approx(1.0, abs=0.05)


def test_drift_decomposition_ratio():
    psi = snlab.gaussian(3, 8, 8.0, 1.5)
    d = snlab.drift_decomposition(psi, 8.0, 0.1)
    assert d["coefficient_ratio"] == pytest.approx(1.0, abs=1e-10)


def test_closed_forms():
    amu = 1.66053906660e-27
    assert 0.65 < snlab.signalling_distance(1e4 * amu, 1e-6, 1e-6)["s_min_lightyears"] < 2.0
    _, kelvin = snlab.heating_rate(1.67262192369e-27, 1e-15)
    assert 1e-5 < kelvin < 1e-3
    assert snlab.regime(1e-17, 1e-6, 1e-9)["regime"] == "wide"


def test_errors_are_typed():
    with pytest.raises(snlab.ValidationError):
        snlab.parse_config("[physics]\nmass_kg = -1\n", "evolve")
    with pytest.raises(snlab.ParseError):
        snlab.parse_config("[grid]\nbogus = 1\n", "evolve")
    with pytest.raises(snlab.SnlabError):
        snlab.ground_state(3, 16, 24.0, 1.0, max_iterations=5)
    assert issubclass(snlab.ConvergenceError, snlab.SnlabError)


def test_parse_config_round_trip():
    text = snlab.parse_config("", "heating", {"run.seed": "5"})
    assert "seed = 5" in text
    assert snlab.parse_config(text) == text


def test_run_scenario_and_artifacts(tmp_path):
    r = snlab.run_scenario("signalling")
    assert r["summary"]["S_min_lightyears"] == pytest.approx(1.3461, rel=1e-3)
    text = snlab.parse_config("[grid]\npoints_per_axis = 64\n[time]\nsteps = 20\n", "evolve")
    assert snlab.run(text, str(tmp_path)) == 0
    assert {p.name for p in tmp_path.iterdir()} >= {"metadata.txt", "timeseries.csv", "summary.txt"}
    lines = [l for l in (tmp_path / "timeseries.csv").read_text().splitlines() if l and not l.startswith("#")]
    assert lines[0].startswith("time,")
    assert len(lines) == 1 + 20 // 10 + 1
