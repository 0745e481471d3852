import json
import os

import numpy as np
import pytest

import nematic

CONFIGS = os.environ.get("NEMATIC_CONFIG_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "configs"))

BASE = """[domain]
dim = 2
resolution = 16, 16
mode = periodic

[material]
mu_lo = 0.5
mu_hi = 1.0
lambda_hi = 1.0

[galerkin]
n_modes = 8
m_modes = 4
dt = 0.01
t_end = 0.05

[initial]
preset = random-smooth
seed = 7
amplitude = 0.5
theta0 = 1.5
theta_amplitude = 0.2
director = random
director_amplitude = 0.8
"""


def test_config_round_trip():
    c = nematic.parse_config(BASE)
    assert c.resolution[:2] == [16, 16]
    assert c.n_modes == 8 and c.m_modes == 4
    assert nematic.parse_config(c.dump()) == c
    assert nematic.parse_config(BASE, ["galerkin.dt=0.002"]).dt == 0.002


def test_config_errors():
    with pytest.raises(nematic.ConfigError, match="line"):
        nematic.parse_config(BASE.replace("dt = 0.01", "dt = -1"))
    with pytest.raises(ValueError):
        nematic.parse_config(BASE + "bogus = 1\n")


def test_shipped_configs_load():
    for name in ("random_smooth.ini", "study.ini", "taylor_green.ini", "channel.ini"):
        nematic.load_config(os.path.join(CONFIGS, name))


def test_initial_state_is_divergence_free():
    c = nematic.parse_config(BASE)
    s = nematic.initial_state(c)
    ux, uy = s["u"]
    assert ux.shape == (16, 16)
    assert len(s["d"]) == 3
    assert s["theta"].min() > 0
    # spectral divergence, axis 1 is x
    k = np.fft.fftfreq(16, 1.0 / 16)
    div = np.fft.ifft2(1j * k[None, :] * np.fft.fft2(ux) + 1j * k[:, None] * np.fft.fft2(uy)).real
    assert np.abs(div).max() < 1e-10


def test_leray_projection_removes_gradients():
    c = nematic.parse_config(BASE)
    x = np.arange(16) * 2 * np.pi / 16
    X, Y = np.meshgrid(x, x)
    grad = [np.cos(X) * np.sin(2 * Y), 2 * np.sin(X) * np.cos(2 * Y)]
    out = nematic.leray_project(c, grad)
    assert max(np.abs(a).max() for a in out) < 1e-12
    shear = [np.sin(Y), np.zeros_like(Y)]
    out = nematic.leray_project(c, shear)
    assert np.abs(out[0] - shear[0]).max() < 1e-12
    with pytest.raises(ValueError):
        nematic.leray_project(c, [np.zeros(5), np.zeros(5)])


def test_material_laws():
    c = nematic.parse_config(BASE)
    assert 0.5 <= nematic.viscosity(c, 1.0) <= 1.0
    assert 0.0 < nematic.dilatation(c, 1.0) <= 1.0


def test_run_conserves_energy(tmp_path):
    c = nematic.parse_config(BASE)
    r = nematic.run(c, str(tmp_path))
    assert not r["aborted"]
    assert len(r["ledgers"]) == 6
    assert max(abs(l["energy_drift"]) for l in r["ledgers"]) < 1e-10
    assert r["invariants"]["energy_conservation"][0]
    summary = json.loads(r["summary_json"])
    assert "\"seed\"" in json.dumps(summary)
    assert (tmp_path / "ledger.csv").exists()


def test_study_repeated_level_is_zero():
    c = nematic.parse_config(BASE)
    rows = nematic.study(c, [8, 8], [4])
    assert rows[0]["phase"] == "N"
    assert rows[0]["u_l2"] == 0.0 and rows[0]["theta_l1"] == 0.0
