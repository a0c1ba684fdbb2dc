import math

import pytest

import epidde


def test_defaults_and_beta_models():
    par = epidde.ModelParams()
    assert par.mu == pytest.approx(0.062)
    assert par.epsilon == pytest.approx(0.1961)
    assert par.omega() == pytest.approx(par.mu)
    assert par.removal() == pytest.approx(0.4 * math.exp(-4.0 / 7.0))

    linear = epidde.TempBetaModel.linear_default()
    assert epidde.beta_at(linear, 0.0) == pytest.approx(0.84)
    assert epidde.beta_at(linear, 10.0) == pytest.approx(0.84 - 0.0425)
    quad = epidde.TempBetaModel.quadratic_default()
    assert epidde.beta_at(quad, 7.73) == pytest.approx(0.792)


def test_reproduction_number_thresholds():
    par = epidde.ModelParams()
    assert epidde.reproduction_number(par, 0.5) == pytest.approx(0.882, abs=5e-4)
    assert epidde.reproduction_number(par, 1.0) == pytest.approx(1.764, abs=5e-4)


def test_equilibria():
    par = epidde.ModelParams()
    dfe = epidde.disease_free_equilibrium()
    assert dfe == [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]
    assert epidde.endemic_equilibrium(par, 0.5) is None
    star = epidde.endemic_equilibrium(par, 1.0)
    assert star is not None
    assert star[0] == pytest.approx(0.566931, abs=5e-4)
    assert star[2] == pytest.approx(0.047361, abs=5e-4)
    assert sum(star) == pytest.approx(1.0, abs=1e-9)


def test_simulation_conserves_and_settles():
    par = epidde.ModelParams()
    par.beta_model = epidde.TempBetaModel.fixed(1.0)
    times, states = epidde.simulate(par, horizon=400.0, sample_dt=1.0)
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(400.0)
    assert states[0][0] == pytest.approx(0.999)
    for row in states[:: len(states) // 10]:
        assert sum(row) == pytest.approx(1.0, abs=1e-6)
    # supercritical run heads for the interior state
    star = epidde.endemic_equilibrium(par, 1.0)
    assert states[-1][2] == pytest.approx(star[2], rel=0.2)


def test_classification():
    par = epidde.ModelParams()
    rep = epidde.classify_dfe(par, 1.0)
    assert rep["verdict"] == "unstable"
    assert rep["r0"] > 1.0
    assert rep["tau_star"] is None
    assert epidde.classify_endemic(par, 0.5) is None

    onset = epidde.ModelParams()
    onset.mu = 0.05
    onset.epsilon = 0.3
    onset.gamma = 0.05
    onset.p = 0.8
    onset.rho = 1.0 / 30.0
    onset.alpha = 0.02
    onset.delta = 3.0
    onset.kappa = 1.0
    rep = epidde.classify_dfe(onset, 0.42)
    assert rep["verdict"] == "stable_below_tau_star"
    assert rep["tau_star"] == pytest.approx(2.971652374419557, abs=1e-8)

    cd = epidde.critical_delay(onset, 0.42)
    assert isinstance(cd, dict)
    assert cd["omega_star"] == pytest.approx(0.5230602194052968, abs=1e-8)


def test_temperature_sweep_direction():
    par = epidde.ModelParams()
    rows = epidde.temperature_sweep(par, kind="linear", horizon=120.0, jobs=2)
    assert len(rows) == 11
    avg_i = [r["response"][3] for r in rows if r["ok"]]
    assert len(avg_i) == 11
    assert all(b < a for a, b in zip(avg_i, avg_i[1:]))
