import numpy as np
import pytest

from conftest import quiet_doc

from intobs import design_bundle, from_document, preset
from intobs.config import simulation_config
from intobs.errors import EnvelopeViolation
from intobs.model import LtiSystem, Scenario, UncertaintyBounds
from intobs.signals import vector_signal
from intobs.simulation import SimulationConfig, monte_carlo, run_pipeline, simulate_plant, trial_rngs


def scalar_scenario(domain, d="0", d_env=("0", "0")):
    sys = LtiSystem(domain, [[-1.0]] if domain == "ct" else [[0.5]], [[1.0]], [[1.0]], [[1.0]])
    bounds = UncertaintyBounds([1.0], [-1.0], vector_signal([d_env[0]]), vector_signal([d_env[1]]),
                               vector_signal(["0"]), vector_signal(["0"]))
    return Scenario(sys, bounds, vector_signal(["sin(1*t)"]), vector_signal([d]),
                    vector_signal(["0"]), [0.5])


def test_dt_plant_matches_recursion():
    s = scalar_scenario("dt")
    traj = simulate_plant(s, SimulationConfig(horizon=10))
    x = 0.5
    for k in range(10):
        assert traj.x[k, 0] == x
        x = 0.5 * x + np.sin(k)
    assert traj.x[10, 0] == x
    np.testing.assert_array_equal(traj.times, np.arange(11))
    np.testing.assert_array_equal(traj.y, traj.x)


def test_ct_plant_matches_closed_form():
    # x' = -x + sin t, x(0) = 0.5
    traj = simulate_plant(scalar_scenario("ct"), SimulationConfig(horizon=5.0, ct_step=1e-2))
    t = traj.times
    exact = (np.sin(t) - np.cos(t)) / 2 + np.exp(-t)
    np.testing.assert_allclose(traj.x[:, 0], exact, atol=1e-9)


def test_true_signal_outside_envelope_is_fatal():
    s = scalar_scenario("dt", d="0.2*sin(1*t)", d_env=("0.1", "-0.1"))
    with pytest.raises(EnvelopeViolation):
        simulate_plant(s, SimulationConfig(horizon=10))


def test_config_validation_and_steps():
    assert SimulationConfig(horizon=2.0, ct_step=0.1).steps("ct") == 20
    assert SimulationConfig(horizon=7).steps("dt") == 7
    assert SimulationConfig().slack("dt") == 1e-9
    assert SimulationConfig().slack("ct") == 1e-6
    assert SimulationConfig(tolerance=1e-3).slack("ct") == 1e-3
    for bad in (dict(horizon=0), dict(ct_step=-1), dict(record_stride=0), dict(trials=0)):
        with pytest.raises(ValueError):
            SimulationConfig(**bad)


@pytest.mark.parametrize("form", ["cascade", "direct"])
def test_dt_preset_containment(dt_preset, form):
    loaded, bundle = dt_preset
    traj, report = run_pipeline(loaded.scenario, bundle, simulation_config(loaded), form=form)
    assert report.violations == 0
    assert np.all(traj.slack <= 1e-9)
    assert traj.x.shape == (301, 4)
    np.testing.assert_array_equal(traj.x_upper[0], np.ones(4))


def test_cascade_records_z_bounds(dt_preset):
    loaded, bundle = dt_preset
    traj, _ = run_pipeline(loaded.scenario, bundle, simulation_config(loaded, steps=20))
    assert set(traj.z) == {"zo_upper", "zo_lower", "zno_upper", "zno_lower"}
    N = bundle.dec.N
    z = traj.x @ N.T
    assert np.all(z[:, :3] <= traj.z["zo_upper"] + 1e-9)
    assert np.all(z[:, :3] >= traj.z["zo_lower"] - 1e-9)
    assert np.all(z[:, 3:] <= traj.z["zno_upper"] + 1e-9)
    assert np.all(z[:, 3:] >= traj.z["zno_lower"] - 1e-9)


def test_record_stride_keeps_last_step(dt_preset):
    loaded, bundle = dt_preset
    traj, _ = run_pipeline(loaded.scenario, bundle, simulation_config(loaded, steps=10, record_stride=4))
    np.testing.assert_array_equal(traj.times, [0, 4, 8, 10])


def test_dt_zero_uncertainty_collapses():
    loaded = from_document(quiet_doc("paper-dt"))
    traj, report = run_pipeline(loaded.scenario, design_bundle(loaded), simulation_config(loaded))
    assert report.violations == 0
    assert traj.width[60:].max() <= 1e-10


def test_ct_zero_uncertainty_matches_exponential_oracle():
    loaded = from_document(quiet_doc("paper-ct"))
    bundle = design_bundle(loaded)
    cfg = simulation_config(loaded, tfinal=3.0)
    traj, report = run_pipeline(loaded.scenario, bundle, cfg)
    t = traj.times
    # widths from the framer ODEs: w1' = -3 w1, w2' = -2 w2 + w1, w1(0) = w2(0) = 2
    w1 = 2 * np.exp(-3 * t)
    w2 = 4 * np.exp(-2 * t) - 2 * np.exp(-3 * t)
    np.testing.assert_allclose(traj.width[:, 0], w1, rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(traj.width[:, 1], w2, rtol=1e-9, atol=1e-14)
    assert report.violations == 0


def test_monte_carlo_is_deterministic(dt_preset):
    loaded, bundle = dt_preset
    cfg = simulation_config(loaded, steps=50, trials=10, seed=3)
    a = monte_carlo(loaded.scenario, bundle, cfg)
    b = monte_carlo(loaded.scenario, bundle, cfg)
    assert a.worst_slack == b.worst_slack and a.violations == b.violations == 0
    c = monte_carlo(loaded.scenario, bundle, simulation_config(loaded, steps=50, trials=10, seed=4))
    assert c.worst_slack != a.worst_slack
    assert a.rng == "PCG64" and a.trials == 10


def test_monte_carlo_ct(ct_preset):
    loaded, bundle = ct_preset
    cfg = simulation_config(loaded, tfinal=1.0, ct_step=1e-2, trials=5)
    assert monte_carlo(loaded.scenario, bundle, cfg).violations == 0


def test_trial_streams():
    a = [g.random() for g in trial_rngs(7, 3)]
    b = [g.random() for g in trial_rngs(7, 3)]
    assert a == b and len(set(a)) == 3
    # trial i's stream does not depend on how many trials run
    assert trial_rngs(7, 5)[2].random() == a[2]


def test_report_serialization(dt_preset):
    loaded, bundle = dt_preset
    _, report = run_pipeline(loaded.scenario, bundle, simulation_config(loaded, steps=5))
    d = report.to_dict()
    assert d["steps"] == 5 and d["form"] == "cascade" and d["violations"] == 0
    assert "containment violations: 0" in report.summary()


def test_preset_is_a_copy():
    doc = preset("paper-dt")
    doc["F"][0][0] = 99
    assert preset("paper-dt")["F"][0][0] == -1


def test_horizon_overrides(dt_preset, ct_preset):
    dt_loaded, _ = dt_preset
    ct_loaded, _ = ct_preset
    assert simulation_config(dt_loaded).steps("dt") == 300
    assert simulation_config(dt_loaded, tfinal=12.0).steps("dt") == 12
    assert simulation_config(ct_loaded).horizon == 10
    cfg = simulation_config(ct_loaded, steps=50, ct_step=0.01)
    assert cfg.horizon == pytest.approx(0.5) and cfg.steps("ct") == 50
