"""Plant simulation, lockstep observer runs and Monte Carlo campaigns.

Discrete time is simulated exactly. Continuous time uses classical RK4
with a fixed step; plant and observer share one augmented state so they
see identical stage times. Signals are tabulated once on the half-step
grid ``t_j = j h / 2`` that RK4 visits.

Trials are carried along a leading batch axis, so a Monte Carlo campaign
is a single vectorized run.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, EnvelopeViolation, OrderingError
from .model import TimeDomain
from .observer import ObserverState, initial_bounds, make_observer
from .signals import RNG_ALGORITHM, sample_box

DT_SLACK = 1e-9
CT_SLACK = 1e-6


@dataclass
class SimulationConfig:
    """``horizon`` is a step count in DT and a final time in CT."""

    horizon: float = 300
    ct_step: float = 1e-3
    record_stride: int = 1
    seed: int = 0
    trials: int = 1
    tolerance: float = None

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        if not self.ct_step > 0:
            raise ValueError("ct_step must be positive")
        if self.record_stride < 1:
            raise ValueError("record_stride must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def steps(self, domain):
        if TimeDomain.parse(domain) == TimeDomain.DT:
            return int(round(self.horizon))
        return int(round(self.horizon / self.ct_step))

    def slack(self, domain):
        if self.tolerance is not None:
            return self.tolerance
        return DT_SLACK if TimeDomain.parse(domain) == TimeDomain.DT else CT_SLACK


@dataclass
class StateTrajectory:
    times: np.ndarray
    x: np.ndarray
    y: np.ndarray


@dataclass
class IntervalTrajectory:
    times: np.ndarray
    x: np.ndarray
    x_upper: np.ndarray
    x_lower: np.ndarray
    z: dict = field(default_factory=dict)

    @property
    def width(self):
        return self.x_upper - self.x_lower

    @property
    def slack(self):
        """Positive entries are containment violations."""
        return np.maximum(self.x_lower - self.x, self.x - self.x_upper)


@dataclass
class ContainmentReport:
    violations: int
    worst_slack: float
    tolerance: float
    max_width: np.ndarray
    mean_width: np.ndarray
    final_width: np.ndarray
    decay_rate: float
    max_inversion: float
    runtime: float
    steps: int
    trials: int
    form: str
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def ok(self):
        return self.violations == 0

    def summary(self):
        def fmt(a):
            return "[" + ", ".join(f"{v:.4g}" for v in a) + "]"

        return "\n".join([
            f"form: {self.form}   trials: {self.trials}   steps: {self.steps}"
            f"   seed: {self.seed} ({self.rng})",
            f"containment violations: {self.violations}"
            f"   worst slack: {self.worst_slack:.3e} (tolerance {self.tolerance:.1e})",
            f"max width:   {fmt(self.max_width)}",
            f"mean width:  {fmt(self.mean_width)}",
            f"final width: {fmt(self.final_width)}",
            f"largest-width contraction per unit time: {self.decay_rate:.4g}",
            f"runtime: {self.runtime:.3f} s",
        ])

    def to_dict(self):
        return {
            "violations": self.violations,
            "worst_slack": self.worst_slack,
            "tolerance": self.tolerance,
            "max_width": self.max_width.tolist(),
            "mean_width": self.mean_width.tolist(),
            "final_width": self.final_width.tolist(),
            "decay_rate": self.decay_rate,
            "max_inversion": self.max_inversion,
            "runtime": self.runtime,
            "steps": self.steps,
            "trials": self.trials,
            "form": self.form,
            "seed": self.seed,
            "rng": self.rng,
        }


def _table(signal, grid):
    """Evaluate a VectorSignal on a time grid -> (len(grid), dim)."""
    return np.atleast_2d(signal(grid)).T.reshape(len(grid), signal.dim)


def _grid(domain, n_steps, h):
    if domain == TimeDomain.DT:
        return np.arange(n_steps + 1, dtype=float)
    return np.arange(2 * n_steps + 1) * (h / 2.0)


@dataclass
class _Drive:
    """Tabulated inputs for one run; ``d``/``w`` give true values per (step, stage)."""

    grid: np.ndarray
    u: np.ndarray
    d_up: np.ndarray
    d_lo: np.ndarray
    w_up: np.ndarray
    w_lo: np.ndarray
    d_table: np.ndarray = None
    w_table: np.ndarray = None
    d_held: np.ndarray = None
    w_held: np.ndarray = None

    def d(self, k, j):
        return self.d_held[:, k] if self.d_held is not None else self.d_table[j]

    def w(self, k, j):
        return self.w_held[:, k] if self.w_held is not None else self.w_table[j]


def _check_envelopes(drive):
    for name, up, lo in (("disturbance", drive.d_up, drive.d_lo), ("noise", drive.w_up, drive.w_lo)):
        bad = np.nonzero(np.any(lo > up, axis=1))[0]
        if bad.size:
            raise OrderingError(f"{name} envelope unordered at t={drive.grid[bad[0]]:g}")
    for name, table, up, lo in (("disturbance", drive.d_table, drive.d_up, drive.d_lo),
                                ("noise", drive.w_table, drive.w_up, drive.w_lo)):
        if table is None:
            continue
        bad = np.nonzero(np.any((table < lo) | (table > up), axis=1))[0]
        if bad.size:
            raise EnvelopeViolation(f"true {name} leaves its envelope at t={drive.grid[bad[0]]:g}")


def _drive_from_scenario(scenario, grid):
    b = scenario.bounds
    drive = _Drive(grid, _table(scenario.u, grid),
                   _table(b.d_upper, grid), _table(b.d_lower, grid),
                   _table(b.w_upper, grid), _table(b.w_lower, grid),
                   d_table=_table(scenario.d, grid), w_table=_table(scenario.w, grid))
    _check_envelopes(drive)
    return drive


def _plant_rhs(sys, x, u, d):
    return x @ sys.F.T + u + d @ sys.D.T


def simulate_plant(scenario, config):
    """Simulate the plant alone with the scenario's true signals."""
    sys = scenario.system
    domain = sys.domain
    n = config.steps(domain)
    h = config.ct_step
    drive = _drive_from_scenario(scenario, _grid(domain, n, h))
    stride = 1 if domain == TimeDomain.DT else 2

    def rhs(x, j):
        return _plant_rhs(sys, x, drive.u[j], drive.d_table[j])

    x = np.array(scenario.x0, dtype=float)
    xs = [x]
    for k in range(n):
        if domain == TimeDomain.DT:
            x = rhs(x, k)
        else:
            j = 2 * k
            k1 = rhs(x, j)
            k2 = rhs(x + 0.5 * h * k1, j + 1)
            k3 = rhs(x + 0.5 * h * k2, j + 1)
            k4 = rhs(x + h * k3, j + 2)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(f"plant state diverged at step {k + 1}")
        xs.append(x)
    xs = np.array(xs)
    ys = xs @ sys.H.T + drive.w_table[::stride] @ sys.W.T
    return StateTrajectory(drive.grid[::stride], xs, ys)


def _lockstep(bundle, scenario, drive, x0, config, form):
    """Run plant and observer together; arrays come back as (steps+1, trials, n)."""
    sys = bundle.system
    domain = sys.domain
    n_steps = config.steps(domain)
    h = config.ct_step
    obs = make_observer(bundle, form)
    x0u, x0l = scenario.bounds.x0_upper, scenario.bounds.x0_lower
    state = obs.initial_state(x0u, x0l)
    K = x0.shape[0]
    x = x0.copy()
    n_x = sys.n_x

    xs = np.empty((n_steps + 1, K, n_x))
    ups = np.empty_like(xs)
    los = np.empty_like(xs)
    zrec = None
    if form == "cascade":
        zrec = {key: np.empty((n_steps + 1, K, m)) for key, m in
                (("zo_upper", bundle.n_o), ("zo_lower", bundle.n_o),
                 ("zno_upper", bundle.n_no), ("zno_lower", bundle.n_no))}
        (zo_u, zo_l), (zn_u, zn_l) = initial_bounds(bundle.dec, x0u, x0l)
        zrec["zo_upper"][0], zrec["zo_lower"][0] = zo_u, zo_l
        zrec["zno_upper"][0], zrec["zno_lower"][0] = zn_u, zn_l
    xs[0], ups[0], los[0] = x, x0u, x0l

    def observer_rhs(t, j, k, x, up, lo):
        d_b = (drive.d_up[j], drive.d_lo[j])
        w_b = (drive.w_up[j], drive.w_lo[j])
        y = x @ sys.H.T + drive.w(k, j) @ sys.W.T
        return obs.rhs(ObserverState(up, lo, t, bundle.n_o), y, drive.u[j], d_b, w_b)

    up, lo = np.broadcast_to(state.upper, (K, n_x)), np.broadcast_to(state.lower, (K, n_x))
    for k in range(n_steps):
        if domain == TimeDomain.DT:
            j = k
            nup, nlo = observer_rhs(float(k), j, k, x, up, lo)
            x = _plant_rhs(sys, x, drive.u[j], drive.d(k, j))
            up, lo = nup, nlo
            t_next = float(k + 1)
        else:
            t0 = drive.grid[2 * k]
            ts = (t0, drive.grid[2 * k + 1], drive.grid[2 * k + 1], drive.grid[2 * k + 2])
            js = (2 * k, 2 * k + 1, 2 * k + 1, 2 * k + 2)
            scales = (0.0, 0.5 * h, 0.5 * h, h)
            ks = []
            for t_s, j_s, c in zip(ts, js, scales):
                if ks:
                    dx, dup, dlo = ks[-1]
                    xs_, us_, ls_ = x + c * dx, up + c * dup, lo + c * dlo
                else:
                    xs_, us_, ls_ = x, up, lo
                dup_, dlo_ = observer_rhs(t_s, j_s, k, xs_, us_, ls_)
                dx_ = _plant_rhs(sys, xs_, drive.u[j_s], drive.d(k, j_s))
                ks.append((dx_, dup_, dlo_))
            w6 = h / 6.0
            x = x + w6 * (ks[0][0] + 2 * ks[1][0] + 2 * ks[2][0] + ks[3][0])
            up = up + w6 * (ks[0][1] + 2 * ks[1][1] + 2 * ks[2][1] + ks[3][1])
            lo = lo + w6 * (ks[0][2] + 2 * ks[1][2] + 2 * ks[2][2] + ks[3][2])
            t_next = drive.grid[2 * k + 2]
        st = ObserverState(up, lo, t_next, bundle.n_o)
        bu, bl = obs.bounds(st)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(bu)) and np.all(np.isfinite(bl))):
            raise DivergenceError(f"simulation diverged at step {k + 1}")
        xs[k + 1], ups[k + 1], los[k + 1] = x, bu, bl
        if zrec is not None:
            (zo_u, zo_l), (zn_u, zn_l) = obs.z_bounds(st)
            zrec["zo_upper"][k + 1], zrec["zo_lower"][k + 1] = zo_u, zo_l
            zrec["zno_upper"][k + 1], zrec["zno_lower"][k + 1] = zn_u, zn_l
    times = drive.grid if domain == TimeDomain.DT else drive.grid[::2]
    return times, xs, ups, los, zrec


def _report(times, xs, ups, los, config, domain, form, runtime):
    tol = config.slack(domain)
    slack = np.maximum(los - xs, xs - ups)
    width = ups - los
    n_steps = len(times) - 1
    mw = width.max(axis=(1, 2))
    span = times[-1] - times[0]
    if span > 0 and mw[0] > 0 and mw[-1] > 0:
        decay = float((mw[-1] / mw[0]) ** (1.0 / span))
    else:
        decay = 0.0
    return ContainmentReport(
        violations=int(np.sum(slack > tol)),
        worst_slack=float(slack.max()),
        tolerance=tol,
        max_width=width.max(axis=(0, 1)),
        mean_width=width.mean(axis=(0, 1)),
        final_width=width[-1].max(axis=0),
        decay_rate=decay,
        max_inversion=float((los - ups).max()),
        runtime=runtime,
        steps=n_steps,
        trials=xs.shape[1],
        form=form,
        seed=config.seed,
    )


def run_pipeline(scenario, bundle, config, form="cascade"):
    """Simulate plant and observer in lockstep with the scenario's true signals."""
    start = time.perf_counter()
    domain = bundle.domain
    grid = _grid(domain, config.steps(domain), config.ct_step)
    drive = _drive_from_scenario(scenario, grid)
    x0 = np.asarray(scenario.x0, dtype=float)[None, :]
    times, xs, ups, los, zrec = _lockstep(bundle, scenario, drive, x0, config, form)
    report = _report(times, xs, ups, los, config, domain, form, time.perf_counter() - start)
    idx = np.arange(0, len(times), config.record_stride)
    if idx[-1] != len(times) - 1:
        idx = np.append(idx, len(times) - 1)
    z = {key: v[idx, 0] for key, v in zrec.items()} if zrec else {}
    traj = IntervalTrajectory(times[idx], xs[idx, 0], ups[idx, 0], los[idx, 0], z)
    return traj, report


def _sample_held(rng_list, up, lo, n_steps, domain):
    """Per-step samples inside the envelope, held constant across RK4 stages."""
    if domain == TimeDomain.DT:
        lo_k, up_k = lo[:n_steps], up[:n_steps]
    else:
        # intersection of the envelope over the three stage times of each step
        lo_k = np.maximum.reduce([lo[0:-1:2], lo[1::2], lo[2::2]])
        up_k = np.minimum.reduce([up[0:-1:2], up[1::2], up[2::2]])
        if np.any(lo_k > up_k):
            raise OrderingError("envelope too narrow to hold a sample across an RK4 step")
    return np.stack([sample_box(lo_k, up_k, rng) for rng in rng_list])


def trial_rngs(seed, trials):
    """Independent generators, one per trial, derived from ``(seed, trial)``."""
    return [np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
            for i in range(trials)]


def monte_carlo(scenario, bundle, config, form="cascade"):
    """Containment campaign with sampled ``x0``, ``d_t`` and ``w_t``.

    Every trial draws its initial state uniformly in the initial box and
    per-step disturbance/noise values uniformly inside their envelopes.
    All trials run as one batch.
    """
    start = time.perf_counter()
    domain = bundle.domain
    n_steps = config.steps(domain)
    grid = _grid(domain, n_steps, config.ct_step)
    b = scenario.bounds
    drive = _Drive(grid, _table(scenario.u, grid),
                   _table(b.d_upper, grid), _table(b.d_lower, grid),
                   _table(b.w_upper, grid), _table(b.w_lower, grid))
    _check_envelopes(drive)
    rngs = trial_rngs(config.seed, config.trials)
    x0 = np.stack([sample_box(b.x0_lower, b.x0_upper, rng) for rng in rngs])
    drive.d_held = _sample_held(rngs, drive.d_up, drive.d_lo, n_steps, domain)
    drive.w_held = _sample_held(rngs, drive.w_up, drive.w_lo, n_steps, domain)
    times, xs, ups, los, _ = _lockstep(bundle, scenario, drive, x0, config, form)
    return _report(times, xs, ups, los, config, domain, form, time.perf_counter() - start)
