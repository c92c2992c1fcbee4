"""Plant, uncertainty envelopes and scenario validation.

The plant is ``x+ = F x + u + D d``, ``y = H x + W w`` where ``x+`` is the
derivative (continuous time) or the next sample (discrete time). The known
input ``u`` enters every state directly, so there is no input matrix.
"""
import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .signals import VectorSignal


class TimeDomain(str, enum.Enum):
    CT = "ct"
    DT = "dt"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


def _frozen(a):
    a = np.atleast_2d(np.asarray(a, dtype=float)).copy()
    a.setflags(write=False)
    return a


def _frozen_vec(a):
    a = np.atleast_1d(np.asarray(a, dtype=float)).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LtiSystem:
    domain: TimeDomain
    F: np.ndarray
    D: np.ndarray
    H: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "domain", TimeDomain.parse(self.domain))
        for name in ("F", "D", "H", "W"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def n_x(self):
        return self.F.shape[0]

    @property
    def n_d(self):
        return self.D.shape[1]

    @property
    def n_y(self):
        return self.H.shape[0]

    @property
    def n_w(self):
        return self.W.shape[1]


@dataclass(frozen=True, eq=False)
class UncertaintyBounds:
    x0_upper: np.ndarray
    x0_lower: np.ndarray
    d_upper: VectorSignal
    d_lower: VectorSignal
    w_upper: VectorSignal
    w_lower: VectorSignal

    def __post_init__(self):
        object.__setattr__(self, "x0_upper", _frozen_vec(self.x0_upper))
        object.__setattr__(self, "x0_lower", _frozen_vec(self.x0_lower))

    def d_at(self, t):
        return self.d_upper(t), self.d_lower(t)

    def w_at(self, t):
        return self.w_upper(t), self.w_lower(t)


@dataclass(frozen=True, eq=False)
class Scenario:
    system: LtiSystem
    bounds: UncertaintyBounds
    u: VectorSignal
    d: VectorSignal
    w: VectorSignal
    x0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x0", _frozen_vec(self.x0))


@dataclass(frozen=True)
class Diagnostic:
    name: str
    message: str

    def __str__(self):
        return f"{self.name}: {self.message}"


@dataclass
class ValidationReport:
    diagnostics: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.diagnostics

    def add(self, name, message):
        self.diagnostics.append(Diagnostic(name, message))

    def raise_if_failed(self):
        if not self.ok:
            lines = "; ".join(str(d) for d in self.diagnostics)
            raise ValidationError(f"scenario rejected: {lines}", self.diagnostics)
        return self


def _check_system(sys, report):
    F, D, H, W = sys.F, sys.D, sys.H, sys.W
    if F.shape[0] != F.shape[1]:
        report.add("dimension", f"F must be square, got {F.shape}")
        return False
    n_x = F.shape[0]
    ok = True
    if D.shape[0] != n_x:
        report.add("dimension", f"D has {D.shape[0]} rows, expected n_x={n_x}")
        ok = False
    if H.shape[1] != n_x:
        report.add("dimension", f"H has {H.shape[1]} columns, expected n_x={n_x}")
        ok = False
    if W.shape[0] != H.shape[0]:
        report.add("dimension", f"W has {W.shape[0]} rows, expected n_y={H.shape[0]}")
        ok = False
    for name in ("F", "D", "H", "W"):
        if not np.all(np.isfinite(getattr(sys, name))):
            report.add("finiteness", f"{name} has non-finite entries")
            ok = False
    return ok


def _check_dim(report, label, actual, expected):
    if actual != expected:
        report.add("dimension", f"{label} has dimension {actual}, expected {expected}")
        return False
    return True


def check_envelopes(bounds, d, w, t, report=None, label=""):
    """Check envelope ordering and membership of the true signals at ``t``."""
    report = report if report is not None else ValidationReport()
    du, dl = bounds.d_at(t)
    wu, wl = bounds.w_at(t)
    where = f" at t={t:g}{label}"
    if np.any(dl > du):
        report.add("ordering", "disturbance envelope d_lower > d_upper" + where)
    if np.any(wl > wu):
        report.add("ordering", "noise envelope w_lower > w_upper" + where)
    if d is not None:
        dv = d(t)
        if np.any(dv < dl) or np.any(dv > du):
            report.add("envelope", "true disturbance outside its envelope" + where)
    if w is not None:
        wv = w(t)
        if np.any(wv < wl) or np.any(wv > wu):
            report.add("envelope", "true noise outside its envelope" + where)
    return report


def validate_scenario(s):
    """Return a ValidationReport; each failed check adds a named diagnostic."""
    report = ValidationReport()
    if not _check_system(s.system, report):
        return report
    sys = s.system
    b = s.bounds
    dims_ok = all([
        _check_dim(report, "x0_upper", b.x0_upper.size, sys.n_x),
        _check_dim(report, "x0_lower", b.x0_lower.size, sys.n_x),
        _check_dim(report, "x0", s.x0.size, sys.n_x),
        _check_dim(report, "u", s.u.dim, sys.n_x),
        _check_dim(report, "d", s.d.dim, sys.n_d),
        _check_dim(report, "w", s.w.dim, sys.n_w),
        _check_dim(report, "d_upper", b.d_upper.dim, sys.n_d),
        _check_dim(report, "d_lower", b.d_lower.dim, sys.n_d),
        _check_dim(report, "w_upper", b.w_upper.dim, sys.n_w),
        _check_dim(report, "w_lower", b.w_lower.dim, sys.n_w),
    ])
    if not dims_ok:
        return report
    for name, v in (("x0_upper", b.x0_upper), ("x0_lower", b.x0_lower), ("x0", s.x0)):
        if not np.all(np.isfinite(v)):
            report.add("finiteness", f"{name} has non-finite entries")
    if np.any(b.x0_lower > b.x0_upper):
        report.add("ordering", "x0_lower > x0_upper")
    elif np.any(s.x0 < b.x0_lower) or np.any(s.x0 > b.x0_upper):
        report.add("envelope", "true x0 outside the initial box")
    check_envelopes(b, s.d, s.w, 0.0, report)
    return report
