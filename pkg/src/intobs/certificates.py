"""Numerical certificates for a synthesized design.

Every check is a named residual compared against a limit, so the design
document can list exactly what was verified and by how much it passed.
"""
from dataclasses import dataclass

import numpy as np

from .jordan import derivative_at, transform_at
from .linalg import is_hurwitz, is_metzler, is_nonnegative, is_schur
from .model import TimeDomain

SYLVESTER_TOL = 1e-10
TRANSFORM_TOL = 1e-9
SAMPLE_TIMES = 51


@dataclass(frozen=True)
class Certificate:
    name: str
    value: float
    limit: float
    passed: bool

    def to_dict(self):
        return {"value": self.value, "limit": self.limit, "passed": self.passed}


def _leq(name, value, limit):
    return Certificate(name, float(value), float(limit), bool(value <= limit))


def _flag(name, ok):
    return Certificate(name, 0.0 if ok else 1.0, 0.0, bool(ok))


def transform_residual(jt, F_no, times):
    """Largest defect of the cooperative-transform identity over ``times``."""
    worst = 0.0
    for t in times:
        P, P_inv = transform_at(jt, t)
        if jt.domain == TimeDomain.DT:
            P_next, _ = transform_at(jt, t + 1)
            r = jt.Lam - P_next @ F_no @ P_inv
        else:
            r = jt.Lam @ P - derivative_at(jt, t) - P @ F_no
        worst = max(worst, float(np.linalg.norm(r, 2)) if r.size else 0.0)
    return worst


def sigma_excess(jt, times):
    """``max_t (|P_t| + |inv(P_t)|) - sigma``; non-positive when sigma is a valid bound."""
    if jt.n == 0:
        return 0.0
    worst = -np.inf
    for t in times:
        P, P_inv = transform_at(jt, t)
        worst = max(worst, np.linalg.norm(P, 2) + np.linalg.norm(P_inv, 2) - jt.sigma)
    return float(worst)


def design_certificates(bundle, tol=1e-10, rcond_min=1e-9):
    """All design checks for ``bundle`` as a list of :class:`Certificate`."""
    dec, design, jt, domain = bundle.dec, bundle.design, bundle.jt, bundle.domain
    decomp = bundle.certificates(tol)
    out = [
        _leq("N M = I", decomp.nm_identity, tol),
        _leq("O M_no = 0", decomp.o_mno, tol),
        _leq("H M_no = 0", decomp.h_mno, tol),
        _leq("N_o F M_no = 0", decomp.no_f_mno, tol),
        _flag("(F_o, H_o) observable", decomp.observable_rank == decomp.n_o),
        _flag("F_no stable", decomp.f_no_stable),
        _leq("Sylvester residual", design.residual, SYLVESTER_TOL),
        Certificate("T rcond", design.t_rcond, rcond_min, design.t_rcond >= rcond_min),
    ]
    if domain == TimeDomain.CT:
        out.append(_flag("A_o Metzler and Hurwitz",
                         is_metzler(design.A_o) and is_hurwitz(design.A_o)))
        out.append(_flag("Lambda Metzler and Hurwitz",
                         is_metzler(jt.Lam) and is_hurwitz(jt.Lam)))
        times = np.linspace(0.0, 10.0, SAMPLE_TIMES)
    else:
        out.append(_flag("A_o non-negative and Schur",
                         is_nonnegative(design.A_o) and is_schur(design.A_o)))
        out.append(_flag("Lambda non-negative and Schur",
                         is_nonnegative(jt.Lam) and is_schur(jt.Lam)))
        times = range(SAMPLE_TIMES)
    if jt.n:
        recon = np.linalg.norm(jt.V @ jt.J @ jt.V_inv - dec.F_no, 2)
        out.append(_leq("V J inv(V) = F_no", recon, TRANSFORM_TOL * max(1.0, np.linalg.norm(dec.F_no, 2))))
    out.append(_leq("transform identity", transform_residual(jt, dec.F_no, times), TRANSFORM_TOL))
    out.append(_leq("sigma bound", sigma_excess(jt, times), 1e-12))
    return out
