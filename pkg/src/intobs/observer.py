"""Interval observers built on an observability decomposition.

Two interchangeable forms are provided:

* cascade: an LTI framer for ``z_o`` feeding a time-varying framer for
  ``z_no``; the x-bounds come from mapping both boxes back through ``M``.
* direct: the same recursion written as one stacked system with the
  constant and time-varying blocks assembled once.

Internal states are stacked as ``[z_o part | z_no part]`` on the last
axis, so a leading batch axis (one row per Monte Carlo trial) is carried
through every operation. In discrete time the step functions return the
next state; in continuous time the identical expressions are the state
derivative and the caller integrates them.
"""
from dataclasses import dataclass

import numpy as np

from .decomposition import decompose, verify_decomposition
from .jordan import build_transform, transform_at
from .linalg import box_image, interval_image, pos_neg_split
from .model import TimeDomain
from .sylvester import build_design, zo_initial_bounds, zo_initial_state


@dataclass(frozen=True, eq=False)
class DesignBundle:
    system: object
    dec: object
    design: object
    jt: object

    @property
    def domain(self):
        return self.system.domain

    @property
    def n_o(self):
        return self.dec.n_o

    @property
    def n_no(self):
        return self.dec.n_no

    @property
    def n_x(self):
        return self.system.n_x

    def certificates(self, tol=1e-10):
        return verify_decomposition(self.dec, self.system.F, self.system.H, tol)


def synthesize(system, A_o=None, B_o=None, basis="pivot", rank_tol=1e-9, seed=0,
               rcond_min=1e-9, cond_max=1e6):
    """Run every offline design step and return a DesignBundle."""
    dec = decompose(system, rel_tol=rank_tol, strategy=basis)
    design = build_design(dec, system.W, A_o=A_o, B_o=B_o, seed=seed, rcond_min=rcond_min)
    jt = build_transform(dec.F_no, system.domain, cond_max=cond_max)
    return DesignBundle(system, dec, design, jt)


@dataclass(frozen=True, eq=False)
class ObserverState:
    upper: np.ndarray
    lower: np.ndarray
    t: float
    n_o: int

    @property
    def zhat_o_upper(self):
        return self.upper[..., :self.n_o]

    @property
    def zhat_o_lower(self):
        return self.lower[..., :self.n_o]

    @property
    def zhat_no_upper(self):
        return self.upper[..., self.n_o:]

    @property
    def zhat_no_lower(self):
        return self.lower[..., self.n_o:]


def sigma_at(jt, t):
    """Transform factor applied to exogenous inputs: P_t (CT) or P_{t+1} (DT)."""
    if jt.domain == TimeDomain.DT:
        return transform_at(jt, int(t) + 1)[0]
    return transform_at(jt, t)[0]


def closed_loop(design, dec):
    """``F_o - inv(T) B_o H_o``, similar to ``A_o``."""
    return dec.F_o - design.gain @ dec.H_o


def step_zo(design, dec, zhat_up, zhat_lo, y, u, d_bounds, w_bounds):
    """One update of the z_o framers (next state in DT, derivative in CT)."""
    d_up, d_lo = d_bounds
    w_up, w_lo = w_bounds
    A = closed_loop(design, dec)
    common = u @ dec.N_o.T + y @ design.gain.T
    up = (zhat_up @ A.T + common
          + d_up @ design.dist_plus.T - d_lo @ design.dist_minus.T
          + w_up @ design.noise_minus.T - w_lo @ design.noise_plus.T)
    lo = (zhat_lo @ A.T + common
          + d_lo @ design.dist_plus.T - d_up @ design.dist_minus.T
          + w_lo @ design.noise_minus.T - w_up @ design.noise_plus.T)
    return up, lo


def zo_bounds(design, zhat_up, zhat_lo):
    """Bounds on ``z_o`` recovered from the framers in ``T z_o`` coordinates."""
    up = zhat_up @ design.bound_plus.T - zhat_lo @ design.bound_minus.T
    lo = zhat_lo @ design.bound_plus.T - zhat_up @ design.bound_minus.T
    return up, lo


def step_zno(jt, dec, zhat_up, zhat_lo, zo_up, zo_lo, u, d_bounds, t):
    """One update of the z_no framers, with ``z_o`` treated as a bounded input."""
    d_up, d_lo = d_bounds
    S = sigma_at(jt, t)
    sf_p, sf_m = pos_neg_split(S @ dec.F_noo)
    sd_p, sd_m = pos_neg_split(S @ dec.D_no)
    drive = u @ (S @ dec.N_no).T
    up = (zhat_up @ jt.Lam.T + drive
          + zo_up @ sf_p.T - zo_lo @ sf_m.T
          + d_up @ sd_p.T - d_lo @ sd_m.T)
    lo = (zhat_lo @ jt.Lam.T + drive
          + zo_lo @ sf_p.T - zo_up @ sf_m.T
          + d_lo @ sd_p.T - d_up @ sd_m.T)
    return up, lo


def zno_bounds(jt, zhat_up, zhat_lo, t):
    _, P_inv = transform_at(jt, t)
    pi_p, pi_m = pos_neg_split(P_inv)
    up = zhat_up @ pi_p.T - zhat_lo @ pi_m.T
    lo = zhat_lo @ pi_p.T - zhat_up @ pi_m.T
    return up, lo


def zno_initial_state(jt, dec, x0_upper, x0_lower):
    P0, _ = transform_at(jt, 0)
    lo, up = interval_image(P0 @ dec.N_no, x0_lower, x0_upper)
    return up, lo


def zno_initial_bounds(dec, x0_upper, x0_lower):
    lo, up = interval_image(dec.N_no, x0_lower, x0_upper)
    return up, lo


def recombine(dec, zo_b, zno_b):
    """Map ``(z_o, z_no)`` boxes back to an x-box through ``x = M_o z_o + M_no z_no``."""
    lo_o, up_o = box_image(dec.M_o, zo_b[1], zo_b[0])
    lo_no, up_no = box_image(dec.M_no, zno_b[1], zno_b[0])
    return up_o + up_no, lo_o + lo_no


def width_coefficients(bundle, t):
    """Matrices that propagate framer widths; all must be entrywise non-negative."""
    dec, design, jt = bundle.dec, bundle.design, bundle.jt
    S = sigma_at(jt, t)
    # |M| = M+ + M- is what the width recursions multiply by
    return {
        "A_o": design.A_o,
        "Lambda": jt.Lam,
        "|T D_o|": np.abs(design.T @ dec.D_o),
        "|B_o W|": np.abs(design.B_o @ bundle.system.W),
        "|Sigma F_noo|": np.abs(S @ dec.F_noo),
        "|Sigma D_no|": np.abs(S @ dec.D_no),
    }


class CascadeObserver:
    """z_o framer -> z_no framer -> recombination."""

    form = "cascade"

    def __init__(self, bundle):
        self.bundle = bundle
        self.dec = bundle.dec
        self.design = bundle.design
        self.jt = bundle.jt
        self.n_o = bundle.n_o

    def initial_state(self, x0_upper, x0_lower):
        zo_u, zo_l = zo_initial_state(self.design, x0_upper, x0_lower)
        zn_u, zn_l = zno_initial_state(self.jt, self.dec, x0_upper, x0_lower)
        return ObserverState(np.concatenate([zo_u, zn_u], axis=-1),
                             np.concatenate([zo_l, zn_l], axis=-1), 0.0, self.n_o)

    def rhs(self, state, y, u, d_bounds, w_bounds):
        n = self.n_o
        zo_u, zo_l = state.upper[..., :n], state.lower[..., :n]
        zo_up, zo_lo = step_zo(self.design, self.dec, zo_u, zo_l, y, u, d_bounds, w_bounds)
        # the coupling uses the T-coordinate bounds at every t, including t = 0
        cu, cl = zo_bounds(self.design, zo_u, zo_l)
        zn_up, zn_lo = step_zno(self.jt, self.dec, state.upper[..., n:], state.lower[..., n:],
                                cu, cl, u, d_bounds, state.t)
        return (np.concatenate([zo_up, zn_up], axis=-1),
                np.concatenate([zo_lo, zn_lo], axis=-1))

    def z_bounds(self, state):
        n = self.n_o
        zo_b = zo_bounds(self.design, state.upper[..., :n], state.lower[..., :n])
        zno_b = zno_bounds(self.jt, state.upper[..., n:], state.lower[..., n:], state.t)
        return zo_b, zno_b

    def bounds(self, state):
        """x-bounds for ``t > 0``; at ``t = 0`` the initial box is used instead."""
        zo_b, zno_b = self.z_bounds(state)
        return recombine(self.dec, zo_b, zno_b)


@dataclass(frozen=True, eq=False)
class _TimeBlocks:
    A: np.ndarray
    B: np.ndarray
    D_plus: np.ndarray
    D_minus: np.ndarray
    U: np.ndarray
    out_l: np.ndarray
    out_r: np.ndarray


class DirectObserver:
    """The cascade written as a single stacked recursion.

    Blocks that do not depend on ``t`` are built once here; ``blocks_at``
    fills in the ``P_t``-dependent rows. When ``P_t`` is constant the
    whole system is precomputed.
    """

    form = "direct"

    def __init__(self, bundle):
        self.bundle = bundle
        dec, design, jt = bundle.dec, bundle.design, bundle.jt
        self.dec, self.design, self.jt = dec, design, jt
        n_o, n_no = dec.n_o, dec.n_no
        self.n_o = n_o
        self.A_top = closed_loop(design, dec)
        ti_p, ti_m = pos_neg_split(design.T_inv)
        self.tp_T = ti_p @ design.T
        self.tm_T = ti_m @ design.T
        mo_p, mo_m = pos_neg_split(dec.M_o)
        self.phi_l = mo_p @ self.tp_T + mo_m @ self.tm_T
        self.phi_r = mo_p @ self.tm_T + mo_m @ self.tp_T
        self.mno_p, self.mno_m = pos_neg_split(dec.M_no)
        self.W_plus = np.vstack([design.noise_minus, np.zeros((n_no, design.noise_minus.shape[1]))])
        self.W_minus = np.vstack([design.noise_plus, np.zeros((n_no, design.noise_plus.shape[1]))])
        self.Y = np.vstack([design.gain, np.zeros((n_no, design.gain.shape[1]))])
        self._cached = self._assemble(0.0) if jt.constant else None

    def _assemble(self, t):
        dec, design, jt = self.dec, self.design, self.jt
        n_o, n_no = dec.n_o, dec.n_no
        S = sigma_at(jt, t)
        sf_p, sf_m = pos_neg_split(S @ dec.F_noo)
        sd_p, sd_m = pos_neg_split(S @ dec.D_no)
        Phi = sf_p @ self.tp_T + sf_m @ self.tm_T
        Omega = -sf_p @ self.tm_T - sf_m @ self.tp_T
        A = np.block([[self.A_top, np.zeros((n_o, n_no))], [Phi, jt.Lam]])
        B = np.block([[np.zeros((n_o, n_o)), np.zeros((n_o, n_no))],
                      [Omega, np.zeros((n_no, n_no))]])
        D_plus = np.vstack([design.dist_plus, sd_p])
        D_minus = np.vstack([design.dist_minus, sd_m])
        U = np.vstack([dec.N_o, S @ dec.N_no])
        _, P_inv = transform_at(jt, t)
        pi_p, pi_m = pos_neg_split(P_inv)
        vl = self.mno_p @ pi_p + self.mno_m @ pi_m
        vr = self.mno_p @ pi_m + self.mno_m @ pi_p
        return _TimeBlocks(A, B, D_plus, D_minus, U,
                           np.hstack([self.phi_l, vl]), np.hstack([self.phi_r, vr]))

    def blocks_at(self, t):
        return self._cached if self._cached is not None else self._assemble(t)

    def initial_state(self, x0_upper, x0_lower):
        zo_u, zo_l = zo_initial_state(self.design, x0_upper, x0_lower)
        zn_u, zn_l = zno_initial_state(self.jt, self.dec, x0_upper, x0_lower)
        return ObserverState(np.concatenate([zo_u, zn_u], axis=-1),
                             np.concatenate([zo_l, zn_l], axis=-1), 0.0, self.n_o)

    def rhs(self, state, y, u, d_bounds, w_bounds):
        b = self.blocks_at(state.t)
        d_up, d_lo = d_bounds
        w_up, w_lo = w_bounds
        common = u @ b.U.T + y @ self.Y.T
        up = (state.upper @ b.A.T + state.lower @ b.B.T
              + d_up @ b.D_plus.T - d_lo @ b.D_minus.T
              + w_up @ self.W_plus.T - w_lo @ self.W_minus.T + common)
        lo = (state.lower @ b.A.T + state.upper @ b.B.T
              + d_lo @ b.D_plus.T - d_up @ b.D_minus.T
              + w_lo @ self.W_plus.T - w_up @ self.W_minus.T + common)
        return up, lo

    def bounds(self, state):
        """x-bounds for ``t > 0``; at ``t = 0`` the initial box is used instead."""
        b = self.blocks_at(state.t)
        up = state.upper @ b.out_l.T - state.lower @ b.out_r.T
        lo = state.lower @ b.out_l.T - state.upper @ b.out_r.T
        return up, lo


def assemble_direct(bundle):
    return DirectObserver(bundle)


def make_observer(bundle, form="cascade"):
    if form == "cascade":
        return CascadeObserver(bundle)
    if form == "direct":
        return DirectObserver(bundle)
    raise ValueError(f"unknown observer form {form!r}")


def initial_bounds(dec, x0_upper, x0_lower):
    """Time-0 bounds of ``(z_o, z_no)`` used for reporting."""
    return zo_initial_bounds(dec, x0_upper, x0_lower), zno_initial_bounds(dec, x0_upper, x0_lower)
