"""LTI interval observer for the observable block via ``T F_o = A_o T + B_o H_o``.

In the coordinates ``T z_o`` the error dynamics are governed by ``A_o``,
which is Metzler and Hurwitz (CT) or non-negative and Schur (DT), so
upper/lower framers stay ordered there.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGain, NearSingularT, OrderingError
from .linalg import (
    interval_image,
    invert,
    is_hurwitz,
    is_metzler,
    is_nonnegative,
    is_schur,
    pos_neg_split,
    rcond,
    solve_sylvester,
    spectrum,
)
from .model import TimeDomain

NUDGE = 2.0 ** -20
COLLISION_TOL = 1e-9
T_RCOND_MIN = 1e-9
SYLVESTER_RTOL = 1e-10
MAX_RETRIES = 10


def default_gains(F_o, H_o, domain, seed=0):
    """Deterministic stable diagonal ``A_o`` and ``B_o`` for the Sylvester design.

    DT entries are ``0.9 k / (n_o + 1)``, CT entries ``-k``, for
    ``k = 1..n_o``; an entry is bumped by ``2**-20`` until it is at least
    1e-9 away from every eigenvalue of ``F_o``. ``B_o`` is all ones for a
    single output and seeded Gaussian otherwise.
    """
    domain = TimeDomain.parse(domain)
    F_o = np.atleast_2d(F_o)
    n_o = F_o.shape[0]
    n_y = np.atleast_2d(H_o).shape[0]
    eig = spectrum(F_o).eigenvalues
    k = np.arange(1, n_o + 1, dtype=float)
    diag = 0.9 * k / (n_o + 1) if domain == TimeDomain.DT else -k
    for i in range(n_o):
        while np.any(np.abs(eig - diag[i]) <= COLLISION_TOL):
            diag[i] += NUDGE
    if n_y == 1:
        B_o = np.ones((n_o, 1))
    else:
        B_o = np.random.default_rng(seed).standard_normal((n_o, n_y))
    return np.diag(diag), B_o


def check_gain(A_o, domain):
    """Raise InvalidGain unless ``A_o`` suits the time domain."""
    A_o = np.atleast_2d(np.asarray(A_o, dtype=float))
    if A_o.shape[0] != A_o.shape[1]:
        raise InvalidGain(f"A_o must be square, got {A_o.shape}")
    if domain == TimeDomain.CT:
        if not is_metzler(A_o):
            raise InvalidGain("A_o must be Metzler in continuous time")
        if not is_hurwitz(A_o):
            raise InvalidGain("A_o must be Hurwitz in continuous time")
    else:
        if not is_nonnegative(A_o):
            raise InvalidGain("A_o must be non-negative in discrete time")
        if not is_schur(A_o):
            raise InvalidGain("A_o must be Schur in discrete time")
    return A_o


@dataclass(frozen=True, eq=False)
class SylvesterDesign:
    A_o: np.ndarray
    B_o: np.ndarray
    T: np.ndarray
    T_inv: np.ndarray
    gain: np.ndarray
    dist_plus: np.ndarray
    dist_minus: np.ndarray
    noise_plus: np.ndarray
    noise_minus: np.ndarray
    init_plus: np.ndarray
    init_minus: np.ndarray
    bound_plus: np.ndarray
    bound_minus: np.ndarray
    residual: float
    t_rcond: float
    seed: int

    @property
    def n_o(self):
        return self.T.shape[0]


def design_from_T(dec, A_o, B_o, T, W, seed=0):
    """Package the observer constants for a given transform ``T``.

    No check that ``T`` actually solves the Sylvester equation is made
    here beyond recording the residual.
    """
    T_inv = invert(T)
    BH = B_o @ dec.H_o
    residual = float(
        np.linalg.norm(T @ dec.F_o - A_o @ T - BH, 2) / (1.0 + np.linalg.norm(BH, 2))
    )
    td_p, td_m = pos_neg_split(T @ dec.D_o)
    bw_p, bw_m = pos_neg_split(B_o @ np.atleast_2d(W))
    tn_p, tn_m = pos_neg_split(T @ dec.N_o)
    ti_p, ti_m = pos_neg_split(T_inv)
    return SylvesterDesign(
        A_o=A_o,
        B_o=B_o,
        T=T,
        T_inv=T_inv,
        gain=T_inv @ B_o,
        dist_plus=T_inv @ td_p,
        dist_minus=T_inv @ td_m,
        noise_plus=T_inv @ bw_p,
        noise_minus=T_inv @ bw_m,
        init_plus=T_inv @ tn_p,
        init_minus=T_inv @ tn_m,
        bound_plus=ti_p @ T,
        bound_minus=ti_m @ T,
        residual=residual,
        t_rcond=rcond(T),
        seed=seed,
    )


def solve_T(F_o, H_o, A_o, B_o):
    """``T`` with ``T F_o = A_o T + B_o H_o`` (may raise SpectraOverlap)."""
    return solve_sylvester(-np.asarray(A_o), F_o, np.asarray(B_o) @ H_o)


def build_design(dec, W, A_o=None, B_o=None, seed=0, rcond_min=T_RCOND_MIN,
                 max_retries=MAX_RETRIES):
    """Solve for ``T`` and precompute every constant of the z_o observer.

    Missing gains come from :func:`default_gains`. When ``B_o`` was
    generated automatically and ``T`` comes out (nearly) singular, fresh
    seeded ``B_o`` draws are tried ``max_retries`` times before giving up
    with NearSingularT.
    """
    domain = dec.domain
    auto_A, auto_B = default_gains(dec.F_o, dec.H_o, domain, seed)
    A_o = auto_A if A_o is None else check_gain(A_o, domain)
    if A_o.shape != (dec.n_o, dec.n_o):
        raise InvalidGain(f"A_o must be {dec.n_o}x{dec.n_o}, got {A_o.shape}")
    user_B = B_o is not None
    if user_B:
        B_o = np.asarray(B_o, dtype=float).reshape(dec.n_o, -1)
        if B_o.shape[1] != dec.H_o.shape[0]:
            raise InvalidGain(f"B_o must be {dec.n_o}x{dec.H_o.shape[0]}, got {B_o.shape}")
    else:
        B_o = auto_B
    attempts = 1 if user_B else max_retries + 1
    for attempt in range(attempts):
        if attempt:
            B_o = np.random.default_rng(seed + attempt).standard_normal(B_o.shape)
        T = solve_T(dec.F_o, dec.H_o, A_o, B_o)
        if rcond(T) >= rcond_min:
            return design_from_T(dec, A_o, B_o, T, W, seed=seed + attempt)
    raise NearSingularT(
        f"Sylvester solution T is singular (rcond {rcond(T):.2e} < {rcond_min:.0e})"
        + ("" if user_B else f" after {max_retries} retries")
    )


def zo_initial_state(design, x0_upper, x0_lower):
    """Initial framers of the internal z_o observer state."""
    x0_upper = np.asarray(x0_upper, dtype=float)
    x0_lower = np.asarray(x0_lower, dtype=float)
    if np.any(x0_lower > x0_upper):
        raise OrderingError("x0_lower > x0_upper")
    upper = x0_upper @ design.init_plus.T - x0_lower @ design.init_minus.T
    lower = x0_lower @ design.init_plus.T - x0_upper @ design.init_minus.T
    return upper, lower


def zo_initial_bounds(dec, x0_upper, x0_lower):
    """Bounds on ``z_o`` at time 0, straight from the initial box."""
    lo, up = interval_image(dec.N_o, x0_lower, x0_upper)
    return up, lo

