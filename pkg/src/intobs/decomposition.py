"""Observability decomposition into an observable and a detectable part.

With ``M = [M_o M_no]`` where the columns of ``M_no`` span ``ker O`` and
``N = inv(M) = [N_o; N_no]``, the coordinates ``z = N x`` obey

    z_o+  = F_o z_o + N_o u + D_o d
    z_no+ = F_noo z_o + F_no z_no + N_no u + D_no d
    y     = H_o z_o + W w
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotDetectable, ZeroObservableRank
from .linalg import RANK_RTOL, invert, kernel_basis, numerical_rank, spectrum
from .model import TimeDomain

STRATEGIES = ("pivot", "orthonormal")


def observability_matrix(F, H):
    """Stack ``H, HF, ..., HF^(n-1)``."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    n = F.shape[0]
    if F.shape != (n, n) or H.shape[1] != n:
        raise DimensionError(f"incompatible F{F.shape} and H{H.shape}")
    rows = [H]
    for _ in range(n - 1):
        rows.append(rows[-1] @ F)
    return np.vstack(rows)


def _domain_stable(M, domain):
    rep = spectrum(M)
    return rep.is_hurwitz() if domain == TimeDomain.CT else rep.is_schur()


@dataclass(frozen=True, eq=False)
class ObservabilityDecomposition:
    domain: TimeDomain
    strategy: str
    O: np.ndarray
    M_o: np.ndarray
    M_no: np.ndarray
    N_o: np.ndarray
    N_no: np.ndarray
    F_o: np.ndarray
    F_noo: np.ndarray
    F_no: np.ndarray
    D_o: np.ndarray
    D_no: np.ndarray
    H_o: np.ndarray

    @property
    def n_o(self):
        return self.M_o.shape[1]

    @property
    def n_no(self):
        return self.M_no.shape[1]

    @property
    def n_x(self):
        return self.M_o.shape[0]

    @property
    def M(self):
        return np.hstack([self.M_o, self.M_no])

    @property
    def N(self):
        return np.vstack([self.N_o, self.N_no])


def _pivot_basis(O, n_o, rel_tol):
    n = O.shape[1]
    _, _, piv = scipy.linalg.qr(O, pivoting=True, mode="economic")
    cols = np.sort(piv[:n_o])
    M_o = np.eye(n)[:, cols]
    M_no = kernel_basis(O, rel_tol)
    for j in range(M_no.shape[1]):
        col = M_no[:, j]
        M_no[:, j] = col / col[np.argmax(np.abs(col))]
    return M_o, M_no


def _orthonormal_basis(O, n_o):
    _, _, vh = np.linalg.svd(O)
    return vh[:n_o].T.copy(), vh[n_o:].T.copy()


def decompose(sys, rel_tol=RANK_RTOL, strategy="pivot"):
    """Split ``sys`` into observable / non-observable blocks.

    ``strategy="pivot"`` takes unit vectors at the pivot columns of a
    column-pivoted QR of the observability matrix for ``M_o`` and an
    orthonormal kernel basis rescaled so each column's largest entry is
    +1 for ``M_no``. ``strategy="orthonormal"`` uses right singular
    vectors for both.

    Raises ZeroObservableRank if the output sees nothing and
    NotDetectable if the non-observable block is not stable.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown basis strategy {strategy!r}")
    F, H, D = sys.F, sys.H, sys.D
    O = observability_matrix(F, H)
    n_o = numerical_rank(O, rel_tol)
    if n_o == 0:
        raise ZeroObservableRank("observability matrix has rank 0")
    if strategy == "pivot":
        M_o, M_no = _pivot_basis(O, n_o, rel_tol)
    else:
        M_o, M_no = _orthonormal_basis(O, n_o)
    N = invert(np.hstack([M_o, M_no]))
    N_o, N_no = N[:n_o], N[n_o:]
    dec = ObservabilityDecomposition(
        domain=sys.domain,
        strategy=strategy,
        O=O,
        M_o=M_o,
        M_no=M_no,
        N_o=N_o,
        N_no=N_no,
        F_o=N_o @ F @ M_o,
        F_noo=N_no @ F @ M_o,
        F_no=N_no @ F @ M_no,
        D_o=N_o @ D,
        D_no=N_no @ D,
        H_o=H @ M_o,
    )
    if not _domain_stable(dec.F_no, sys.domain):
        kind = "Hurwitz" if sys.domain == TimeDomain.CT else "Schur"
        ev = spectrum(dec.F_no).eigenvalues
        raise NotDetectable(f"non-observable block is not {kind}; eigenvalues {ev}")
    return dec


@dataclass(frozen=True)
class CertificateReport:
    tol: float
    nm_identity: float
    o_mno: float
    h_mno: float
    no_f_mno: float
    observable_rank: int
    n_o: int
    f_no_stable: bool

    @property
    def checks(self):
        return {
            "N M = I": self.nm_identity <= self.tol,
            "O M_no = 0": self.o_mno <= self.tol,
            "H M_no = 0": self.h_mno <= self.tol,
            "N_o F M_no = 0": self.no_f_mno <= self.tol,
            "(F_o, H_o) observable": self.observable_rank == self.n_o,
            "F_no stable": self.f_no_stable,
        }

    @property
    def passed(self):
        return all(self.checks.values())


def _relnorm(residual, *scales):
    if residual.size == 0:
        return 0.0
    s = 1.0
    for m in scales:
        if m.size:
            s *= max(1.0, np.linalg.norm(m, 2))
    return float(np.linalg.norm(residual, 2) / s)


def verify_decomposition(dec, F, H, tol=1e-10):
    """Residuals of the defining identities, each scaled by the operand norms."""
    F = np.atleast_2d(np.asarray(F, dtype=float))
    H = np.atleast_2d(np.asarray(H, dtype=float))
    O = observability_matrix(F, H)
    M, N = dec.M, dec.N
    return CertificateReport(
        tol=tol,
        nm_identity=_relnorm(N @ M - np.eye(dec.n_x), N, M),
        o_mno=_relnorm(O @ dec.M_no, O, dec.M_no),
        h_mno=_relnorm(H @ dec.M_no, H, dec.M_no),
        no_f_mno=_relnorm(dec.N_o @ F @ dec.M_no, dec.N_o, F, dec.M_no),
        observable_rank=numerical_rank(observability_matrix(dec.F_o, dec.H_o)),
        n_o=dec.n_o,
        f_no_stable=_domain_stable(dec.F_no, dec.domain),
    )
