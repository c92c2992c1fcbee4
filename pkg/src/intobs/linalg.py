"""Dense matrix primitives shared by the design and observer modules.

Everything here is a pure function of numpy arrays. Interval arithmetic
follows the positive/negative split ``M = M+ - M-`` with both parts
entrywise non-negative.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NearSingular, OrderingError, SpectraOverlap

RANK_RTOL = 1e-9
KRONECKER_MAX_DIM = 12


def as_matrix(a, name="matrix"):
    """Coerce ``a`` to a finite 2-D float array."""
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def pos_neg_split(M):
    """Return ``(M+, M-)`` with ``M+ = max(M, 0)`` and ``M- = M+ - M``."""
    M = np.asarray(M, dtype=float)
    plus = np.maximum(M, 0.0)
    return plus, plus - M


def interval_image(A, a_low, a_high):
    """Tightest box containing ``A @ a`` for every ``a_low <= a <= a_high``.

    Works on batched bounds as well: the trailing axis is the vector axis.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    a_low = np.asarray(a_low, dtype=float)
    a_high = np.asarray(a_high, dtype=float)
    if a_low.shape != a_high.shape or a_low.shape[-1:] != (A.shape[1],):
        raise DimensionError(
            f"cannot map bounds of shape {a_low.shape}/{a_high.shape} through {A.shape}"
        )
    if np.any(a_low > a_high):
        raise OrderingError("interval_image needs a_low <= a_high")
    return box_image(A, a_low, a_high)


def box_image(A, a_low, a_high):
    """:func:`interval_image` without shape or ordering checks (hot path)."""
    plus, minus = pos_neg_split(A)
    low = a_low @ plus.T - a_high @ minus.T
    high = a_high @ plus.T - a_low @ minus.T
    return low, high


def numerical_rank(M, rel_tol=RANK_RTOL):
    s = np.linalg.svd(np.atleast_2d(M), compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def kernel_basis(M, rel_tol=RANK_RTOL):
    """Orthonormal basis (as columns) of the numerical null space of ``M``."""
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, s, vh = np.linalg.svd(M)
    rank = 0 if s.size == 0 or s[0] == 0.0 else int(np.sum(s > rel_tol * s[0]))
    return vh[rank:].T.copy()


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    spectral_radius: float
    max_real_part: float

    def is_hurwitz(self, margin=0.0):
        return self.max_real_part < -margin

    def is_schur(self, margin=0.0):
        return self.spectral_radius < 1.0 - margin


def spectrum(M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"spectrum needs a square matrix, got {M.shape}")
    if M.size == 0:
        # empty block: vacuously stable
        return SpectrumReport(np.zeros(0, dtype=complex), 0.0, -np.inf)
    ev = np.linalg.eigvals(M)
    return SpectrumReport(ev, float(np.max(np.abs(ev))), float(np.max(ev.real)))


def is_metzler(M):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    off = M[~np.eye(*M.shape, dtype=bool)]
    return bool(np.all(off >= 0))


def is_nonnegative(M):
    return bool(np.all(np.asarray(M) >= 0))


def is_hurwitz(M, margin=0.0):
    return spectrum(M).is_hurwitz(margin)


def is_schur(M, margin=0.0):
    return spectrum(M).is_schur(margin)


def _kronecker_sylvester(P, Q, R):
    # column-major vec: vec(PX + XQ) = (I (x) P + Q^T (x) I) vec(X)
    p, q = R.shape
    K = np.kron(np.eye(q), P) + np.kron(Q.T, np.eye(p))
    x = np.linalg.solve(K, R.reshape(-1, order="F"))
    return x.reshape((p, q), order="F")


def solve_sylvester(P, Q, R, method="auto", overlap_tol=1e-9):
    """Solve ``P @ X + X @ Q = R`` for ``X``.

    ``method`` is ``"kronecker"`` (vectorized dense solve), ``"schur"``
    (Bartels-Stewart through LAPACK) or ``"auto"``, which picks the
    Kronecker route when both sides are at most 12x12.

    Raises SpectraOverlap when an eigenvalue of ``P`` coincides with an
    eigenvalue of ``-Q``; the solution is then not unique.
    """
    P, Q, R = (np.atleast_2d(np.asarray(m, dtype=float)) for m in (P, Q, R))
    p, q = P.shape[0], Q.shape[0]
    if P.shape != (p, p) or Q.shape != (q, q) or R.shape != (p, q):
        raise DimensionError(f"incompatible shapes P{P.shape} Q{Q.shape} R{R.shape}")
    ep = np.linalg.eigvals(P)
    eq = np.linalg.eigvals(Q)
    gap = np.min(np.abs(ep[:, None] + eq[None, :]))
    scale = 1.0 + max(np.max(np.abs(ep)), np.max(np.abs(eq)))
    if gap <= overlap_tol * scale:
        raise SpectraOverlap(
            f"spectra of P and -Q overlap (closest distance {gap:.3e})"
        )
    if method == "auto":
        method = "kronecker" if max(p, q) <= KRONECKER_MAX_DIM else "schur"
    if method == "kronecker":
        return _kronecker_sylvester(P, Q, R)
    if method == "schur":
        return scipy.linalg.solve_sylvester(P, Q, R)
    raise ValueError(f"unknown method {method!r}")


def rcond(M):
    """Reciprocal 2-norm condition number, 0 for singular input."""
    s = np.linalg.svd(np.atleast_2d(M), compute_uv=False)
    if s.size == 0:
        return 1.0
    return 0.0 if s[0] == 0.0 else float(s[-1] / s[0])


def invert(M, rcond_min=1e-12):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"cannot invert non-square {M.shape}")
    if M.size == 0:
        return M.copy()
    rc = rcond(M)
    if rc < rcond_min:
        raise NearSingular(f"reciprocal condition {rc:.3e} below {rcond_min:.1e}")
    return np.linalg.inv(M)
