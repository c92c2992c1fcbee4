"""Time-varying transforms that make a stable block cooperative.

For a stable, diagonalizable ``F`` we write ``F = V J inv(V)`` with ``J``
real block-diagonal (1x1 real eigenvalues, 2x2 scaled rotations for
conjugate pairs) and set ``P_t = Q_t inv(V)`` with ``Q_t`` orthogonal and
block-diagonal:

* DT: ``Lambda = P_{t+1} F inv(P_t)`` is non-negative and Schur. Negative
  real eigenvalues get ``Q = (-1)^t``; a pair ``r exp(+-i theta)`` gets
  ``Q = R(-theta t)`` and ``Lambda`` block ``r I``.
* CT: ``Lambda P_t = dP_t/dt + P_t F`` is Metzler and Hurwitz. A pair
  ``a +- i b`` gets ``Q = R(-b t)`` and ``Lambda`` block ``a I``.

Since every ``Q_t`` is orthogonal, ``|P_t| + |inv(P_t)|`` is constant in
the 2-norm.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NearDefective, NotStable
from .linalg import invert, is_metzler, is_nonnegative, spectrum
from .model import TimeDomain

COND_MAX = 1e6

_S = np.array([[0.0, -1.0], [1.0, 0.0]])


def rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class Real1x1:
    lam: float


@dataclass(frozen=True)
class Rot2x2:
    r: float
    theta: float

    @property
    def alpha(self):
        return self.r * np.cos(self.theta)

    @property
    def beta(self):
        return self.r * np.sin(self.theta)


@dataclass(frozen=True, eq=False)
class JordanTransform:
    domain: TimeDomain
    Lam: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray
    J: np.ndarray
    blocks: tuple
    sigma: float
    short_circuit: bool = False

    @property
    def n(self):
        return self.Lam.shape[0]

    @property
    def constant(self):
        """True when ``P_t`` does not depend on ``t``."""
        if self.short_circuit:
            return True
        if self.domain == TimeDomain.DT:
            return all(isinstance(b, Real1x1) and b.lam >= 0 for b in self.blocks)
        return all(isinstance(b, Real1x1) for b in self.blocks)


def _real_vector(v):
    v = v / np.linalg.norm(v)
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def _pair_vectors(c):
    # rotate the complex phase so that real and imaginary parts are orthogonal
    p, q = c.real, c.imag
    phi = 0.5 * np.arctan2(-2.0 * (p @ q), p @ p - q @ q)
    c = c * np.exp(1j * phi)
    c = c * np.sqrt(2.0) / np.linalg.norm(c)
    return c.real, -c.imag


def build_transform(F_no, domain, cond_max=COND_MAX):
    """Construct ``Lambda`` and ``t -> P_t`` for a stable block.

    Raises NotStable for an unstable block and NearDefective when the
    eigenvector matrix is too ill-conditioned to trust a diagonalization.
    An already Metzler (CT) or non-negative (DT) block is returned as is
    with ``P_t = I``.
    """
    domain = TimeDomain.parse(domain)
    F = np.atleast_2d(np.asarray(F_no, dtype=float))
    n = F.shape[0]
    if n == 0 or F.size == 0:
        z = np.zeros((0, 0))
        return JordanTransform(domain, z, z, z, z, (), 0.0, True)
    rep = spectrum(F)
    if domain == TimeDomain.CT and not rep.is_hurwitz():
        raise NotStable(f"block is not Hurwitz (max real part {rep.max_real_part:.3g})")
    if domain == TimeDomain.DT and not rep.is_schur():
        raise NotStable(f"block is not Schur (spectral radius {rep.spectral_radius:.3g})")

    cooperative = is_metzler(F) if domain == TimeDomain.CT else is_nonnegative(F)
    if cooperative:
        eye = np.eye(n)
        return JordanTransform(domain, F.copy(), eye, eye, F.copy(), (), 2.0, True)

    w, v = np.linalg.eig(F)
    v = v / np.linalg.norm(v, axis=0)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > cond_max:
        raise NearDefective(f"eigenvector matrix condition {cond:.3g} exceeds {cond_max:.1g}")

    picks = [i for i in range(n) if w[i].imag >= 0]
    picks.sort(key=lambda i: (w[i].real, abs(w[i].imag), i))
    cols, blocks, j_blocks, lam_blocks = [], [], [], []
    for i in picks:
        lam = w[i]
        if lam.imag == 0.0:
            cols.append(_real_vector(v[:, i].real)[:, None])
            blocks.append(Real1x1(float(lam.real)))
            j_blocks.append(np.array([[lam.real]]))
            lam_blocks.append(abs(lam.real) if domain == TimeDomain.DT else lam.real)
        else:
            p, mq = _pair_vectors(v[:, i])
            cols.append(np.column_stack([p, mq]))
            b = Rot2x2(float(abs(lam)), float(np.angle(lam)))
            blocks.append(b)
            j_blocks.append(b.r * rotation(b.theta))
            lam_blocks.append(b.r if domain == TimeDomain.DT else b.alpha)
    V = np.hstack(cols)
    if V.shape != (n, n):
        raise NearDefective("could not pair the complex spectrum into real blocks")
    J = _block_diag(j_blocks)
    V_inv = invert(V, rcond_min=1.0 / cond_max)
    if np.linalg.norm(V @ J @ V_inv - F, 2) > 1e-9 * np.linalg.norm(F, 2):
        raise NearDefective("real block diagonalization does not reproduce the block")
    Lam = np.diag(np.concatenate([np.full(m.shape[0], s) for m, s in zip(j_blocks, lam_blocks)]))
    sigma = float(np.linalg.norm(V, 2) + np.linalg.norm(V_inv, 2))
    return JordanTransform(domain, Lam, V, V_inv, J, tuple(blocks), sigma)


def _block_diag(mats):
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n))
    k = 0
    for m in mats:
        s = m.shape[0]
        out[k:k + s, k:k + s] = m
        k += s
    return out


def _q(jt, t):
    """Orthogonal block factor ``Q_t`` and its time derivative (CT only)."""
    mats, dmats = [], []
    for b in jt.blocks:
        if isinstance(b, Real1x1):
            if jt.domain == TimeDomain.DT and b.lam < 0:
                mats.append(np.array([[-1.0 if int(t) % 2 else 1.0]]))
            else:
                mats.append(np.ones((1, 1)))
            dmats.append(np.zeros((1, 1)))
        else:
            rate = b.theta if jt.domain == TimeDomain.DT else b.beta
            R = rotation(-rate * t)
            mats.append(R)
            dmats.append(-rate * _S @ R)
    return _block_diag(mats), _block_diag(dmats)


def transform_at(jt, t):
    """Return ``(P_t, inv(P_t))``. In DT ``t`` must be a whole step index."""
    if jt.short_circuit:
        eye = np.eye(jt.n)
        return eye, eye
    if jt.domain == TimeDomain.DT and float(t) != int(t):
        raise ValueError(f"discrete-time transform needs an integer step, got {t}")
    Q, _ = _q(jt, t)
    return Q @ jt.V_inv, jt.V @ Q.T


def derivative_at(jt, t):
    """Analytic ``dP_t/dt`` for a continuous-time transform."""
    if jt.domain != TimeDomain.CT:
        raise ValueError("derivative_at is only defined in continuous time")
    if jt.short_circuit:
        return np.zeros((jt.n, jt.n))
    _, dQ = _q(jt, t)
    return dQ @ jt.V_inv
