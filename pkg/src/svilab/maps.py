"""Monotone operators used as the mean maps of stochastic oracles.

Each map carries its monotonicity modulus ``mu`` (0 for merely monotone
maps) and Lipschitz constant ``lipschitz`` as verified metadata: affine
maps check the declared values against the matrix spectrum at
construction time, the bimatrix map derives them from the payoff matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation

__all__ = ["AffineMap", "BimatrixMap", "ShiftedMap"]

# slack allowed between declared and spectral (mu, L) metadata
_META_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class AffineMap:
    """Map ``F(x) = A x + b`` with spectral monotonicity metadata.

    ``mu`` is the smallest eigenvalue of the symmetric part of ``A`` and
    must be nonnegative, ``lipschitz`` is the spectral norm of ``A``.
    Declared values are verified against the matrix within ``1e-9``;
    omitted values are computed.

    Parameters
    ----------
    matrix : numpy.ndarray
        Square matrix ``A``.
    offset : numpy.ndarray
        Vector ``b``.
    mu, lipschitz : float, optional
        Declared metadata. Leave ``None`` to compute from ``matrix``.
    """

    matrix: np.ndarray
    offset: np.ndarray
    mu: float = None
    lipschitz: float = None

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=np.float64)
        b = np.asarray(self.offset, dtype=np.float64)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("matrix must be square")
        if b.shape != (A.shape[0],):
            raise ValueError("offset length must match matrix size")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("matrix and offset must be finite")
        sym_eigs = np.linalg.eigvalsh(0.5 * (A + A.T))
        mu_true = float(sym_eigs[0])
        lip_true = float(np.linalg.norm(A, 2))
        if mu_true < -_META_TOL:
            raise ValueError(
                f"matrix is not monotone: min symmetric eigenvalue {mu_true:.3e}"
            )
        mu_true = max(mu_true, 0.0)
        if self.mu is not None and abs(float(self.mu) - mu_true) > _META_TOL:
            raise ValueError(
                f"declared mu {float(self.mu):.12g} does not match the "
                f"symmetric spectrum ({mu_true:.12g})"
            )
        if self.lipschitz is not None and abs(float(self.lipschitz) - lip_true) > _META_TOL:
            raise ValueError(
                f"declared lipschitz {float(self.lipschitz):.12g} does not match "
                f"the spectral norm ({lip_true:.12g})"
            )
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", b)
        object.__setattr__(self, "mu", mu_true if self.mu is None else float(self.mu))
        object.__setattr__(
            self, "lipschitz", lip_true if self.lipschitz is None else float(self.lipschitz)
        )

    @property
    def dimension(self):
        return self.offset.size

    def __call__(self, x):
        out = self.matrix @ x
        out += self.offset
        return out


@dataclass(frozen=True, eq=False)
class BimatrixMap:
    """Saddle map of the expected-payoff game ``min_x max_y <A x, y>``.

    For ``z = (x, y)`` returns ``(A^T y, -A x)``. Skew by construction,
    so ``mu = 0`` and ``lipschitz`` equals the spectral norm of ``A``.
    """

    payoff: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.payoff, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("payoff must be a matrix")
        if not np.all(np.isfinite(A)):
            raise ValueError("payoff must be finite")
        object.__setattr__(self, "payoff", A)
        object.__setattr__(self, "_lip", float(np.linalg.norm(A, 2)))

    @property
    def n(self):
        return self.payoff.shape[1]

    @property
    def m(self):
        return self.payoff.shape[0]

    @property
    def dimension(self):
        return self.n + self.m

    @property
    def mu(self):
        return 0.0

    @property
    def lipschitz(self):
        return self._lip

    def __call__(self, z):
        A = self.payoff
        m, n = A.shape
        out = np.empty(n + m)
        np.matmul(A.T, z[n:], out=out[:n])
        np.matmul(A, z[:n], out=out[n:])
        np.negative(out[n:], out=out[n:])
        return out


@dataclass(frozen=True, eq=False)
class ShiftedMap:
    """Tikhonov shift ``F(x) + (1/lam) (x - center)`` of a base map.

    The shift raises the monotonicity modulus by ``1/lam`` and the
    Lipschitz constant by the same amount. Used to form proximal
    subproblems.
    """

    base: object
    lam: float
    center: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lam must be positive")
        c = np.asarray(self.center, dtype=np.float64)
        if c.shape != (self.base.dimension,):
            raise ContractViolation(
                f"center length {c.size} does not match map dimension "
                f"{self.base.dimension}"
            )
        if not np.all(np.isfinite(c)):
            raise ContractViolation("center must be finite")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "center", c)

    @property
    def dimension(self):
        return self.base.dimension

    @property
    def mu(self):
        return self.base.mu + 1.0 / self.lam

    @property
    def lipschitz(self):
        return self.base.lipschitz + 1.0 / self.lam

    def __call__(self, x):
        out = self.base(x)
        tmp = x - self.center
        tmp /= self.lam
        out += tmp
        return out
