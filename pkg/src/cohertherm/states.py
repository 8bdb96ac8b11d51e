"""Density matrices and von Neumann entropy."""

from __future__ import annotations

import math

import numpy as np

from .errors import NotAState

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
ENTROPY_TOL = 1e-10
EIGEN_FLOOR = 1e-14


def _as_square(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise ValueError("a density matrix must be a non-empty square matrix")
    return m


class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    The default constructor enforces the invariants at 1e-12 (hermiticity and
    trace) and -1e-10 (smallest eigenvalue). Integrators that carry round-off
    use :meth:`trusted`, which skips validation; :func:`von_neumann_entropy`
    re-checks at its own tolerance.
    """

    __slots__ = ("_m",)

    def __init__(self, entries):
        m = _as_square(entries)
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise NotAState("matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise NotAState(f"trace is {np.trace(m).real:.15g}, not 1")
        if np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0] < -POSITIVITY_TOL:
            raise NotAState("matrix has a negative eigenvalue")
        m.flags.writeable = False
        self._m = m

    @classmethod
    def trusted(cls, entries) -> "DensityMatrix":
        obj = cls.__new__(cls)
        m = _as_square(entries)
        m.flags.writeable = False
        obj._m = m
        return obj

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        v = np.asarray(vector, dtype=complex).ravel()
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def diagonal(cls, probabilities) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probabilities, dtype=float)))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)

    @property
    def entries(self) -> np.ndarray:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self._m + self._m.conj().T))

    def trace(self) -> float:
        return float(np.trace(self._m).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self._m, self._m)))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self._m)).copy()

    def max_coherence(self) -> float:
        if self.dim < 2:
            return 0.0
        off = np.abs(self._m - np.diag(np.diag(self._m)))
        return float(off.max())

    def entropy(self, k_B: float = 1.0) -> float:
        return von_neumann_entropy(self, k_B)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._m, dtype=dtype)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def von_neumann_entropy(rho, k_B: float = 1.0) -> float:
    """``-k_B sum lambda ln lambda`` over eigenvalues above 1e-14.

    Raises:
        NotAState: if ``rho`` is not Hermitian, not of unit trace, or has an
            eigenvalue below ``-1e-10``.
    """
    if not k_B > 0:
        raise ValueError("k_B must be positive")
    m = rho.entries if isinstance(rho, DensityMatrix) else _as_square(rho)
    if np.max(np.abs(m - m.conj().T)) > ENTROPY_TOL:
        raise NotAState("matrix is not Hermitian")
    tr = np.trace(m)
    if abs(tr - 1.0) > ENTROPY_TOL:
        raise NotAState(f"trace is {tr.real:.15g}, not 1")
    lam = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    if lam[0] < -ENTROPY_TOL:
        raise NotAState(f"eigenvalue {lam[0]:.3e} is negative")
    lam = lam[lam > EIGEN_FLOOR]
    # eigenvalues a hair above 1 would otherwise give -0.0 or -1e-16
    return max(0.0, -k_B * math.fsum((lam * np.log(lam)).tolist()))
