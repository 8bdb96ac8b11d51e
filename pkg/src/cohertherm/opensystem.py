"""Closed and Markovian open-system density-matrix dynamics.

The Lindblad generator is

    d rho/dt = -(i/hbar)[H, rho] + sum_k g_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)

and is integrated with classical fixed-step RK4 on the row-major vectorised
state (``vec(A X B) = (A kron B^T) vec(X)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    AsymmetricCouplings,
    CutoffTooSmall,
    DimensionMismatch,
    NotHermitian,
    PositivityLoss,
    StabilityViolation,
)
from .states import DensityMatrix, von_neumann_entropy

HERMITIAN_TOL = 1e-12
PROJECTOR_TOL = 1e-10
STABILITY_LIMIT = 0.1
POSITIVITY_FLOOR = -1e-6
DEFAULT_CUTOFF = 4


def _matrix(a, name: str) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square")
    return m


def _check_hermitian(h: np.ndarray, name: str = "hamiltonian") -> None:
    if np.max(np.abs(h - h.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NotHermitian(f"{name} is not Hermitian")


@dataclass(frozen=True, eq=False)
class LindbladModel:
    hamiltonian: np.ndarray
    jump_operators: tuple[np.ndarray, ...] = ()
    rates: tuple[float, ...] = ()
    hbar: float = 1.0

    def __post_init__(self):
        h = _matrix(self.hamiltonian, "hamiltonian")
        _check_hermitian(h)
        ops = tuple(_matrix(l, "jump operator") for l in self.jump_operators)
        rates = tuple(float(g) for g in self.rates)
        if len(ops) != len(rates):
            raise ValueError("one rate per jump operator is required")
        if any(not g >= 0 for g in rates):
            raise ValueError("rates must be non-negative")
        if any(l.shape != h.shape for l in ops):
            raise DimensionMismatch("jump operators must match the Hamiltonian's shape")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        h.flags.writeable = False
        for l in ops:
            l.flags.writeable = False
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "jump_operators", ops)
        object.__setattr__(self, "rates", rates)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def generator(self) -> np.ndarray:
        """Superoperator acting on row-major ``vec(rho)``."""
        d = self.dim
        eye = np.eye(d)
        h = self.hamiltonian / self.hbar
        sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
        for l, g in zip(self.jump_operators, self.rates):
            if g == 0:
                continue
            ldl = l.conj().T @ l
            sup = sup + g * (np.kron(l, l.conj()) - 0.5 * np.kron(ldl, eye) - 0.5 * np.kron(eye, ldl.T))
        return sup


@dataclass(frozen=True, eq=False)
class CoherentSubspace:
    projector: np.ndarray

    def __post_init__(self):
        p = _matrix(self.projector, "projector")
        if np.max(np.abs(p - p.conj().T)) > HERMITIAN_TOL:
            raise NotHermitian("projector is not Hermitian")
        if np.max(np.abs(p @ p - p)) > PROJECTOR_TOL:
            raise ValueError("projector is not idempotent")
        p.flags.writeable = False
        object.__setattr__(self, "projector", p)

    @classmethod
    def spanned_by(cls, vectors) -> "CoherentSubspace":
        v = np.atleast_2d(np.asarray(vectors, dtype=complex))
        q, _ = np.linalg.qr(v.T)
        return cls(q @ q.conj().T)


@dataclass(frozen=True, eq=False)
class ResonantCoupling:
    site_count: int
    couplings: np.ndarray
    site_energies: tuple[float, ...] | None = None

    def __post_init__(self):
        j = np.array(self.couplings, dtype=float)
        if j.shape != (self.site_count, self.site_count):
            raise DimensionMismatch("couplings must be site_count x site_count")
        if self.site_energies is not None and len(self.site_energies) != self.site_count:
            raise DimensionMismatch("one site energy per site is required")
        j.flags.writeable = False
        object.__setattr__(self, "couplings", j)


@dataclass(frozen=True, eq=False)
class PhononCoupling:
    site_count: int
    mode_count: int
    mode_frequencies: tuple[float, ...]
    couplings: np.ndarray
    fock_cutoff: int = DEFAULT_CUTOFF

    def __post_init__(self):
        g = np.array(self.couplings, dtype=float).reshape(self.site_count, self.mode_count)
        freqs = tuple(float(w) for w in self.mode_frequencies)
        if len(freqs) != self.mode_count:
            raise DimensionMismatch("one frequency per mode is required")
        if any(not w > 0 for w in freqs):
            raise ValueError("mode frequencies must be positive")
        g.flags.writeable = False
        object.__setattr__(self, "couplings", g)
        object.__setattr__(self, "mode_frequencies", freqs)

    @property
    def dim(self) -> int:
        return self.site_count * self.fock_cutoff ** self.mode_count


# --------------------------------------------------------------------------
# evolution

def _rho_array(rho) -> np.ndarray:
    return np.array(rho.entries if isinstance(rho, DensityMatrix) else rho, dtype=complex)


def evolve_von_neumann(rho, h, t: float, hbar: float = 1.0) -> DensityMatrix:
    """``e^{-iHt/hbar} rho e^{iHt/hbar}`` through the eigendecomposition of ``H``.

    Raises:
        DimensionMismatch: if ``rho`` and ``h`` differ in shape.
        NotHermitian: if ``h`` is not Hermitian.
    """
    r = _rho_array(rho)
    hm = _matrix(h, "hamiltonian")
    if r.shape != hm.shape:
        raise DimensionMismatch(f"rho is {r.shape}, H is {hm.shape}")
    _check_hermitian(hm)
    evals, vecs = np.linalg.eigh(0.5 * (hm + hm.conj().T))
    u = (vecs * np.exp(-1j * evals * t / hbar)) @ vecs.conj().T
    out = u @ r @ u.conj().T
    return DensityMatrix.trusted(0.5 * (out + out.conj().T))


def _rk4_step(sup: np.ndarray, v: np.ndarray, dt: float) -> np.ndarray:
    k1 = sup @ v
    k2 = sup @ (v + 0.5 * dt * k1)
    k3 = sup @ (v + 0.5 * dt * k2)
    k4 = sup @ (v + dt * k3)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve_lindblad(rho, model: LindbladModel, t: float, dt: float,
                    snapshot_every: int = 1) -> list[tuple[float, DensityMatrix]]:
    """RK4 integration of the master equation, snapshots including ``t = 0``.

    The step is shrunk so that an integer number of steps lands on ``t``.
    Every snapshot is re-hermitised; positivity is never projected back.

    Raises:
        StabilityViolation: if ``dt * max(rate, spectral radius of H/hbar) >= 0.1``.
        PositivityLoss: if a snapshot has an eigenvalue below ``-1e-6``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    r = _rho_array(rho)
    if r.shape != (model.dim, model.dim):
        raise DimensionMismatch(f"rho is {r.shape}, model has dim {model.dim}")
    n = max(1, int(math.ceil(t / dt - 1e-9))) if t > 0 else 0
    h_step = t / n if n else dt
    radius = float(np.max(np.abs(np.linalg.eigvalsh(model.hamiltonian)))) / model.hbar
    scale = max([radius, *model.rates]) if model.rates else radius
    if h_step * scale >= STABILITY_LIMIT:
        raise StabilityViolation(
            f"dt*max(rate, |H|/hbar) = {h_step * scale:.3g} exceeds {STABILITY_LIMIT}")

    sup = model.generator()
    d = model.dim
    v = r.reshape(-1)
    snaps = [(0.0, DensityMatrix.trusted(0.5 * (r + r.conj().T)))]
    for k in range(1, n + 1):
        v = _rk4_step(sup, v, h_step)
        if k % snapshot_every == 0 or k == n:
            m = v.reshape(d, d)
            m = 0.5 * (m + m.conj().T)
            v = m.reshape(-1)
            low = float(np.linalg.eigvalsh(m)[0])
            if low < POSITIVITY_FLOOR:
                raise PositivityLoss(f"eigenvalue {low:.3e} at t={k * h_step:.6g}; reduce dt")
            snaps.append((t if k == n else k * h_step, DensityMatrix.trusted(m)))
    return snaps


def project_coherent_subspace(rho, sub: CoherentSubspace) -> tuple[np.ndarray, float]:
    """Unnormalised ``P rho P`` and its weight ``Tr(P rho P)``."""
    r = _rho_array(rho)
    p = sub.projector
    if r.shape != p.shape:
        raise DimensionMismatch(f"rho is {r.shape}, projector is {p.shape}")
    out = p @ r @ p
    return out, float(np.trace(out).real)


# --------------------------------------------------------------------------
# model Hamiltonians

def build_resonant_hamiltonian(coupling: ResonantCoupling) -> np.ndarray:
    """``sum_{m<n} J_mn (|m><n| + |n><m|)``, plus optional site energies on the diagonal.

    Raises:
        AsymmetricCouplings: if ``J`` is not symmetric with a zero diagonal.
    """
    j = coupling.couplings
    if np.max(np.abs(j - j.T), initial=0.0) > 0 or np.any(np.diag(j) != 0):
        raise AsymmetricCouplings("couplings must be symmetric with a zero diagonal")
    h = np.triu(j, 1) + np.triu(j, 1).T
    if coupling.site_energies is not None:
        h = h + np.diag(coupling.site_energies)
    return h.astype(complex)


def lowering_operator(cutoff: int) -> np.ndarray:
    """Truncated ``b`` with ``b[n-1, n] = sqrt(n)``."""
    return np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1)


def build_phonon_hamiltonian(coupling: PhononCoupling, include_free: bool = False,
                             hbar: float = 1.0) -> np.ndarray:
    """``sum_jk g_jk |j><j| (b_k + b_k^dag)`` on sites x modes (site-major).

    Mode ``k`` occupies the ``k``-th tensor factor after the site. With
    ``include_free`` the term ``sum_k hbar w_k b_k^dag b_k`` is added.

    Raises:
        CutoffTooSmall: if ``fock_cutoff < 2``.
    """
    nmax = coupling.fock_cutoff
    if nmax < 2:
        raise CutoffTooSmall(f"fock_cutoff={nmax}; at least 2 levels per mode are needed")
    b = lowering_operator(nmax)
    x = b + b.T
    n_op = b.T @ b
    mode_eye = np.eye(nmax)

    def on_mode(op, k):
        mats = [mode_eye] * coupling.mode_count
        mats[k] = op
        out = np.ones((1, 1))
        for m in mats:
            out = np.kron(out, m)
        return out

    s = coupling.site_count
    dim = coupling.dim
    h = np.zeros((dim, dim))
    for k in range(coupling.mode_count):
        xk = on_mode(x, k)
        site_diag = np.diag(coupling.couplings[:, k])
        h += np.kron(site_diag, xk)
        if include_free:
            h += hbar * coupling.mode_frequencies[k] * np.kron(np.eye(s), on_mode(n_op, k))
    return h.astype(complex)


def dephasing_operators(dim: int) -> list[np.ndarray]:
    """Site projectors ``|j><j|``, the jump operators of site-local dephasing."""
    ops = []
    for j in range(dim):
        p = np.zeros((dim, dim), dtype=complex)
        p[j, j] = 1.0
        ops.append(p)
    return ops


def entropy_trace(snapshots: Sequence[tuple[float, DensityMatrix]],
                  k_B: float = 1.0) -> list[tuple[float, float]]:
    return [(t, von_neumann_entropy(rho, k_B)) for t, rho in snapshots]


def write_snapshot_csv(snapshots: Sequence[tuple[float, DensityMatrix]], path: str | Path,
                       k_B: float = 1.0) -> None:
    """Write ``time,entropy,purity,pop_0..pop_{d-1},abs_coh_max``."""
    d = snapshots[0][1].dim
    header = ["time", "entropy", "purity", *[f"pop_{i}" for i in range(d)], "abs_coh_max"]
    lines = [",".join(header)]
    for t, rho in snapshots:
        vals = [t, von_neumann_entropy(rho, k_B), rho.purity(), *rho.populations(),
                rho.max_coherence()]
        lines.append(",".join(f"{v:.17g}" for v in vals))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
