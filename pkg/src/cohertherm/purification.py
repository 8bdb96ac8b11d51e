"""Purifications with tunable phases and interference-optimal phase choice.

A mixed state ``sum_i p_i |s_i><s_i|`` is purified as
``|Psi(phi)> = sum_i sqrt(p_i) e^{i phi_i} |s_i>|a_i>``. Joint vectors are
flattened system-major: ``|s, a>`` sits at index ``s * ancilla_dim + a``.
Component ``i`` uses system state ``i`` and ancilla state ``i``.

With ``M_i = <target| U |s_i a_i>`` the transition probability is
``|sum_i sqrt(p_i) e^{i phi_i} M_i|^2``, maximised by ``phi_i = -arg M_i`` at
``(sum_i sqrt(p_i) |M_i|)^2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    AncillaTooSmall,
    DimensionMismatch,
    GridTooLarge,
    LengthMismatch,
    NotUnitary,
    TargetNotNormalized,
)
from .states import DensityMatrix

PROB_TOL = 1e-12
UNITARY_TOL = 1e-10
TARGET_TOL = 1e-10
GRID_STEP = math.pi / 32
GRID_MAX_COMPONENTS = 4
METHODS = ("analytic", "gradient", "grid")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class MixedState:
    probabilities: tuple[float, ...]
    system_dim: int

    def __post_init__(self):
        p = tuple(float(x) for x in self.probabilities)
        object.__setattr__(self, "probabilities", p)
        if not p:
            raise ValueError("at least one probability is required")
        if any(not x > 0 for x in p):
            raise ValueError("probabilities must be strictly positive")
        if abs(math.fsum(p) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(p):.15g}, not 1")
        if len(p) > self.system_dim:
            raise ValueError("more components than system basis states")

    def density_matrix(self) -> DensityMatrix:
        d = np.zeros(self.system_dim)
        d[: len(self.probabilities)] = self.probabilities
        return DensityMatrix(np.diag(d))


@dataclass(frozen=True)
class PurifiedState:
    probabilities: tuple[float, ...]
    phases: tuple[float, ...]
    system_dim: int
    ancilla_dim: int

    def __post_init__(self):
        MixedState(self.probabilities, self.system_dim)
        if len(self.phases) != len(self.probabilities):
            raise LengthMismatch("one phase per component is required")
        if self.ancilla_dim < len(self.probabilities):
            raise AncillaTooSmall("ancilla_dim is smaller than the number of components")

    @property
    def n_components(self) -> int:
        return len(self.probabilities)

    @property
    def joint_dim(self) -> int:
        return self.system_dim * self.ancilla_dim

    def basis_index(self, i: int) -> int:
        return i * self.ancilla_dim + i

    def coefficients(self) -> np.ndarray:
        p = np.asarray(self.probabilities)
        return np.sqrt(p) * np.exp(1j * np.asarray(self.phases))

    def vector(self) -> np.ndarray:
        v = np.zeros(self.joint_dim, dtype=complex)
        v[[self.basis_index(i) for i in range(self.n_components)]] = self.coefficients()
        return v


class UnitaryMatrix:
    """Square matrix with ``max|U^dag U - I| <= 1e-10``."""

    __slots__ = ("_u",)

    def __init__(self, entries):
        u = np.array(entries, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
            raise NotUnitary("a unitary must be a non-empty square matrix")
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if err > UNITARY_TOL:
            raise NotUnitary(f"max|U^dag U - I| = {err:.3e}")
        self._u = _readonly(u)

    @property
    def entries(self) -> np.ndarray:
        return self._u

    @property
    def dim(self) -> int:
        return self._u.shape[0]


def random_unitary(dim: int, rng: np.random.Generator) -> UnitaryMatrix:
    """Orthonormalised complex Gaussian matrix (QR with the phase fix)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return UnitaryMatrix(q * (d / np.abs(d)))


def random_mixed_state(n: int, system_dim: int, rng: np.random.Generator) -> MixedState:
    """Random ``n``-outcome distribution, renormalised with ``fsum``."""
    w = rng.random(n) + 1e-3
    p = w / math.fsum(w.tolist())
    p[-1] = 1.0 - math.fsum(p[:-1].tolist())
    return MixedState(tuple(p.tolist()), system_dim)


def purify(mixed: MixedState, ancilla_dim: int) -> PurifiedState:
    """Zero-phase purification of ``mixed``.

    Raises:
        AncillaTooSmall: if ``ancilla_dim`` cannot label every component.
    """
    if ancilla_dim < len(mixed.probabilities):
        raise AncillaTooSmall(
            f"ancilla_dim={ancilla_dim} < {len(mixed.probabilities)} nonzero probabilities")
    return PurifiedState(mixed.probabilities, (0.0,) * len(mixed.probabilities),
                         mixed.system_dim, ancilla_dim)


def apply_phases(state: PurifiedState, phases: Sequence[float]) -> PurifiedState:
    if len(phases) != state.n_components:
        raise LengthMismatch(f"got {len(phases)} phases for {state.n_components} components")
    return PurifiedState(state.probabilities, tuple(float(x) for x in phases),
                         state.system_dim, state.ancilla_dim)


def joint_density_matrix(state: PurifiedState) -> DensityMatrix:
    v = state.vector()
    return DensityMatrix.trusted(np.outer(v, v.conj()))


def partial_trace_ancilla(rho, system_dim: int, ancilla_dim: int) -> np.ndarray:
    m = np.asarray(rho, dtype=complex).reshape(system_dim, ancilla_dim, system_dim, ancilla_dim)
    return np.einsum("iaja->ij", m)


def reduced_state(state: PurifiedState) -> DensityMatrix:
    return DensityMatrix.trusted(
        partial_trace_ancilla(joint_density_matrix(state), state.system_dim, state.ancilla_dim))


def _overlaps(state: PurifiedState, u: UnitaryMatrix, target) -> np.ndarray:
    """``M_i = <target| U |s_i a_i>`` after validating dimensions and norm."""
    tgt = np.asarray(target, dtype=complex).ravel()
    if u.dim != state.joint_dim:
        raise DimensionMismatch(f"U has dim {u.dim}, joint space has {state.joint_dim}")
    if tgt.size != state.joint_dim:
        raise DimensionMismatch(f"target has length {tgt.size}, joint space has {state.joint_dim}")
    norm = float(np.vdot(tgt, tgt).real)
    if abs(norm - 1.0) > TARGET_TOL:
        raise TargetNotNormalized(f"target norm^2 is {norm:.15g}")
    cols = [state.basis_index(i) for i in range(state.n_components)]
    return tgt.conj() @ u.entries[:, cols]


def _probability(sqrt_p, phases, m) -> float:
    z = np.sum(sqrt_p * np.exp(1j * np.asarray(phases)) * m)
    return float(z.real * z.real + z.imag * z.imag)


def transition_probability(state: PurifiedState, u: UnitaryMatrix, target) -> float:
    """``|<target| U |Psi(phi)>|^2``.

    Raises:
        DimensionMismatch: if ``U`` or ``target`` do not match the joint space.
        TargetNotNormalized: if ``target`` is not a unit vector.
    """
    m = _overlaps(state, u, target)
    return _probability(np.sqrt(state.probabilities), state.phases, m)


def probability_gradient(state: PurifiedState, u: UnitaryMatrix, target) -> np.ndarray:
    """Exact ``dP/dphi``.

    With ``w_k = sqrt(p_k) e^{i phi_k} M_k`` and ``z = sum w``,
    ``dP/dphi_k = 2 Re(conj(z) i w_k) = -2 Im(conj(z) w_k)``.
    """
    m = _overlaps(state, u, target)
    return _gradient(np.sqrt(state.probabilities), np.asarray(state.phases), m)


def _gradient(sqrt_p, phases, m) -> np.ndarray:
    w = sqrt_p * np.exp(1j * phases) * m
    z = np.sum(w)
    return -2.0 * np.imag(np.conj(z) * w)


def _analytic(sqrt_p, m):
    mag = np.abs(m)
    phases = np.where(mag > 0, -np.angle(m), 0.0)
    best = math.fsum((sqrt_p * mag).tolist()) ** 2
    return phases, best


def _gradient_ascent(sqrt_p, m, tol=1e-14, max_iter=10000):
    phi = np.zeros(m.size)
    val = _probability(sqrt_p, phi, m)
    step = 1.0
    for _ in range(max_iter):
        g = _gradient(sqrt_p, phi, m)
        gg = float(g @ g)
        if gg < tol * tol:
            break
        # Armijo backtracking, restarting from a slightly larger step each time
        step = min(step * 2.0, 10.0)
        while step > 1e-16:
            cand = phi + step * g
            cv = _probability(sqrt_p, cand, m)
            if cv >= val + 1e-4 * step * gg:
                break
            step *= 0.5
        else:
            break
        if cv - val <= 1e-16 * max(1.0, val):
            phi, val = cand, cv
            break
        phi, val = cand, cv
    return np.mod(phi + math.pi, 2 * math.pi) - math.pi, val


def _grid_search(sqrt_p, m):
    n = m.size
    if n > GRID_MAX_COMPONENTS:
        raise GridTooLarge(f"grid search over {n} phases exceeds the {GRID_MAX_COMPONENTS}-component limit")
    levels = np.arange(64) * GRID_STEP
    # phi_1 = 0 removes the global-phase degeneracy
    best_phi, best_val = np.zeros(n), _probability(sqrt_p, np.zeros(n), m)
    if n == 1:
        return best_phi, best_val
    w = sqrt_p * m
    grids = np.meshgrid(*([levels] * (n - 1)), indexing="ij")
    z = w[0] + sum(w[k + 1] * np.exp(1j * grids[k]) for k in range(n - 1))
    vals = (z.real ** 2 + z.imag ** 2).ravel()
    # argmax returns the first maximum, i.e. the lexicographically smallest phase vector
    idx = int(np.argmax(vals))
    combo = np.unravel_index(idx, grids[0].shape)
    best_phi = np.concatenate([[0.0], levels[list(combo)]])
    return best_phi, float(vals[idx])


def optimize_phases(state: PurifiedState, u: UnitaryMatrix, target,
                    method: str = "analytic") -> tuple[tuple[float, ...], float]:
    """Phases that maximise the transition probability into ``target``.

    ``analytic`` aligns every term (``phi_i = -arg M_i``, zero for vanishing
    ``M_i``); ``gradient`` is steepest ascent with backtracking from
    ``phi = 0``; ``grid`` enumerates multiples of ``pi/32`` with ``phi_1 = 0``.

    Raises:
        GridTooLarge: for ``method="grid"`` with more than four components.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    m = _overlaps(state, u, target)
    sqrt_p = np.sqrt(np.asarray(state.probabilities))
    if method == "analytic":
        phi, val = _analytic(sqrt_p, m)
    elif method == "gradient":
        phi, val = _gradient_ascent(sqrt_p, m)
    else:
        phi, val = _grid_search(sqrt_p, m)
    return tuple(float(x) for x in phi), float(val)


def write_phase_report(state: PurifiedState, u: UnitaryMatrix, target, path: str | Path) -> float:
    """Write ``component,p,abs_M,arg_M,phi_opt`` rows plus a ``P_star`` footer.

    Returns the analytic optimum.
    """
    m = _overlaps(state, u, target)
    phases, best = optimize_phases(state, u, target, "analytic")
    lines = ["component,p,abs_M,arg_M,phi_opt"]
    for i, (p, mi, ph) in enumerate(zip(state.probabilities, m, phases)):
        lines.append(f"{i},{p:.17g},{abs(mi):.17g},{np.angle(mi):.17g},{ph:.17g}")
    lines.append(f"P_star,{best:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return best
