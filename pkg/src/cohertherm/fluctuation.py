"""Fluctuation ratios: classical, interference-corrected and structured.

The classical ratio of forward to backward transition probabilities is
``exp(dS/k_B)``. Interference multiplies it by
``(1 + cross_f/diag_f) / (1 + cross_b/diag_b)``, and the phenomenological
structured-coherence model adds a Gaussian bump,
``exp(dS/k_B) * (1 + C exp(-(dS - dS0)^2 / (2 sigma^2)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateDenominator, EmptyRegion, FitDiverged
from .oracle import GridState
from .semiclassics import PropagatorResult
from .states import von_neumann_entropy

__all__ = [
    "EntropyChange",
    "StructuredCoherenceModel",
    "RatioCurve",
    "classical_ratio",
    "quantum_ratio",
    "structured_ratio",
    "fit_structured_model",
    "entropy_change_between_regions",
    "ratio_curve",
    "von_neumann_entropy",
]

DENOMINATOR_TOL = 1e-12
MAX_ITER = 500
N_STARTS = 5


@dataclass(frozen=True)
class EntropyChange:
    delta_s: float
    forward_label: str = "forward"
    backward_label: str = "backward"

    def reversed(self) -> "EntropyChange":
        return EntropyChange(-self.delta_s, self.backward_label, self.forward_label)


@dataclass(frozen=True)
class StructuredCoherenceModel:
    enhancement_strength: float
    target_delta_s: float
    width: float

    def __post_init__(self):
        if not self.enhancement_strength >= 0:
            raise ValueError("enhancement_strength must be non-negative")
        if not self.width > 0:
            raise ValueError("width must be positive")
        if not math.isfinite(self.target_delta_s):
            raise ValueError("target_delta_s must be finite")


def classical_ratio(delta_s: float, k_B: float = 1.0) -> float:
    if not k_B > 0:
        raise ValueError("k_B must be positive")
    return math.exp(delta_s / k_B)


def quantum_ratio(forward: PropagatorResult, backward: PropagatorResult, delta_s: float,
                  k_B: float = 1.0) -> float:
    """Classical ratio corrected by each channel's interference fraction.

    Raises:
        DegenerateDenominator: if ``1 + cross_b/diag_b <= 1e-12``.
    """
    if not (forward.diagonal_sum > 0 and backward.diagonal_sum > 0):
        raise ValueError("both channels need a positive diagonal sum")
    den = 1.0 + backward.cross_sum / backward.diagonal_sum
    if den <= DENOMINATOR_TOL:
        raise DegenerateDenominator(
            f"backward channel interferes destructively (1 + cross/diag = {den:.3e})")
    num = 1.0 + forward.cross_sum / forward.diagonal_sum
    return classical_ratio(delta_s, k_B) * num / den


def _bump(delta_s, model: StructuredCoherenceModel):
    z = (np.asarray(delta_s, dtype=float) - model.target_delta_s) / model.width
    return np.exp(-0.5 * z * z)


def structured_ratio(delta_s: float, model: StructuredCoherenceModel, k_B: float = 1.0) -> float:
    g = float(_bump(delta_s, model))
    return classical_ratio(delta_s, k_B) * (1.0 + model.enhancement_strength * g)


# --------------------------------------------------------------------------
# fitting

def _log_model(theta, x, k_B):
    c, mu, sig = theta
    z = (x - mu) / sig
    g = np.exp(-0.5 * z * z)
    return x / k_B + np.log1p(c * g), g, z


def _jacobian(theta, x, g, z):
    c, _, sig = theta
    w = 1.0 / (1.0 + c * g)
    return np.column_stack([g * w, c * g * z / sig * w, c * g * z * z / sig * w])


def _gauss_newton(theta0, x, y, k_B):
    """Damped Gauss-Newton in log-ratio space with C >= 0 and sigma > 0."""
    theta = np.array(theta0, dtype=float)
    pred, g, z = _log_model(theta, x, k_B)
    r = y - pred
    loss = float(r @ r)
    for it in range(1, MAX_ITER + 1):
        jac = _jacobian(theta, x, g, z)
        step, *_ = np.linalg.lstsq(jac, r, rcond=None)
        scale = 1.0
        improved = False
        while scale > 1e-10:
            cand = theta + scale * step
            cand[0] = max(cand[0], 0.0)
            cand[2] = max(cand[2], 1e-3 * abs(theta[2]) + 1e-12)
            p2, g2, z2 = _log_model(cand, x, k_B)
            r2 = y - p2
            l2 = float(r2 @ r2)
            if np.isfinite(l2) and l2 <= loss:
                improved = True
                break
            scale *= 0.5
        if not improved:
            # no descent direction left: stationary to working precision
            return theta, loss, True
        moved = np.max(np.abs(cand - theta) / (1.0 + np.abs(theta)))
        drop = loss - l2
        theta, loss, g, z, r = cand, l2, g2, z2, r2
        if moved < 1e-13 or drop <= 1e-30 + 1e-15 * loss:
            return theta, loss, True
    return theta, loss, False


def fit_structured_model(samples: Sequence[tuple[float, float]],
                         k_B: float = 1.0) -> tuple[StructuredCoherenceModel, float]:
    """Least-squares fit of ``(C, dS0, sigma)`` on log ratios.

    Five Gauss-Newton starts place ``dS0`` at the samples where the data
    exceed the classical curve the most, with ``sigma`` three sample spacings
    and ``C = max(ratio/classical - 1)``. The best converged start wins.

    Returns:
        The fitted model and the residual sum of squares in log space.

    Raises:
        FitDiverged: if no start converges within 500 iterations.
    """
    if len(samples) < 8:
        raise ValueError("at least 8 samples are needed")
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("samples must be (delta_s, ratio) pairs")
    order = np.argsort(arr[:, 0], kind="stable")
    x, ratio = arr[order, 0], arr[order, 1]
    if not np.all(ratio > 0):
        raise ValueError("all ratios must be positive")
    y = np.log(ratio)
    excess = y - x / k_B
    spacing = float(np.median(np.diff(x))) if x.size > 1 else 1.0
    if not spacing > 0:
        spacing = float(np.ptp(x)) / (x.size - 1) or 1.0
    c0 = max(float(np.max(np.expm1(excess))), 0.0)
    starts = np.argsort(-excess, kind="stable")[:N_STARTS]

    best = None
    for k in starts:
        theta, loss, ok = _gauss_newton((c0, x[k], 3.0 * spacing), x, y, k_B)
        if ok and (best is None or loss < best[1]):
            best = (theta, loss)
    if best is None:
        raise FitDiverged("no Gauss-Newton start converged within 500 iterations")
    c, mu, sig = best[0]
    return StructuredCoherenceModel(float(c), float(mu), float(abs(sig))), best[1]


# --------------------------------------------------------------------------
# entropy bookkeeping

def entropy_change_between_regions(region_a: tuple[float, float], region_b: tuple[float, float],
                                   grid: GridState, k_B: float = 1.0) -> float:
    """``k_B ln(W_B / W_A)`` with ``W`` the number of grid points in each region.

    Raises:
        EmptyRegion: if a region holds no grid point.
    """
    q = grid.q

    def count(region, name):
        lo, hi = float(region[0]), float(region[1])
        if hi < lo:
            raise ValueError(f"{name} must have lo <= hi")
        n = int(np.count_nonzero((q >= lo) & (q <= hi)))
        if n == 0:
            raise EmptyRegion(f"{name} ({lo}, {hi}) contains no grid cell")
        return n

    w_a = count(region_a, "region_a")
    w_b = count(region_b, "region_b")
    return k_B * math.log(w_b / w_a)


# --------------------------------------------------------------------------
# curves

@dataclass(frozen=True)
class RatioCurve:
    points: tuple[tuple[float, float, float | None, float | None], ...]

    def __post_init__(self):
        xs = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("delta_s must be strictly increasing")
        for p in self.points:
            for v in p[1:]:
                if v is not None and not v > 0:
                    raise ValueError("ratios must be positive")

    def column(self, name: str) -> np.ndarray:
        idx = {"delta_s": 0, "classical": 1, "quantum": 2, "structured": 3}[name]
        return np.array([np.nan if p[idx] is None else p[idx] for p in self.points])

    def to_csv(self, path: str | Path) -> None:
        lines = ["delta_s,classical,quantum,structured"]
        for row in self.points:
            lines.append(",".join("" if v is None else f"{v:.17g}" for v in row))
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def ratio_curve(delta_s_values: Sequence[float], k_B: float = 1.0,
                model: StructuredCoherenceModel | None = None,
                quantum: Callable[[float], float] | Sequence[float] | None = None) -> RatioCurve:
    """Tabulate the classical ratio and, when given, the quantum and structured ones."""
    xs = [float(v) for v in delta_s_values]
    if quantum is not None and not callable(quantum) and len(quantum) != len(xs):
        raise ValueError("quantum values must match delta_s_values")
    rows = []
    for i, x in enumerate(xs):
        q = None
        if quantum is not None:
            q = float(quantum(x)) if callable(quantum) else float(quantum[i])
        s = structured_ratio(x, model, k_B) if model is not None else None
        rows.append((x, classical_ratio(x, k_B), q, s))
    return RatioCurve(tuple(rows))
