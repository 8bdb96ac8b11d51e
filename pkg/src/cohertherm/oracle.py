"""Exact quantum propagation on a periodic position grid.

Continuous systems use second-order Strang splitting with the kinetic factor
applied in momentum space through FFTs; the kicked rotor uses its one-period
Floquet operator (kick in position space, free rotation in momentum space).
These are the ground truth for every semiclassical comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
import numpy as np
from scipy.special import erf

from .dynamics import TWO_PI, SystemSpec
from .errors import BoundaryLeak, GridMismatch

NORM_TOL = 1e-10
LEAK_TOL = 1e-6
EDGE_FRACTION = 0.05

DEFAULT_GRID = (-12.0, 12.0, 1024)
KICKED_GRID = (0.0, TWO_PI, 512)


@dataclass(frozen=True, eq=False)
class GridState:
    """Normalised wavefunction sampled on ``n_points`` cells of ``[grid_min, grid_max)``."""

    grid_min: float
    grid_max: float
    n_points: int
    amplitudes: np.ndarray = field(repr=False)
    hbar: float = 1.0

    def __post_init__(self):
        n = self.n_points
        if n < 64 or n & (n - 1):
            raise ValueError("n_points must be a power of two and at least 64")
        if not self.grid_max > self.grid_min:
            raise ValueError("empty grid")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (n,):
            raise ValueError(f"expected {n} amplitudes, got shape {amps.shape}")
        norm = float(np.sum(np.abs(amps) ** 2) * self.dq)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalised (norm {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dq(self) -> float:
        return (self.grid_max - self.grid_min) / self.n_points

    @property
    def q(self) -> np.ndarray:
        return self.grid_min + self.dq * np.arange(self.n_points)

    @property
    def p(self) -> np.ndarray:
        """Momenta in FFT order."""
        return TWO_PI * self.hbar * np.fft.fftfreq(self.n_points, d=self.dq)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density) * self.dq)

    def with_amplitudes(self, amps) -> "GridState":
        return GridState(self.grid_min, self.grid_max, self.n_points, amps, self.hbar)

    def same_grid(self, other: "GridState") -> bool:
        return (self.n_points == other.n_points and self.grid_min == other.grid_min
                and self.grid_max == other.grid_max and self.hbar == other.hbar)

    def expectation_q(self) -> tuple[float, float]:
        """Mean and standard deviation of position."""
        rho = self.density * self.dq
        q = self.q
        mean = float(np.sum(rho * q))
        var = float(np.sum(rho * (q - mean) ** 2))
        return mean, math.sqrt(var)

    def momentum_distribution(self) -> tuple[np.ndarray, np.ndarray]:
        """``(p, weight)`` with weights summing to one, in FFT order."""
        phi = np.fft.fft(self.amplitudes)
        w = np.abs(phi) ** 2
        return self.p, w / w.sum()

    def value_at(self, q0: float) -> complex:
        """Band-limited (Fourier) interpolation of the wavefunction at ``q0``."""
        n = self.n_points
        k = TWO_PI * np.fft.fftfreq(n, d=self.dq)
        coeff = np.fft.fft(self.amplitudes) / n
        phase = np.exp(1j * k * (q0 - self.grid_min))
        # split the Nyquist term symmetrically so the interpolant is real for real data
        if n % 2 == 0:
            nyq = n // 2
            coeff = coeff.copy()
            c = coeff[nyq]
            val = np.sum(np.delete(coeff, nyq) * np.delete(phase, nyq))
            val += c * math.cos(k[nyq] * (q0 - self.grid_min))
            return complex(val)
        return complex(np.sum(coeff * phase))

    def to_csv(self, path: str | Path) -> None:
        write_grid_csv(self, path)


def grid_points(grid_min: float, grid_max: float, n_points: int) -> np.ndarray:
    return grid_min + (grid_max - grid_min) / n_points * np.arange(n_points)


def normalized_state(grid_min: float, grid_max: float, n_points: int, values,
                     hbar: float = 1.0) -> GridState:
    values = np.asarray(values, dtype=complex)
    dq = (grid_max - grid_min) / n_points
    values = values / math.sqrt(float(np.sum(np.abs(values) ** 2)) * dq)
    return GridState(grid_min, grid_max, n_points, values, hbar)


def gaussian_state(q0: float, p0: float, sigma: float, hbar: float = 1.0,
                   grid: tuple[float, float, int] = DEFAULT_GRID) -> GridState:
    """Gaussian wavepacket with position spread ``sigma`` and mean momentum ``p0``."""
    q = grid_points(*grid)
    psi = np.exp(-((q - q0) ** 2) / (4.0 * sigma**2) + 1j * p0 * (q - q0) / hbar)
    return normalized_state(*grid, psi, hbar=hbar)


def coherent_state(system: SystemSpec, q0: float, p0: float,
                   grid: tuple[float, float, int] = DEFAULT_GRID) -> GridState:
    """Displaced harmonic ground state of ``system`` (harmonic only)."""
    sigma = math.sqrt(system.hbar / (2.0 * system.mass * system.omega))
    return gaussian_state(q0, p0, sigma, system.hbar, grid)


def windowed_point_source(q_source: float, p_window: tuple[float, float], hbar: float,
                          grid: tuple[float, float, int] = DEFAULT_GRID,
                          edge_width: float = 0.0) -> tuple[GridState, float]:
    """Point source at ``q_source`` restricted to momenta inside ``p_window``.

    The unnormalised source is ``(1/2 pi hbar) int dp w(p) exp(ip(q - q_source)/hbar)``
    with ``w`` the indicator of the window, or an erf-smoothed version of it
    when ``edge_width > 0``. Propagating it gives the position kernel
    restricted to orbits that start with momenta in the window.

    Returns:
        The normalised state and the factor that converts it back to kernel
        units (multiply amplitudes by it).
    """
    lo, hi = p_window
    grid_min, grid_max, n = grid
    length = grid_max - grid_min
    p = TWO_PI * hbar * np.fft.fftfreq(n, d=length / n)
    if edge_width > 0:
        w = 0.5 * (erf((p - lo) / edge_width) - erf((p - hi) / edge_width))
    else:
        w = ((p >= lo) & (p <= hi)).astype(float)
    # ifft phases are referenced to grid_min
    coeff = w * np.exp(-1j * p * (q_source - grid_min) / hbar)
    raw = np.fft.ifft(coeff) * n / length
    scale = math.sqrt(float(np.sum(np.abs(raw) ** 2)) * (length / n))
    return GridState(grid_min, grid_max, n, raw / scale, hbar), scale


def _leaked(state_amps: np.ndarray, dq: float) -> float:
    n = state_amps.size
    edge = max(1, int(math.ceil(EDGE_FRACTION * n)))
    rho = np.abs(state_amps) ** 2 * dq
    return float(rho[:edge].sum() + rho[-edge:].sum())


def _check_grid_for(system: SystemSpec, state: GridState):
    if system.hbar != state.hbar:
        raise GridMismatch(f"state hbar {state.hbar} differs from system hbar {system.hbar}")


def evolve_exact(state: GridState, system: SystemSpec, t: float, dt: float | None = None,
                 check_every: int = 200) -> GridState:
    """Strang split-step evolution ``exp(-iHt/hbar)`` of a continuous system.

    ``dt`` defaults to ``min(1e-3, t/100)`` and is shrunk to divide ``t``.

    Raises:
        BoundaryLeak: if more than 1e-6 of the probability sits in the outer
            5% of the grid at either edge.
    """
    if system.is_kicked:
        raise ValueError("use evolve_kicked_exact for the kicked rotor")
    _check_grid_for(system, state)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return state
    if dt is None:
        dt = min(1e-3, t / 100.0)
    n_steps = max(1, int(math.ceil(t / dt - 1e-9)))
    h = t / n_steps
    hbar = system.hbar
    q = state.q
    p = state.p
    half_v = np.exp(-0.5j * h * system.potential(q) / hbar)
    full_v = half_v * half_v
    kin = np.exp(-1j * h * p**2 / (2.0 * system.mass * hbar))
    psi = np.array(state.amplitudes)
    psi = psi * half_v
    for k in range(n_steps):
        psi = np.fft.ifft(kin * np.fft.fft(psi))
        if k < n_steps - 1:
            psi = psi * full_v
        else:
            psi = psi * half_v
        if check_every and (k + 1) % check_every == 0:
            leak = _leaked(psi * half_v, state.dq)
            if leak > LEAK_TOL:
                raise BoundaryLeak(f"{leak:.2e} of the probability reached the grid edge by t={(k + 1) * h:.4g}")
    leak = _leaked(psi, state.dq)
    if leak > LEAK_TOL:
        raise BoundaryLeak(f"{leak:.2e} of the probability reached the grid edge")
    return state.with_amplitudes(psi)


def floquet_factors(system: SystemSpec, state: GridState) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal kick (position) and free-rotation (momentum) factors of one period."""
    kick = np.exp(-1j * system.potential(state.q) / system.hbar)
    free = np.exp(-1j * state.p**2 / (2.0 * system.mass * system.hbar))
    return kick, free


def evolve_kicked_exact(state: GridState, system: SystemSpec, n_kicks: int) -> GridState:
    """Apply the one-kick Floquet operator ``n_kicks`` times.

    One period is a kick ``exp(-i K cos q / hbar)`` followed by free rotation
    ``exp(-i p^2 / 2 m hbar)``, matching the classical map.
    """
    if not system.is_kicked:
        raise ValueError("evolve_kicked_exact needs a kicked_rotor system")
    _check_grid_for(system, state)
    if n_kicks < 0:
        raise ValueError("n_kicks must be non-negative")
    if abs((state.grid_max - state.grid_min) - TWO_PI) > 1e-12:
        raise GridMismatch("kicked rotor states must live on a grid of length 2 pi")
    if n_kicks == 0:
        return state
    kick, free = floquet_factors(system, state)
    psi = np.array(state.amplitudes)
    for _ in range(n_kicks):
        psi = np.fft.ifft(free * np.fft.fft(kick * psi))
    return state.with_amplitudes(psi)


def region_transfer_exact(system: SystemSpec, region_a: tuple[float, float],
                          region_b: tuple[float, float], n_kicks: int,
                          p_window: tuple[float, float] = (-0.5, 0.5),
                          grid: tuple[float, float, int] = KICKED_GRID) -> float:
    """Floquet counterpart of the semiclassical region-to-region probability.

    Each of the 8 stencil points of ``region_a`` launches a point source
    filtered to ``p_window``; after ``n_kicks`` the probability on grid points
    inside ``region_b`` (taken mod 2 pi) is recorded and the results averaged.
    """
    from .semiclassics import stencil

    lo, hi = float(region_b[0]), float(region_b[1])
    probs = []
    for q_a in stencil(region_a):
        src, _ = windowed_point_source(float(q_a), p_window, system.hbar, grid)
        out = evolve_kicked_exact(src, system, n_kicks)
        inside = np.mod(out.q - lo, TWO_PI) <= (hi - lo)
        probs.append(float(np.sum(out.density[inside]) * out.dq))
    return math.fsum(probs) / len(probs)


def inner_product(a: GridState, b: GridState) -> complex:
    """``<a|b>`` as a grid sum (the trapezoidal rule on a periodic grid)."""
    if not a.same_grid(b):
        raise GridMismatch("states live on different grids")
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.dq)


def transition_probability_exact(initial: GridState, final: GridState, system: SystemSpec,
                                 t: float, dt: float | None = None) -> float:
    """``|<final| U(t) |initial>|^2`` (``t`` counts kicks for the kicked rotor)."""
    if not initial.same_grid(final):
        raise GridMismatch("initial and final states live on different grids")
    if system.is_kicked:
        evolved = evolve_kicked_exact(initial, system, int(t))
    else:
        evolved = evolve_exact(initial, system, t, dt)
    return abs(inner_product(final, evolved)) ** 2


def hamiltonian_matrix(system: SystemSpec, grid: tuple[float, float, int] = DEFAULT_GRID) -> np.ndarray:
    """Dense grid Hamiltonian with the same spectral kinetic operator as the split-step."""
    grid_min, grid_max, n = grid
    dq = (grid_max - grid_min) / n
    p = TWO_PI * system.hbar * np.fft.fftfreq(n, d=dq)
    f = np.fft.fft(np.eye(n), axis=0)
    kinetic = np.fft.ifft((p**2 / (2.0 * system.mass))[:, None] * f, axis=0)
    h = kinetic + np.diag(system.potential(grid_points(*grid)))
    return 0.5 * (h + h.conj().T)


def write_grid_csv(state: GridState, path: str | Path) -> None:
    lines = ["q,re_psi,im_psi,prob_density"]
    for q, a in zip(state.q, state.amplitudes):
        lines.append(f"{q:.17g},{a.real:.17g},{a.imag:.17g},{abs(a) ** 2:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

