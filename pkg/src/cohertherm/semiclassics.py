"""Van Vleck-Gutzwiller sums over classical boundary orbits.

Each orbit contributes ``A exp(i(S/hbar - pi nu/2))`` with
``A = 1/sqrt(2 pi hbar |dq_f/dp_i|)``. The free-particle factor
``1/sqrt(2 pi i hbar)`` leaves a global ``exp(-i pi/4)`` per degree of
freedom, which is applied to the total (it never changes a probability but
matters when comparing against exact kernels).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .dynamics import (
    CAUSTIC_TOL,
    TWO_PI,
    SystemSpec,
    Trajectory,
    propagate_endpoints,
    refine_roots,
    shoot,
)
from .errors import CausticContribution, EmptyTrajectorySet, NoTrajectoryWarning

GLOBAL_PHASE = complex(math.cos(-math.pi / 4), math.sin(-math.pi / 4))
STENCIL = 8
PAIRWISE_LIMIT = 2048
ENDPOINT_TOL = 1e-8


@dataclass(frozen=True)
class TrajectoryContribution:
    amplitude_magnitude: float
    action: float
    maslov_index: int
    phase: float

    @classmethod
    def from_parts(cls, amplitude_magnitude: float, action: float, maslov_index: int,
                   hbar: float) -> "TrajectoryContribution":
        if amplitude_magnitude < 0:
            raise ValueError("amplitude magnitude must be non-negative")
        if not hbar > 0:
            raise ValueError("hbar must be positive")
        phase = action / hbar - 0.5 * math.pi * maslov_index
        return cls(float(amplitude_magnitude), float(action), int(maslov_index), phase)

    @classmethod
    def from_trajectory(cls, traj: Trajectory, hbar: float) -> "TrajectoryContribution":
        m21 = traj.m21
        if abs(m21) < CAUSTIC_TOL:
            raise CausticContribution(
                f"orbit with p_i={traj.p_i:.6g} sits on a caustic (|dq_f/dp_i|={abs(m21):.2e})")
        amp = 1.0 / math.sqrt(TWO_PI * hbar * abs(m21))
        return cls.from_parts(amp, traj.action, traj.maslov_index, hbar)

    @property
    def term(self) -> complex:
        """``A exp(i phase)`` without the global factor."""
        return self.amplitude_magnitude * complex(math.cos(self.phase), math.sin(self.phase))


@dataclass(frozen=True)
class PropagatorResult:
    total_amplitude: complex
    contributions: tuple[TrajectoryContribution, ...]
    diagonal_sum: float
    cross_sum: float

    def to_csv(self, path: str | Path) -> None:
        write_propagator_csv(self, path)


def _cross_sum(amps: np.ndarray, phases: np.ndarray) -> float:
    n = amps.size
    if n < 2:
        return 0.0
    if n <= PAIRWISE_LIMIT:
        iu, ju = np.triu_indices(n, k=1)
        terms = amps[iu] * amps[ju] * np.cos(phases[iu] - phases[ju])
        return 2.0 * math.fsum(terms.tolist())
    # |sum z|^2 - sum |z|^2 avoids the O(N^2) table for very large censuses
    z = amps * np.exp(1j * phases)
    re = math.fsum(z.real.tolist())
    im = math.fsum(z.imag.tolist())
    return re * re + im * im - math.fsum((amps * amps).tolist())


def combine_contributions(contributions: Sequence[TrajectoryContribution]) -> PropagatorResult:
    """Sum contributions in ascending-action order with compensated accumulation.

    Raises:
        EmptyTrajectorySet: when ``contributions`` is empty.
    """
    if len(contributions) == 0:
        raise EmptyTrajectorySet("no trajectories to sum")
    ordered = tuple(sorted(contributions, key=lambda c: (c.action, c.maslov_index,
                                                          c.amplitude_magnitude)))
    amps = np.array([c.amplitude_magnitude for c in ordered])
    phases = np.array([c.phase for c in ordered])
    re = math.fsum((amps * np.cos(phases)).tolist())
    im = math.fsum((amps * np.sin(phases)).tolist())
    total = complex(re, im) * GLOBAL_PHASE
    diag = math.fsum((amps * amps).tolist())
    return PropagatorResult(total, ordered, diag, _cross_sum(amps, phases))


def _shared_endpoints(trajectories: Sequence[Trajectory]) -> None:
    first = trajectories[0]
    kicked = first.system.is_kicked
    for tr in trajectories[1:]:
        dq_i = tr.q_i - first.q_i
        dq_f = tr.q_f - first.q_f
        if kicked:
            dq_i = (dq_i + math.pi) % TWO_PI - math.pi
            dq_f = (dq_f + math.pi) % TWO_PI - math.pi
        if abs(dq_i) > ENDPOINT_TOL or abs(dq_f) > ENDPOINT_TOL or abs(tr.t - first.t) > ENDPOINT_TOL:
            raise ValueError("trajectories do not share (q_i, q_f, t)")


def vvg_amplitude(trajectories: Sequence[Trajectory], hbar: float | None = None) -> PropagatorResult:
    """Semiclassical propagator ``K(q_f, q_i; t)`` from its boundary orbits.

    ``hbar`` defaults to the value carried by the orbits' system.

    Raises:
        EmptyTrajectorySet: no orbits supplied.
        CausticContribution: an orbit has ``|dq_f/dp_i| < 1e-12``.
    """
    if len(trajectories) == 0:
        raise EmptyTrajectorySet("no trajectories to sum")
    if hbar is None:
        hbar = trajectories[0].system.hbar
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    _shared_endpoints(trajectories)
    return combine_contributions([TrajectoryContribution.from_trajectory(tr, hbar)
                                  for tr in trajectories])


def transition_probability(result: PropagatorResult) -> tuple[float, float, float]:
    """``(|K|^2, diagonal part, interference part)``."""
    z = result.total_amplitude
    return z.real * z.real + z.imag * z.imag, result.diagonal_sum, result.cross_sum


def write_propagator_csv(result: PropagatorResult, path: str | Path) -> None:
    lines = ["branch_index,action,maslov,amplitude_magnitude,phase"]
    for k, c in enumerate(result.contributions):
        lines.append(f"{k},{c.action:.17g},{c.maslov_index},{c.amplitude_magnitude:.17g},{c.phase:.17g}")
    z = result.total_amplitude
    lines.append(f"TOTAL,{z.real:.17g},{z.imag:.17g},{result.diagonal_sum:.17g},{result.cross_sum:.17g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


# --------------------------------------------------------------------------
# kicked-map region transfer

@dataclass(frozen=True)
class ChaosCensus:
    """Breakdown of a region-to-region transfer estimate.

    ``coherent`` is the part carried by resolved orbits summed with their
    phases; ``closure`` is the part carried by momentum intervals whose image
    wraps the cylinder too many times to enumerate, weighted by the classical
    sum rule (uniform spreading, no interference). ``closed_measure`` and
    ``dropped_measure`` are momentum measures averaged over the source points;
    the latter covers fold neighbourhoods left unresolved at the depth limit.
    """
    probability: float
    coherent: float
    closure: float
    n_orbits: int
    closed_measure: float
    dropped_measure: float
    window_measure: float


def stencil(region: tuple[float, float]) -> np.ndarray:
    """Eight evenly spaced cell midpoints of ``region``."""
    lo, hi = float(region[0]), float(region[1])
    if not hi > lo:
        raise ValueError("regions must be non-degenerate intervals")
    if hi - lo > TWO_PI:
        raise ValueError("a region cannot be longer than the circumference")
    return lo + (np.arange(STENCIL) + 0.5) * (hi - lo) / STENCIL


def _on_arc(x: np.ndarray, region: tuple[float, float]) -> np.ndarray:
    lo, hi = region
    return np.mod(x - lo, TWO_PI) <= (hi - lo)


def _classify(q_lo, q_hi, d_lo, d_hi, width, closure_span):
    """Split intervals into resolved / to-be-closed / to-be-refined masks."""
    dq = q_hi - q_lo
    s = np.sign(dq)
    mono = (np.sign(d_lo) == s) & (np.sign(d_hi) == s) & (s != 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        secant = dq / width
        r_lo = secant / d_lo
        r_hi = secant / d_hi
    linear = mono & (r_lo > 0.5) & (r_lo < 2.0) & (r_hi > 0.5) & (r_hi < 2.0)
    reach = np.maximum(np.abs(d_lo), np.abs(d_hi)) * width
    wild = ~linear & (reach >= closure_span)
    return linear, wild


def _census_from(system: SystemSpec, q_a: float, targets: np.ndarray, n: int,
                 p_window: tuple[float, float], n_seeds: int, max_depth: int,
                 closure_span: float):
    """Resolved orbits from ``q_a`` to every target (mod 2 pi).

    Also returns the momentum measure sent to the sum-rule closure and the
    measure dropped around folds that stayed unresolved at ``max_depth``.
    """
    seeds = np.linspace(p_window[0], p_window[1], n_seeds)
    q, d = shoot(system, q_a, seeds, n, 1.0)
    lo, hi = seeds[:-1], seeds[1:]
    q_lo, q_hi, d_lo, d_hi = q[:-1], q[1:], d[:-1], d[1:]
    resolved = []
    closed = 0.0
    dropped = 0.0
    depth = 0
    while lo.size:
        finite = np.isfinite(q_lo) & np.isfinite(q_hi) & np.isfinite(d_lo) & np.isfinite(d_hi)
        width = hi - lo
        linear, wild = _classify(q_lo, q_hi, d_lo, d_hi, width, closure_span)
        wild |= ~finite
        linear &= finite
        folded = np.zeros_like(linear)
        if depth >= max_depth:
            # tiny intervals around a fold of q_n(p): a local caustic, not chaotic spreading
            folded = ~(linear | wild)
        resolved.append((lo[linear], hi[linear], q_lo[linear], q_hi[linear]))
        closed += math.fsum(width[wild].tolist())
        dropped += math.fsum(width[folded].tolist())
        split = ~(linear | wild | folded)
        if not np.any(split):
            break
        lo, hi = lo[split], hi[split]
        q_lo, q_hi, d_lo, d_hi = q_lo[split], q_hi[split], d_lo[split], d_hi[split]
        mid = 0.5 * (lo + hi)
        q_mid, d_mid = shoot(system, q_a, mid, n, 1.0)
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        q_lo, q_hi = np.concatenate([q_lo, q_mid]), np.concatenate([q_mid, q_hi])
        d_lo, d_hi = np.concatenate([d_lo, d_mid]), np.concatenate([d_mid, d_hi])
        depth += 1

    lo = np.concatenate([r[0] for r in resolved]) if resolved else np.empty(0)
    hi = np.concatenate([r[1] for r in resolved]) if resolved else np.empty(0)
    q_lo = np.concatenate([r[2] for r in resolved]) if resolved else np.empty(0)
    q_hi = np.concatenate([r[3] for r in resolved]) if resolved else np.empty(0)
    order = np.argsort(lo, kind="stable")
    lo, hi, q_lo, q_hi = lo[order], hi[order], q_lo[order], q_hi[order]

    per_target = []
    for b in targets:
        base = float(np.mod(b, TWO_PI))
        g_lo = (q_lo - base) / TWO_PI
        g_hi = (q_hi - base) / TWO_PI
        # a level w is owned by the interval with g in (min, max]; shared
        # endpoints are therefore counted once
        w_min = np.floor(np.minimum(g_lo, g_hi))
        w_max = np.floor(np.maximum(g_lo, g_hi))
        b_lo, b_hi, b_t = [], [], []
        for j in np.flatnonzero(w_max > w_min):
            for w in range(int(w_min[j]) + 1, int(w_max[j]) + 1):
                b_lo.append(lo[j])
                b_hi.append(hi[j])
                b_t.append(base + TWO_PI * w)
        if not b_lo:
            per_target.append(None)
            continue
        blo, bhi, bt = np.asarray(b_lo), np.asarray(b_hi), np.asarray(b_t)
        f_lo, _ = shoot(system, q_a, blo, n, 1.0)
        roots, _ = refine_roots(system, q_a, bt, blo, bhi, f_lo - bt, n, 1.0)
        prop = propagate_endpoints(system, q_a, roots, n, 1.0)
        keep = np.abs(prop.jqp) >= CAUSTIC_TOL
        per_target.append((prop.action[keep], prop.maslov[keep], prop.jqp[keep]))
    return per_target, closed, dropped


def chaos_census(system: SystemSpec, region_a: tuple[float, float],
                 region_b: tuple[float, float], n_kicks: int, n_seeds: int,
                 p_window: tuple[float, float] = (-0.5, 0.5), *,
                 max_depth: int = 12, closure_span: float = 8 * TWO_PI) -> ChaosCensus:
    """Semiclassical probability to go from ``region_a`` into ``region_b``.

    The source at each representative point ``a`` is the position eigenstate
    filtered to momenta in ``p_window``. For each of the 8 x 8 endpoint pairs
    the orbits ``a -> b`` (all windings) are found by scanning ``n_seeds``
    momenta; seed intervals are bisected until ``q_n(p)`` is monotone and
    close to linear on them, so every crossing of a target level is a single
    root. Intervals whose image still spans more than ``closure_span`` (or
    whose slope still varies wildly) are too folded to enumerate. Their orbits are
    accounted for by the classical sum rule: the momentum measure ``dp``
    spreads uniformly over the circle and contributes ``|B| dp / (2 pi |W|)``
    without interference.

    The coherent part is ``2 pi hbar |sum_a A_a e^{i phi_a}|^2 / |W|`` per
    pair, averaged over the stencil in ``b`` and scaled by ``|B|``; both parts
    are averaged over the stencil in ``a``.
    """
    if not system.is_kicked:
        raise ValueError("chaos census needs a kicked_rotor system")
    if n_kicks < 0 or int(n_kicks) != n_kicks:
        raise ValueError("n_kicks must be a non-negative integer")
    if n_seeds < 2:
        raise ValueError("n_seeds must be at least 2")
    w_lo, w_hi = float(p_window[0]), float(p_window[1])
    if not w_hi > w_lo:
        raise ValueError("p_window must be a non-degenerate interval")
    a_pts = stencil(region_a)
    b_pts = stencil(region_b)
    b_len = float(region_b[1] - region_b[0])
    width = w_hi - w_lo

    if n_kicks == 0:
        frac = float(np.mean(_on_arc(a_pts, region_b)))
        return ChaosCensus(frac, frac, 0.0, 0, 0.0, 0.0, width)

    hbar = system.hbar
    coherent_terms, closure_terms = [], []
    n_orbits = 0
    closed_total = 0.0
    dropped_total = 0.0
    for q_a in a_pts:
        per_target, closed, dropped = _census_from(system, float(q_a), b_pts, int(n_kicks),
                                                   (w_lo, w_hi), n_seeds, max_depth, closure_span)
        closed_total += closed
        dropped_total += dropped
        closure_terms.append(b_len * closed / (TWO_PI * width))
        densities = []
        for entry in per_target:
            if entry is None:
                densities.append(0.0)
                continue
            action, maslov, jqp = entry
            n_orbits += action.size
            contribs = [TrajectoryContribution.from_parts(
                1.0 / math.sqrt(TWO_PI * hbar * abs(j)), s, int(nu), hbar)
                for s, nu, j in zip(action, maslov, jqp)]
            if not contribs:
                densities.append(0.0)
                continue
            p_total, _, _ = transition_probability(combine_contributions(contribs))
            densities.append(TWO_PI * hbar * p_total / width)
        coherent_terms.append(b_len * math.fsum(densities) / len(densities))

    coherent = math.fsum(coherent_terms) / len(a_pts)
    closure = math.fsum(closure_terms) / len(a_pts)
    if n_orbits == 0 and closed_total == 0.0:
        warnings.warn("no orbit connects the two regions for any endpoint pair",
                      NoTrajectoryWarning, stacklevel=3)
        return ChaosCensus(0.0, 0.0, 0.0, 0, 0.0, dropped_total / len(a_pts), width)
    return ChaosCensus(coherent + closure, coherent, closure, n_orbits,
                       closed_total / len(a_pts), dropped_total / len(a_pts), width)


def chaos_tunneling_probability(system: SystemSpec, region_a: tuple[float, float],
                                region_b: tuple[float, float], n_kicks: int, n_seeds: int,
                                p_window: tuple[float, float] = (-0.5, 0.5), **kwargs) -> float:
    """Probability of ending in ``region_b`` after ``n_kicks`` starting in ``region_a``.

    See :func:`chaos_census` for the construction. With ``n_kicks = 0`` this
    is the fraction of the source stencil already inside ``region_b``.
    Returns ``0.0`` with a :class:`~cohertherm.errors.NoTrajectoryWarning`
    when no orbit links the regions.
    """
    return chaos_census(system, region_a, region_b, n_kicks, n_seeds, p_window,
                        **kwargs).probability
