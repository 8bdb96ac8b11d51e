"""Classical 1D Hamiltonian systems, trajectories and boundary-value search.

Continuous systems are integrated with fixed-step velocity Verlet; the
kicked rotor is iterated as the exact standard map. Alongside every orbit the
tangent map (monodromy) is propagated, the Lagrangian action is accumulated
and conjugate points are counted, which is everything a Van Vleck sum needs.

The stability matrix is stored in ``(p, q)`` ordering::

    M = d(p_f, q_f) / d(p_i, q_i) = [[dp_f/dp_i, dp_f/dq_i],
                                    [dq_f/dp_i, dq_f/dq_i]]

so ``M[1, 0] = dq_f/dp_i`` is the element whose zeros mark conjugate points
and whose inverse gives ``-d2S/dq_i dq_f``.

The potentials are a small catalogue picked for testability; nothing about
the semiclassical machinery depends on that choice:

* ``free_particle``: V = 0
* ``harmonic``: V = m w^2 q^2 / 2
* ``double_well``: V = V0 (q^2/a^2 - 1)^2 with a = well_separation / 2
* ``kicked_rotor``: H = p^2/2m + K cos(q) sum_n delta(t - n), iterated as
  p' = p + K sin q, q' = q + p'/m on the cylinder (q mod 2 pi).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import CausticAtEndpoint, NonFiniteState, WindowTooCoarse

KINDS = ("free_particle", "harmonic", "double_well", "kicked_rotor")

TWO_PI = 2.0 * math.pi
DEFAULT_STEPS = 10_000
CAUSTIC_TOL = 1e-12
ROOT_TOL = 1e-10
DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class SystemSpec:
    """A one-dimensional Hamiltonian system together with hbar and k_B."""

    kind: str
    mass: float = 1.0
    omega: float = 1.0
    barrier_height: float = 1.0
    well_separation: float = 2.0
    kick_strength: float = 0.0
    hbar: float = 1.0
    k_B: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown system kind {self.kind!r}; expected one of {KINDS}")
        if not (self.mass > 0 and self.hbar > 0 and self.k_B > 0):
            raise ValueError("mass, hbar and k_B must be positive")
        if self.kind == "harmonic" and not self.omega > 0:
            raise ValueError("harmonic system needs omega > 0")
        if self.kind == "double_well":
            if not self.barrier_height > 0:
                raise ValueError("double_well needs barrier_height > 0")
            if not self.well_separation > 0:
                raise ValueError("double_well needs well_separation > 0")

    @property
    def is_kicked(self) -> bool:
        return self.kind == "kicked_rotor"

    @property
    def half_separation(self) -> float:
        return 0.5 * self.well_separation

    def potential(self, q):
        """Potential energy V(q); for the kicked rotor, the kick potential K cos q."""
        q = np.asarray(q, dtype=float)
        if self.kind == "free_particle":
            return np.zeros_like(q)
        if self.kind == "harmonic":
            return 0.5 * self.mass * self.omega**2 * q**2
        if self.kind == "double_well":
            a = self.half_separation
            return self.barrier_height * (q**2 / a**2 - 1.0) ** 2
        return self.kick_strength * np.cos(q)

    def force(self, q):
        q = np.asarray(q, dtype=float)
        if self.kind == "free_particle":
            return np.zeros_like(q)
        if self.kind == "harmonic":
            return -self.mass * self.omega**2 * q
        if self.kind == "double_well":
            a = self.half_separation
            return -4.0 * self.barrier_height * q * (q**2 - a**2) / a**4
        return self.kick_strength * np.sin(q)

    def curvature(self, q):
        """Second derivative V''(q)."""
        q = np.asarray(q, dtype=float)
        if self.kind == "free_particle":
            return np.zeros_like(q)
        if self.kind == "harmonic":
            return np.full_like(q, self.mass * self.omega**2)
        if self.kind == "double_well":
            a = self.half_separation
            return 4.0 * self.barrier_height * (3.0 * q**2 - a**2) / a**4
        return -self.kick_strength * np.cos(q)

    def hamiltonian(self, q, p):
        """Energy p^2/2m + V(q) (continuous systems only)."""
        if self.is_kicked:
            raise ValueError("the kicked rotor has no conserved Hamiltonian")
        return np.asarray(p, dtype=float) ** 2 / (2.0 * self.mass) + self.potential(q)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """One classical path plus its action, stability and Maslov data.

    ``times``, ``qs``, ``ps``, ``actions`` and ``maslov_counts`` are sampled
    at every integrator step (every kick for maps); ``monodromies`` has shape
    ``(n_samples, 2, 2)``. For the kicked rotor positions are reported modulo
    2 pi and ``winding`` holds the number of turns of the unwrapped orbit.
    """

    system: SystemSpec
    q_i: float
    p_i: float
    q_f: float
    p_f: float
    t: float
    action: float
    maslov_index: int
    stability: np.ndarray
    times: np.ndarray = field(repr=False)
    qs: np.ndarray = field(repr=False)
    ps: np.ndarray = field(repr=False)
    actions: np.ndarray = field(repr=False)
    monodromies: np.ndarray = field(repr=False)
    maslov_counts: np.ndarray = field(repr=False)
    n_kicks: int | None = None
    winding: int = 0

    @property
    def m21(self) -> float:
        """dq_f/dp_i."""
        return float(self.stability[1, 0])

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.times.tolist(), self.qs.tolist(), self.ps.tolist()))

    def to_csv(self, path: str | Path) -> None:
        write_trajectory_csv(self, path)


def step_count(system: SystemSpec, t: float, dt: float | None) -> tuple[int, float]:
    if system.is_kicked:
        n = int(round(t))
        if n < 0 or abs(n - t) > 1e-12:
            raise ValueError("kicked systems need a non-negative integer kick count")
        return n, 1.0
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return 0, 0.0
    if dt is None:
        n = DEFAULT_STEPS
    else:
        if not dt > 0:
            raise ValueError("dt must be positive")
        n = max(1, int(math.ceil(t / dt - 1e-9)))
    return n, float(t) / n


class Propagator:
    """Batched orbit + tangent-map + action + Maslov counter.

    The state is a set of 1D arrays of equal length so that a whole momentum
    scan advances in lock-step.
    """

    def __init__(self, system: SystemSpec, q0, p0):
        self.system = system
        self.q = np.array(q0, dtype=float, ndmin=1)
        self.p = np.array(p0, dtype=float, ndmin=1)
        self.q, self.p = np.broadcast_arrays(self.q, self.p)
        self.q = self.q.copy()
        self.p = self.p.copy()
        shape = self.q.shape
        # columns: response to dp_i (a*) and to dq_i (b*); rows p then q
        self.jpp = np.ones(shape)
        self.jpq = np.zeros(shape)
        self.jqp = np.zeros(shape)
        self.jqq = np.ones(shape)
        self.action = np.zeros(shape)
        self.maslov = np.zeros(shape, dtype=np.int64)
        self._last_sign = np.zeros(shape)
        self._force = None if system.is_kicked else system.force(self.q)

    def _count_conjugate_points(self):
        sg = np.sign(self.jqp)
        zero = sg == 0
        flip = (~zero) & (self._last_sign != 0) & (sg != self._last_sign)
        self.maslov += flip | zero
        self._last_sign = sg

    def verlet(self, h: float):
        sysm = self.system
        m = sysm.mass
        q0 = self.q
        v0 = sysm.potential(q0)
        c0 = sysm.curvature(q0)
        ph = self.p + 0.5 * h * self._force
        q1 = q0 + h * ph / m
        f1 = sysm.force(q1)
        p1 = ph + 0.5 * h * f1
        c1 = sysm.curvature(q1)

        ap = self.jpp - 0.5 * h * c0 * self.jqp
        bq_p = self.jqp + h * ap / m
        self.jpp = ap - 0.5 * h * c1 * bq_p
        self.jqp = bq_p
        aq = self.jpq - 0.5 * h * c0 * self.jqq
        bq_q = self.jqq + h * aq / m
        self.jpq = aq - 0.5 * h * c1 * bq_q
        self.jqq = bq_q

        self.action += m * (q1 - q0) ** 2 / (2.0 * h) - 0.5 * h * (v0 + sysm.potential(q1))
        self.q, self.p, self._force = q1, p1, f1
        self._count_conjugate_points()

    def kick(self):
        sysm = self.system
        m, k = sysm.mass, sysm.kick_strength
        q0 = self.q
        cq = k * np.cos(q0)
        p1 = self.p + k * np.sin(q0)
        q1 = q0 + p1 / m
        self.action += p1**2 / (2.0 * m) - cq
        self.jpp = self.jpp + cq * self.jqp
        self.jqp = self.jqp + self.jpp / m
        self.jpq = self.jpq + cq * self.jqq
        self.jqq = self.jqq + self.jpq / m
        self.q, self.p = q1, p1
        self._count_conjugate_points()

    def step(self, h: float):
        if self.system.is_kicked:
            self.kick()
        else:
            self.verlet(h)

    def finite(self) -> np.ndarray:
        return np.isfinite(self.q) & np.isfinite(self.p) & np.isfinite(self.jqp) & np.isfinite(self.jpp)


SCALAR_BATCH = 8


def _scalar_model(system: SystemSpec):
    """Pure-float ``(V, F, V'')`` closures; same formulas as the array methods."""
    if system.kind == "free_particle":
        return (lambda q: 0.0), (lambda q: 0.0), (lambda q: 0.0)
    if system.kind == "harmonic":
        m, w2 = system.mass, system.omega**2
        k = m * w2
        return (lambda q: 0.5 * m * w2 * (q * q)), (lambda q: -k * q), (lambda q: k)
    v0 = system.barrier_height
    a = system.half_separation
    a2, a4 = a**2, a**4
    def pot(q):
        u = q * q / a2 - 1.0
        return v0 * (u * u)

    return (pot,
            (lambda q: -4.0 * v0 * q * (q * q - a2) / a4),
            (lambda q: 4.0 * v0 * (3.0 * (q * q) - a2) / a4))


def _verlet_scalar(system: SystemSpec, q: float, p: float, n: int, h: float, record=None):
    """One orbit with Python floats; per-step numpy overhead dominates small batches.

    Mirrors :meth:`Propagator.verlet` operation for operation (``x * x`` is
    used for squares so overflow gives inf instead of raising). When ``record``
    is a list, ``(q, p, action, jpp, jpq, jqp, jqq, maslov)`` is appended
    after every step.
    """
    pot, frc, crv = _scalar_model(system)
    q, p, h = float(q), float(p), float(h)
    m = float(system.mass)
    jpp, jpq, jqp, jqq = 1.0, 0.0, 0.0, 1.0
    action = 0.0
    maslov = 0
    last = 0.0
    f0 = frc(q)
    v0 = pot(q)
    c0 = crv(q)
    half = 0.5 * h
    for _ in range(n):
        ph = p + half * f0
        q1 = q + h * ph / m
        f1 = frc(q1)
        p1 = ph + half * f1
        c1 = crv(q1)
        v1 = pot(q1)
        ap = jpp - half * c0 * jqp
        bq_p = jqp + h * ap / m
        jpp = ap - half * c1 * bq_p
        jqp = bq_p
        aq = jpq - half * c0 * jqq
        bq_q = jqq + h * aq / m
        jpq = aq - half * c1 * bq_q
        jqq = bq_q
        dq = q1 - q
        action += m * (dq * dq) / (2.0 * h) - half * (v0 + v1)
        q, p, f0, v0, c0 = q1, p1, f1, v1, c1
        sg = (jqp > 0) - (jqp < 0)
        if sg == 0 or (last != 0 and sg != last):
            maslov += 1
        last = sg
        if record is not None:
            record.append((q, p, action, jpp, jpq, jqp, jqq, maslov))
    return q, p, action, jpp, jpq, jqp, jqq, maslov


class _Endpoints:
    """Final state of a batch propagated element by element."""

    def __init__(self, rows):
        cols = list(zip(*rows)) if rows else [()] * 8
        self.q, self.p, self.action, self.jpp, self.jpq, self.jqp, self.jqq = (
            np.array(c, dtype=float) for c in cols[:7])
        self.maslov = np.array(cols[7], dtype=np.int64)

    def finite(self) -> np.ndarray:
        return np.isfinite(self.q) & np.isfinite(self.p) & np.isfinite(self.jqp) & np.isfinite(self.jpp)


def _use_scalar(system: SystemSpec, size: int) -> bool:
    return not system.is_kicked and size <= SCALAR_BATCH


def propagate_endpoints(system: SystemSpec, q0, p0, n: int, h: float):
    q0, p0 = np.broadcast_arrays(np.array(q0, dtype=float, ndmin=1), np.array(p0, dtype=float, ndmin=1))
    if _use_scalar(system, q0.size):
        return _Endpoints([_verlet_scalar(system, float(a), float(b), n, h)
                           for a, b in zip(q0, p0)])
    prop = Propagator(system, q0, p0)
    for _ in range(n):
        prop.step(h)
    return prop


def _integrate_batch(system: SystemSpec, q0, p0, t: float, dt: float | None) -> list[Trajectory]:
    """Integrate several orbits in lock-step, recording every sample."""
    n, h = step_count(system, t, dt)
    q0, p0 = np.broadcast_arrays(np.array(q0, dtype=float, ndmin=1), np.array(p0, dtype=float, ndmin=1))
    batch = q0.size
    qs = np.empty((n + 1, batch))
    ps = np.empty((n + 1, batch))
    acts = np.empty((n + 1, batch))
    mono = np.empty((n + 1, batch, 2, 2))
    masl = np.empty((n + 1, batch), dtype=np.int64)

    if _use_scalar(system, batch):
        for b in range(batch):
            rows = [(float(q0[b]), float(p0[b]), 0.0, 1.0, 0.0, 0.0, 1.0, 0)]
            _verlet_scalar(system, float(q0[b]), float(p0[b]), n, h, record=rows)
            arr = np.array(rows, dtype=float)
            qs[:, b], ps[:, b], acts[:, b] = arr[:, 0], arr[:, 1], arr[:, 2]
            mono[:, b] = arr[:, 3:7].reshape(-1, 2, 2)
            masl[:, b] = arr[:, 7].astype(np.int64)
    else:
        prop = Propagator(system, q0, p0)

        def record(k):
            qs[k], ps[k], acts[k], masl[k] = prop.q, prop.p, prop.action, prop.maslov
            mono[k, :, 0, 0] = prop.jpp
            mono[k, :, 0, 1] = prop.jpq
            mono[k, :, 1, 0] = prop.jqp
            mono[k, :, 1, 1] = prop.jqq

        record(0)
        for k in range(1, n + 1):
            prop.step(h)
            record(k)
    if not (np.all(np.isfinite(qs)) and np.all(np.isfinite(ps)) and np.all(np.isfinite(mono))):
        raise NonFiniteState("orbit left the representable range; reduce dt or t")

    times = np.arange(n + 1, dtype=float) * h if not system.is_kicked else np.arange(n + 1, dtype=float)
    if not system.is_kicked and n:
        times[-1] = t

    out = []
    for b in range(batch):
        q_col = qs[:, b]
        winding = 0
        if system.is_kicked:
            winding = int(math.floor(q_col[-1] / TWO_PI) - math.floor(q_col[0] / TWO_PI))
            q_col = np.mod(q_col, TWO_PI)
        arrays = [times.copy(), q_col.copy(), ps[:, b].copy(), acts[:, b].copy(),
                  mono[:, b].copy(), masl[:, b].copy()]
        for a in arrays:
            a.flags.writeable = False
        out.append(Trajectory(
            system=system,
            q_i=float(q_col[0]), p_i=float(ps[0, b]),
            q_f=float(q_col[-1]), p_f=float(ps[-1, b]),
            t=float(t), action=float(acts[-1, b]),
            maslov_index=int(masl[-1, b]),
            stability=arrays[4][-1],
            times=arrays[0], qs=arrays[1], ps=arrays[2], actions=arrays[3],
            monodromies=arrays[4], maslov_counts=arrays[5],
            n_kicks=n if system.is_kicked else None,
            winding=winding,
        ))
    return out


def integrate_trajectory(system: SystemSpec, q0: float, p0: float, t: float,
                         dt: float | None = None) -> Trajectory:
    """Integrate one orbit from ``(q0, p0)`` over time ``t``.

    For the kicked rotor ``t`` is the number of kicks and ``dt`` is ignored;
    otherwise ``dt`` defaults to ``t / 10**4`` and is shrunk so that an integer
    number of steps lands exactly on ``t``.

    Raises:
        NonFiniteState: if the orbit or its tangent map overflow.
    """
    return _integrate_batch(system, float(q0), float(p0), t, dt)[0]


def classical_action(traj: Trajectory) -> float:
    """Accumulated Lagrangian action of ``traj``."""
    return traj.action


def maslov_and_prefactor(traj: Trajectory) -> tuple[int, float]:
    """Return ``(nu, 1/sqrt(2 pi hbar |dq_f/dp_i|))``.

    Raises:
        CausticAtEndpoint: when ``|dq_f/dp_i| < 1e-12``.
    """
    m21 = traj.m21
    if abs(m21) < CAUSTIC_TOL:
        raise CausticAtEndpoint(f"|dq_f/dp_i| = {abs(m21):.3e} at the final time (focal point)")
    return traj.maslov_index, 1.0 / math.sqrt(TWO_PI * traj.system.hbar * abs(m21))


# --------------------------------------------------------------------------
# boundary-value search

def _wrap_levels(g_lo, g_hi):
    """Integer levels strictly crossed between two scaled mismatch values."""
    lo = np.minimum(g_lo, g_hi)
    hi = np.maximum(g_lo, g_hi)
    return np.floor(lo), np.floor(hi)


def shoot(system: SystemSpec, q_i: float, p, n: int, h: float):
    prop = propagate_endpoints(system, q_i, p, n, h)
    return prop.q, prop.jqp


def refine_roots(system, q_i, target, lo, hi, f_lo, n, h, max_iter=200):
    """Safeguarded Newton on q(t; p) - target, vectorised over brackets.

    Every bracket ``[lo, hi]`` holds a sign change of ``f``; Newton steps that
    leave the bracket are replaced by bisection so the iteration cannot escape.
    """
    lo, hi = lo.copy(), hi.copy()
    f_lo = f_lo.copy()
    x = 0.5 * (lo + hi)
    done = np.zeros(lo.shape, dtype=bool)
    fx = np.full(lo.shape, np.inf)
    for _ in range(max_iter):
        active = ~done
        if not np.any(active):
            break
        xa = x[active]
        qa, da = shoot(system, q_i, xa, n, h)
        fa = qa - target[active]
        fx[active] = fa
        conv = np.abs(fa) < ROOT_TOL
        width_done = (hi[active] - lo[active]) <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(xa))
        idx = np.flatnonzero(active)
        done[idx[conv | width_done]] = True
        # shrink brackets
        same = np.sign(fa) == np.sign(f_lo[active])
        lo_a, hi_a, flo_a = lo[active], hi[active], f_lo[active]
        lo_a = np.where(same, xa, lo_a)
        flo_a = np.where(same, fa, flo_a)
        hi_a = np.where(same, hi_a, xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = xa - fa / da
        ok = np.isfinite(newton) & (newton > lo_a) & (newton < hi_a)
        xn = np.where(ok, newton, 0.5 * (lo_a + hi_a))
        lo[active], hi[active], f_lo[active] = lo_a, hi_a, flo_a
        keep = ~(conv | width_done)
        x[idx[keep]] = xn[keep]
    return x, fx


def _unresolved_intervals(seeds, f, slope, period=None):
    """Seed intervals where a turning point could hide extra roots.

    A slope sign flip between two seeds means an extremum in between; if the
    extremum can plausibly reach a target level, the bracket may hold more than
    one root (or a pair the sign test cannot see).
    """
    dp = np.diff(seeds)
    flip = np.sign(slope[:-1]) * np.sign(slope[1:]) < 0
    reach = dp * np.maximum(np.abs(slope[:-1]), np.abs(slope[1:]))
    if period is None:
        dist = np.minimum(np.abs(f[:-1]), np.abs(f[1:]))
    else:
        r = np.mod(f, period)
        d = np.minimum(r, period - r)
        dist = np.minimum(d[:-1], d[1:])
    return flip & (dist < reach)


def find_boundary_trajectories(system: SystemSpec, q_i: float, q_f: float, t: float,
                               p_window: tuple[float, float], n_seeds: int,
                               dt: float | None = None) -> list[Trajectory]:
    """All isolated orbits with ``q(0) = q_i``, ``q(t) = q_f`` and ``p_i`` in the window.

    Initial momenta are scanned on ``n_seeds`` evenly spaced seeds; each sign
    change of the endpoint mismatch is refined by safeguarded Newton to
    ``|q(t) - q_f| < 1e-10`` and roots closer than ``1e-8`` in ``p_i`` are
    merged. On the kicked-rotor cylinder every winding ``q_f + 2 pi w`` is a
    separate target, so the unwrapped endpoint is used and each crossed level
    yields a root.

    An empty list is a valid answer. When a seed interval contains a turning
    point of ``q(t; p_i)`` that could reach the target, adjacent seeds may be
    bracketing several roots at once and a
    :class:`~cohertherm.errors.WindowTooCoarse` warning is issued.

    Trajectories come back sorted by initial momentum.
    """
    if n_seeds < 2:
        raise ValueError("n_seeds must be at least 2")
    p_lo, p_hi = float(p_window[0]), float(p_window[1])
    if not p_hi > p_lo:
        raise ValueError("p_window must be a non-degenerate interval")
    n, h = step_count(system, t, dt)
    seeds = np.linspace(p_lo, p_hi, n_seeds)
    q_end, slope = shoot(system, q_i, seeds, n, h)
    if not (np.all(np.isfinite(q_end)) and np.all(np.isfinite(slope))):
        raise NonFiniteState("seed orbit diverged during the momentum scan")

    roots: list[float] = []
    lo_list, hi_list, tgt_list = [], [], []
    if system.is_kicked:
        base = float(np.mod(q_f, TWO_PI))
        f = q_end - base
        g = f / TWO_PI
        w_min, w_max = _wrap_levels(g[:-1], g[1:])
        for j in np.flatnonzero(w_max > w_min):
            for w in range(int(w_min[j]) + 1, int(w_max[j]) + 1):
                lo_list.append(seeds[j])
                hi_list.append(seeds[j + 1])
                tgt_list.append(base + TWO_PI * w)
        coarse = _unresolved_intervals(seeds, f, slope, period=TWO_PI)
    else:
        f = q_end - q_f
        roots.extend(seeds[np.abs(f) < ROOT_TOL].tolist())
        s = np.where(np.abs(f) < ROOT_TOL, 0.0, np.sign(f))
        cross = np.flatnonzero((s[:-1] * s[1:]) < 0)
        lo_list = list(seeds[cross])
        hi_list = list(seeds[cross + 1])
        tgt_list = [q_f] * len(cross)
        coarse = _unresolved_intervals(seeds, f, slope)

    if np.any(coarse):
        warnings.warn(
            f"{int(coarse.sum())} seed interval(s) in p_window=({p_lo}, {p_hi}) hide a turning "
            "point that may bracket several roots; raise n_seeds",
            WindowTooCoarse, stacklevel=2)

    if lo_list:
        lo = np.asarray(lo_list)
        hi = np.asarray(hi_list)
        tgt = np.asarray(tgt_list)
        q_lo, _ = shoot(system, q_i, lo, n, h)
        x, _ = refine_roots(system, q_i, tgt, lo, hi, q_lo - tgt, n, h)
        roots.extend(x.tolist())

    if not roots:
        return []
    kept: list[float] = []
    for r in sorted(roots):
        if kept and abs(r - kept[-1]) < DEDUP_TOL:
            continue
        kept.append(r)
    return _integrate_batch(system, q_i, np.asarray(kept), t, dt)


# --------------------------------------------------------------------------
# export

def write_trajectory_csv(traj: Trajectory, path: str | Path) -> None:
    """Write ``time,q,p,action_so_far,m11,m12,m21,m22,maslov`` at 17 significant digits."""
    lines = ["time,q,p,action_so_far,m11,m12,m21,m22,maslov"]
    m = traj.monodromies
    for k in range(traj.times.size):
        row = (traj.times[k], traj.qs[k], traj.ps[k], traj.actions[k],
               m[k, 0, 0], m[k, 0, 1], m[k, 1, 0], m[k, 1, 1])
        lines.append(",".join(f"{v:.17g}" for v in row) + f",{int(traj.maslov_counts[k])}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def seed_scan(system: SystemSpec, q_i: float, t: float, p_values: Sequence[float],
              dt: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Endpoints ``(q(t), dq(t)/dp_i)`` for a batch of initial momenta.

    For the kicked rotor ``q(t)`` is left unwrapped.
    """
    n, h = step_count(system, t, dt)
    return shoot(system, q_i, np.asarray(p_values, dtype=float), n, h)
