"""Command-line scenario runner.

Usage::

    cohertherm CONFIG [--output-dir PATH] [--seed N]

``CONFIG`` is an INI file with three sections:

``[run]``
    ``scenario`` (required), ``output_dir`` (default ``cohertherm-out``),
    ``seed`` (default 0).
``[system]``
    Any :class:`~cohertherm.dynamics.SystemSpec` field. Each scenario has its
    own default system.
``[parameters]``
    Scenario parameters; every key has a default (see ``DEFAULTS``).

Unknown sections or keys are rejected. All randomness comes from NumPy's
PCG64 bit generator seeded with the run seed
(``numpy.random.Generator(numpy.random.PCG64(seed))``).

Exit codes: 0 on success, 1 for configuration errors, 2 for numerical errors
raised by the library.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import math
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import dynamics, fluctuation, opensystem, oracle, purification, semiclassics
from .dynamics import SystemSpec
from .errors import CoherthermError
from .states import DensityMatrix

SCENARIOS = ("trajectories", "propagator", "chaos_tunneling", "fluctuation_curve",
             "phase_opt", "lindblad")
RUN_KEYS = ("scenario", "output_dir", "seed")
DEFAULT_OUTPUT = "cohertherm-out"
SEED_MAX = 2**64 - 1

SYSTEM_DEFAULTS: dict[str, dict[str, Any]] = {
    "trajectories": {"kind": "double_well"},
    "propagator": {"kind": "double_well"},
    "chaos_tunneling": {"kind": "kicked_rotor", "kick_strength": 7.0, "hbar": 0.05},
    "fluctuation_curve": {"kind": "free_particle"},
    "phase_opt": {"kind": "free_particle"},
    "lindblad": {"kind": "free_particle"},
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "trajectories": {"q_i": -1.0, "q_f": 1.0, "t": 1.0, "p_min": -7.0, "p_max": 3.5,
                     "n_seeds": 2000, "dt": 1e-4},
    "propagator": {"q_i": -1.0, "q_f": 1.0, "t": 1.0, "p_min": -7.0, "p_max": 3.5,
                   "n_seeds": 2000, "dt": 1e-4},
    "chaos_tunneling": {"region_a_min": math.pi - 0.3, "region_a_max": math.pi + 0.3,
                        "region_b_min": 0.3, "region_b_max": 0.9, "n_kicks": 20,
                        "n_seeds": 1000, "p_min": -0.5, "p_max": 0.5, "exact": True},
    "fluctuation_curve": {"enhancement_strength": 2.0, "target_delta_s": -1.5, "width": 0.5,
                          "delta_s_min": -3.0, "delta_s_max": 3.0, "n_points": 121,
                          "visibility": 0.0, "phase_rate": 2.0},
    "phase_opt": {"n_components": 3, "system_dim": 0, "ancilla_dim": 0},
    "lindblad": {"coupling": 1.0, "energy_0": 1.0, "energy_1": 0.0, "dephasing": 0.5,
                 "t": 10.0, "dt": 0.01, "initial_site": 0},
}


class ConfigError(Exception):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    system: SystemSpec
    parameters: dict[str, Any]
    output_dir: Path
    seed: int
    source_hash: str = ""
    overrides: dict[str, Any] = field(default_factory=dict)


def _coerce(key: str, raw: str, like: Any) -> Any:
    text = raw.strip()
    try:
        if isinstance(like, bool):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(like, int):
            return int(text)
        if isinstance(like, float):
            v = float(text)
            if not math.isfinite(v):
                raise ValueError(text)
            return v
        return text
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {type(like).__name__}") from None


_SYSTEM_TYPES = {f.name: f.type for f in fields(SystemSpec)}


def _system_from(section: dict[str, str], scenario: str) -> SystemSpec:
    values: dict[str, Any] = dict(SYSTEM_DEFAULTS[scenario])
    for key, raw in section.items():
        if key not in _SYSTEM_TYPES:
            raise ConfigError(f"system.{key}", "unknown key")
        values[key] = raw.strip() if key == "kind" else _coerce(f"system.{key}", raw, 0.0)
    try:
        return SystemSpec(**values)
    except (TypeError, ValueError) as exc:
        bad = next((k for k in section if k in str(exc)), "kind" if "kind" in str(exc) else "")
        raise ConfigError(f"system.{bad}" if bad else "system", str(exc)) from None


def load_config(path: str | Path, output_dir: str | None = None,
                seed: int | None = None) -> ScenarioConfig:
    """Parse and validate a scenario file; CLI flags override the file."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {p}: {exc.strerror}") from None
    parser = configparser.ConfigParser(interpolation=None, strict=True,
                                       default_section="__no_defaults__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(p))
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None

    for sec in parser.sections():
        if sec not in ("run", "system", "parameters"):
            raise ConfigError(sec, "unknown section")
    run = dict(parser["run"]) if parser.has_section("run") else {}
    for key in run:
        if key not in RUN_KEYS:
            raise ConfigError(f"run.{key}", "unknown key")
    scenario = run.get("scenario", "").strip()
    if scenario not in SCENARIOS:
        raise ConfigError("run.scenario", f"expected one of {', '.join(SCENARIOS)}, got {scenario!r}")

    system = _system_from(dict(parser["system"]) if parser.has_section("system") else {}, scenario)

    params = dict(DEFAULTS[scenario])
    given = dict(parser["parameters"]) if parser.has_section("parameters") else {}
    for key, raw in given.items():
        if key not in params:
            raise ConfigError(f"parameters.{key}", f"unknown key for scenario {scenario}")
        params[key] = _coerce(f"parameters.{key}", raw, DEFAULTS[scenario][key])

    if seed is None:
        seed = _coerce("run.seed", run.get("seed", "0"), 0)
    if not 0 <= seed <= SEED_MAX:
        raise ConfigError("run.seed", "must be a 64-bit unsigned integer")
    out = Path(output_dir if output_dir is not None else run.get("output_dir", DEFAULT_OUTPUT).strip())
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return ScenarioConfig(scenario, system, params, out, int(seed), digest)


# --------------------------------------------------------------------------
# scenarios (each returns the list of files it wrote, relative to output_dir)

def _run_trajectories(cfg: ScenarioConfig, rng) -> list[str]:
    prm = cfg.parameters
    trajs = dynamics.find_boundary_trajectories(
        cfg.system, prm["q_i"], prm["q_f"], prm["t"], (prm["p_min"], prm["p_max"]),
        prm["n_seeds"], dt=prm["dt"])
    names = []
    for k, tr in enumerate(trajs):
        name = f"trajectory_{k:03d}.csv"
        tr.to_csv(cfg.output_dir / name)
        names.append(name)
    return names


def _run_propagator(cfg: ScenarioConfig, rng) -> list[str]:
    prm = cfg.parameters
    trajs = dynamics.find_boundary_trajectories(
        cfg.system, prm["q_i"], prm["q_f"], prm["t"], (prm["p_min"], prm["p_max"]),
        prm["n_seeds"], dt=prm["dt"])
    result = semiclassics.vvg_amplitude(trajs, cfg.system.hbar)
    result.to_csv(cfg.output_dir / "propagator.csv")
    return ["propagator.csv"]


def _run_chaos(cfg: ScenarioConfig, rng) -> list[str]:
    prm = cfg.parameters
    a = (prm["region_a_min"], prm["region_a_max"])
    b = (prm["region_b_min"], prm["region_b_max"])
    window = (prm["p_min"], prm["p_max"])
    census = semiclassics.chaos_census(cfg.system, a, b, prm["n_kicks"], prm["n_seeds"], window)
    exact = ""
    if prm["exact"]:
        exact = f"{oracle.region_transfer_exact(cfg.system, a, b, prm['n_kicks'], window):.17g}"
    lines = ["kick_strength,n_kicks,semiclassical,coherent,closure,dropped,n_orbits,exact",
             f"{cfg.system.kick_strength:.17g},{prm['n_kicks']},{census.probability:.17g},"
             f"{census.coherent:.17g},{census.closure:.17g},{census.dropped_measure:.17g},"
             f"{census.n_orbits},{exact}"]
    _write(cfg.output_dir / "chaos_tunneling.csv", lines)
    return ["chaos_tunneling.csv"]


def _two_path(rel_phase: float, visibility: float) -> semiclassics.PropagatorResult:
    hbar = 1.0
    return semiclassics.combine_contributions([
        semiclassics.TrajectoryContribution.from_parts(1.0, 0.0, 0, hbar),
        semiclassics.TrajectoryContribution.from_parts(visibility, rel_phase * hbar, 0, hbar),
    ])


def _run_fluctuation(cfg: ScenarioConfig, rng) -> list[str]:
    prm = cfg.parameters
    k_B = cfg.system.k_B
    model = fluctuation.StructuredCoherenceModel(prm["enhancement_strength"],
                                                 prm["target_delta_s"], prm["width"])
    xs = np.linspace(prm["delta_s_min"], prm["delta_s_max"], prm["n_points"])
    quantum = None
    v = prm["visibility"]
    if v > 0:
        # toy two-path channels whose relative phase grows with the entropy change
        w = prm["phase_rate"]

        def quantum(ds):
            return fluctuation.quantum_ratio(_two_path(w * ds / k_B, v),
                                             _two_path(-w * ds / k_B + math.pi / 2, v), ds, k_B)
    fluctuation.ratio_curve(xs, k_B, model, quantum).to_csv(cfg.output_dir / "ratio_curve.csv")
    return ["ratio_curve.csv"]


def _run_phase_opt(cfg: ScenarioConfig, rng) -> list[str]:
    prm = cfg.parameters
    n = prm["n_components"]
    if n < 1:
        raise ConfigError("parameters.n_components", "must be at least 1")
    sdim = prm["system_dim"] or n
    adim = prm["ancilla_dim"] or n
    if sdim < n:
        raise ConfigError("parameters.system_dim", "must be at least n_components")
    mixed = purification.random_mixed_state(n, sdim, rng)
    state = purification.purify(mixed, adim)
    u = purification.random_unitary(sdim * adim, rng)
    tgt = rng.standard_normal(sdim * adim) + 1j * rng.standard_normal(sdim * adim)
    tgt /= np.linalg.norm(tgt)
    purification.write_phase_report(state, u, tgt, cfg.output_dir / "phase_report.csv")
    return ["phase_report.csv"]


def _run_lindblad(cfg: ScenarioConfig, rng) -> list[str]:
    prm = cfg.parameters
    j = prm["coupling"]
    site = prm["initial_site"]
    if site not in (0, 1):
        raise ConfigError("parameters.initial_site", "must be 0 or 1")
    h = opensystem.build_resonant_hamiltonian(opensystem.ResonantCoupling(
        2, np.array([[0.0, j], [j, 0.0]]), (prm["energy_0"], prm["energy_1"])))
    g = prm["dephasing"]
    model = opensystem.LindbladModel(h, tuple(opensystem.dephasing_operators(2)), (g, g),
                                     hbar=cfg.system.hbar)
    rho0 = DensityMatrix.pure(np.eye(2)[site])
    snaps = opensystem.evolve_lindblad(rho0, model, prm["t"], prm["dt"])
    opensystem.write_snapshot_csv(snaps, cfg.output_dir / "lindblad_snapshots.csv", cfg.system.k_B)
    return ["lindblad_snapshots.csv"]


RUNNERS: dict[str, Callable[[ScenarioConfig, np.random.Generator], list[str]]] = {
    "trajectories": _run_trajectories,
    "propagator": _run_propagator,
    "chaos_tunneling": _run_chaos,
    "fluctuation_curve": _run_fluctuation,
    "phase_opt": _run_phase_opt,
    "lindblad": _run_lindblad,
}


def _write(path: Path, lines: list[str]) -> None:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run(cfg: ScenarioConfig) -> int:
    """Execute one scenario and write its CSVs plus ``manifest.txt``."""
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    start = time.perf_counter()
    written = RUNNERS[cfg.scenario](cfg, rng)
    wall = time.perf_counter() - start
    lines = [f"scenario = {cfg.scenario}",
             f"config_sha256 = {cfg.source_hash}",
             f"seed = {cfg.seed}",
             "prng = numpy PCG64",
             f"wall_time_s = {wall:.6f}"]
    lines += [f"artifact = {name} sha256:{_sha256(cfg.output_dir / name)}" for name in written]
    _write(cfg.output_dir / "manifest.txt", lines)
    return 0


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="cohertherm", description=__doc__.split("\n\n")[0])
    ap.add_argument("config", help="scenario INI file")
    ap.add_argument("--output-dir", help="overrides [run] output_dir")
    ap.add_argument("--seed", type=int, help="overrides [run] seed")
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config, args.output_dir, args.seed)
        return run(cfg)
    except ConfigError as exc:
        print(f"cohertherm: config error: {exc}", file=sys.stderr)
        return 1
    except CoherthermError as exc:
        print(f"cohertherm: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
