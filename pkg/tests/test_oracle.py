import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohertherm.dynamics import TWO_PI, SystemSpec
from cohertherm.errors import BoundaryLeak, GridMismatch
from cohertherm.oracle import (
    KICKED_GRID,
    GridState,
    coherent_state,
    evolve_exact,
    evolve_kicked_exact,
    gaussian_state,
    hamiltonian_matrix,
    inner_product,
    normalized_state,
    transition_probability_exact,
    windowed_point_source,
    write_grid_csv,
)
from exact_kernels import free_kernel

SMALL = (-10.0, 10.0, 256)


def test_gridstate_validation():
    with pytest.raises(ValueError):
        GridState(0.0, 1.0, 100, np.ones(100))
    with pytest.raises(ValueError):
        GridState(0.0, 1.0, 32, np.ones(32))
    with pytest.raises(ValueError):
        GridState(0.0, 1.0, 64, np.ones(64) * 2)
    s = GridState(0.0, 1.0, 64, np.ones(64))
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_free_gaussian_spreading():
    s = gaussian_state(0.0, 0.0, 1.0)
    out = evolve_exact(s, SystemSpec("free_particle"), 2.0)
    _, width = out.expectation_q()
    assert width == pytest.approx(math.sqrt(1 + (2.0 / 2.0) ** 2), abs=1e-6)


def test_harmonic_revival():
    sys_ = SystemSpec("harmonic")
    s = coherent_state(sys_, 1.5, -0.5)
    out = evolve_exact(s, sys_, TWO_PI)
    assert abs(inner_product(s, out)) ** 2 > 1 - 1e-8


def test_second_order_in_dt():
    sys_ = SystemSpec("harmonic")
    s = coherent_state(sys_, 1.0, 0.5, grid=SMALL)
    ref = evolve_exact(s, sys_, 3.0, dt=3.0 / 4096).amplitudes
    errs = [np.linalg.norm(evolve_exact(s, sys_, 3.0, dt=3.0 / n).amplitudes - ref)
            for n in (64, 128)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_double_well_tunneling_period():
    sys_ = SystemSpec("double_well", hbar=0.3)
    grid = (-6.0, 6.0, 256)
    evals, evecs = np.linalg.eigh(hamiltonian_matrix(sys_, grid))
    gap = evals[1] - evals[0]
    period = TWO_PI * sys_.hbar / gap
    left = normalized_state(*grid, evecs[:, 0] + evecs[:, 1], hbar=sys_.hbar)
    if left.expectation_q()[0] > 0:
        left = normalized_state(*grid, evecs[:, 0] - evecs[:, 1], hbar=sys_.hbar)

    def fidelity(t):
        return abs(inner_product(left, evolve_exact(left, sys_, t, dt=0.02))) ** 2

    at_period = fidelity(period)
    assert fidelity(0.5 * period) < 1e-6
    assert at_period > 1 - 1e-6
    # the return is a sharp maximum: 1% off the predicted period already costs fidelity
    assert fidelity(0.99 * period) < at_period
    assert fidelity(1.01 * period) < at_period


def test_norm_drift_over_ten_thousand_steps():
    sys_ = SystemSpec("harmonic")
    s = coherent_state(sys_, 0.5, 0.0, grid=SMALL)
    out = evolve_exact(s, sys_, 10.0, dt=1e-3)
    assert abs(out.norm() - 1.0) < 1e-12


def test_grid_convergence():
    sys_ = SystemSpec("harmonic")
    probs = []
    for n in (1024, 2048):
        grid = (-12.0, 12.0, n)
        a = coherent_state(sys_, 1.0, 0.0, grid)
        b = gaussian_state(-0.5, 0.3, 0.8, grid=grid)
        probs.append(transition_probability_exact(a, b, sys_, 2.0, dt=1e-3))
    assert abs(probs[0] - probs[1]) < 1e-8


def test_boundary_leak():
    s = gaussian_state(0.0, 6.0, 0.5, grid=SMALL)
    with pytest.raises(BoundaryLeak):
        evolve_exact(s, SystemSpec("free_particle"), 2.0)


def test_transition_probability_exact_examples():
    sys_ = SystemSpec("harmonic")
    a = coherent_state(sys_, 1.0, 0.0)
    assert transition_probability_exact(a, a, sys_, 0.0) == pytest.approx(1.0, abs=1e-12)
    ev = evolve_exact(a, sys_, 1.3)
    assert transition_probability_exact(a, ev, sys_, 1.3) == pytest.approx(1.0, abs=1e-10)
    q = a.q
    odd = normalized_state(-12.0, 12.0, 1024, q * np.exp(-q**2))
    even = normalized_state(-12.0, 12.0, 1024, np.exp(-q**2))
    assert transition_probability_exact(even, odd, sys_, 0.0) < 1e-12
    with pytest.raises(GridMismatch):
        transition_probability_exact(a, gaussian_state(0, 0, 1, grid=SMALL), sys_, 1.0)
    with pytest.raises(GridMismatch):
        evolve_exact(a, SystemSpec("harmonic", hbar=0.5), 1.0)


def test_windowed_source_reproduces_free_kernel():
    hbar = 0.1
    grid = (-8.0, 8.0, 2048)
    src, scale = windowed_point_source(-1.0, (-4.0, 4.0), hbar, grid, edge_width=0.3)
    out = evolve_exact(src, SystemSpec("free_particle", hbar=hbar), 1.0, dt=1e-3)
    for q_f in (-1.5, 0.0, 0.8):
        k = out.value_at(q_f) * scale
        exact = free_kernel(-1.0, q_f, 1.0, hbar=hbar)
        assert abs(k - exact) / abs(exact) < 1e-2


def test_value_at_interpolates_samples():
    s = gaussian_state(0.3, 1.0, 0.7, grid=SMALL)
    for j in (50, 128, 200):
        assert s.value_at(float(s.q[j])) == pytest.approx(complex(s.amplitudes[j]), abs=1e-12)


# ------------------------------------------------------------------- kicked


def rotor(k, hbar=1.0):
    return SystemSpec("kicked_rotor", kick_strength=k, hbar=hbar)


def flat(hbar=1.0):
    return normalized_state(*KICKED_GRID, np.ones(KICKED_GRID[2]), hbar=hbar)


def test_kicked_identity_and_free_rotation():
    s = gaussian_state(3.0, 2.0, 0.4, grid=KICKED_GRID)
    assert evolve_kicked_exact(s, rotor(7.0), 0) is s
    out = evolve_kicked_exact(s, rotor(0.0), 13)
    _, w0 = s.momentum_distribution()
    _, w1 = out.momentum_distribution()
    assert np.max(np.abs(w0 - w1)) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 20.0), st.integers(1, 30))
def test_kicked_unitary(k, n):
    out = evolve_kicked_exact(flat(), rotor(k), n)
    assert abs(out.norm() - 1.0) < 1e-12


def test_dynamical_localization():
    sys_ = rotor(7.0)

    def variance(n):
        p, w = evolve_kicked_exact(flat(), sys_, n).momentum_distribution()
        return float(np.sum(w * p**2))

    v20, v100 = variance(20), variance(100)
    assert v20 > 10.0  # diffusive growth happened
    assert v100 < 10 * v20


def test_kicked_needs_periodic_grid():
    with pytest.raises(GridMismatch):
        evolve_kicked_exact(gaussian_state(0, 0, 1, grid=SMALL), rotor(1.0), 1)
    with pytest.raises(ValueError):
        evolve_exact(flat(), rotor(1.0), 1.0)


def test_grid_csv(tmp_path):
    s = gaussian_state(0.0, 0.0, 1.0, grid=(-5.0, 5.0, 64))
    path = tmp_path / "g.csv"
    write_grid_csv(s, path)
    lines = path.read_bytes().decode("utf-8").split("\n")
    assert lines[0] == "q,re_psi,im_psi,prob_density"
    assert len(lines) == 66 and lines[-1] == ""
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == -5.0 and row[3] == pytest.approx(row[1] ** 2 + row[2] ** 2)
