import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cohertherm.errors import DegenerateDenominator, EmptyRegion, FitDiverged, NotAState
from cohertherm.fluctuation import (
    EntropyChange,
    RatioCurve,
    StructuredCoherenceModel,
    classical_ratio,
    entropy_change_between_regions,
    fit_structured_model,
    quantum_ratio,
    ratio_curve,
    structured_ratio,
    von_neumann_entropy,
)
from cohertherm.oracle import normalized_state
from cohertherm.purification import random_unitary
from cohertherm.semiclassics import PropagatorResult
from cohertherm.states import DensityMatrix


def channel(diag, cross):
    return PropagatorResult(0j, (), diag, cross)


def test_classical_examples():
    assert classical_ratio(0.0) == 1.0
    assert classical_ratio(1.0) == pytest.approx(2.718281828, abs=1e-9)
    assert classical_ratio(-2.0) == pytest.approx(0.135335, abs=1e-6)
    assert classical_ratio(3.0, k_B=3.0) == pytest.approx(math.e)
    with pytest.raises(ValueError):
        classical_ratio(1.0, k_B=0.0)


@given(st.floats(-50, 50))
def test_detailed_balance(ds):
    assert classical_ratio(ds) * classical_ratio(-ds) == pytest.approx(1.0, rel=1e-15)


def test_entropy_change_reverses():
    e = EntropyChange(0.7, "up", "down")
    r = e.reversed()
    assert r.delta_s == -0.7 and r.forward_label == "down"


@given(st.floats(-20, 20), st.floats(0.01, 1e3), st.floats(0.01, 1e3))
def test_quantum_ratio_reduces_to_classical(ds, d_f, d_b):
    assert quantum_ratio(channel(d_f, 0.0), channel(d_b, 0.0), ds) == classical_ratio(ds)


def test_quantum_ratio_examples():
    assert quantum_ratio(channel(1.0, 1.0), channel(1.0, 0.0), 0.0) == 2.0
    with pytest.raises(DegenerateDenominator):
        quantum_ratio(channel(1.0, 0.0), channel(1.0, -1.0), 0.0)
    with pytest.raises(ValueError):
        quantum_ratio(channel(0.0, 0.0), channel(1.0, 0.0), 0.0)


def test_structured_examples():
    m = StructuredCoherenceModel(2.0, -1.5, 0.5)
    assert structured_ratio(-1.5, m) == math.exp(-1.5) * 3.0
    off = StructuredCoherenceModel(0.0, -1.5, 0.5)
    for ds in (-3.0, 0.0, 2.2):
        assert structured_ratio(ds, off) == classical_ratio(ds)
    tail = -1.5 + 10 * 0.5
    assert structured_ratio(tail, m) == pytest.approx(classical_ratio(tail), rel=1e-10)


def test_model_validation():
    with pytest.raises(ValueError):
        StructuredCoherenceModel(-0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        StructuredCoherenceModel(1.0, 0.0, 0.0)


@given(st.floats(0, 10), st.floats(-5, 5), st.floats(0.05, 3), st.floats(-10, 10))
def test_structured_dominates_classical(c, mu, sig, ds):
    m = StructuredCoherenceModel(c, mu, sig)
    s, k = structured_ratio(ds, m), classical_ratio(ds)
    assert s >= k
    bump = math.exp(-0.5 * ((ds - mu) / sig) ** 2)
    if s == k:
        assert c * bump < 1e-15


def test_enhancement_curve_shape():
    m = StructuredCoherenceModel(2.0, -1.5, 0.5)
    curve = ratio_curve(np.linspace(-3, 3, 121), model=m)
    rel = curve.column("structured") / curve.column("classical")
    xs = curve.column("delta_s")
    assert rel[np.argmin(np.abs(xs + 1.5))] > 2.5
    assert rel[np.argmin(np.abs(xs - 2.0))] < 1.01
    assert xs[np.argmax(rel)] == pytest.approx(-1.5)


SYNTH = StructuredCoherenceModel(2.0, -1.0, 0.5)


def synth(noise=0.0, seed=0):
    xs = np.linspace(-3, 3, 50)
    ys = np.array([structured_ratio(x, SYNTH) for x in xs])
    if noise:
        ys = ys * (1 + noise * np.random.default_rng(seed).standard_normal(xs.size))
    return list(zip(xs, ys))


def test_fit_noiseless():
    m, res = fit_structured_model(synth())
    assert m.enhancement_strength == pytest.approx(2.0, abs=1e-6)
    assert m.target_delta_s == pytest.approx(-1.0, abs=1e-6)
    assert m.width == pytest.approx(0.5, abs=1e-6)
    assert res < 1e-20


def test_fit_classical_data():
    xs = np.linspace(-3, 3, 30)
    m, _ = fit_structured_model([(x, classical_ratio(x)) for x in xs])
    assert m.enhancement_strength < 1e-8


def test_fit_noisy():
    m, _ = fit_structured_model(synth(0.01, seed=12345))
    assert m.enhancement_strength == pytest.approx(2.0, rel=0.05)
    assert m.target_delta_s == pytest.approx(-1.0, rel=0.05)
    assert m.width == pytest.approx(0.5, rel=0.05)


def test_fit_preconditions(monkeypatch):
    with pytest.raises(ValueError):
        fit_structured_model(synth()[:7])
    bad = synth()
    bad[3] = (bad[3][0], -1.0)
    with pytest.raises(ValueError):
        fit_structured_model(bad)
    import cohertherm.fluctuation as fl
    monkeypatch.setattr(fl, "MAX_ITER", 1)
    with pytest.raises(FitDiverged):
        fit_structured_model(synth(0.01))


def test_entropy_change_counting():
    grid = normalized_state(0.0, 100.0, 128, np.ones(128))  # dq = 0.78125
    assert entropy_change_between_regions((0, 10), (20, 30), grid) == 0.0
    dq = grid.dq
    a = (0.0, 9 * dq)          # 10 points
    b = (50 * dq, 69 * dq)     # 20 points
    assert entropy_change_between_regions(a, b, grid) == pytest.approx(math.log(2))
    a = (0.0, 99 * dq)
    b = (0.0, 24 * dq)
    assert entropy_change_between_regions(a, b, grid, k_B=2.0) == pytest.approx(2 * math.log(0.25))
    with pytest.raises(EmptyRegion):
        entropy_change_between_regions((0.1, 0.2), b, grid)


def test_ratio_curve_csv(tmp_path):
    curve = ratio_curve([-1.0, 0.0, 1.0], quantum=[0.5, 1.0, 2.0])
    path = tmp_path / "r.csv"
    curve.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "delta_s,classical,quantum,structured"
    assert lines[2] == "0,1,1,"
    with pytest.raises(ValueError):
        RatioCurve(((0.0, 1.0, None, None), (0.0, 1.0, None, None)))
    with pytest.raises(ValueError):
        RatioCurve(((0.0, 1.0, -1.0, None),))


# ------------------------------------------------------------------ entropy


def test_entropy_examples():
    v = np.array([1, 1j, 0]) / math.sqrt(2)
    assert abs(von_neumann_entropy(DensityMatrix.pure(v))) < 1e-10
    assert von_neumann_entropy(DensityMatrix.maximally_mixed(2)) == pytest.approx(math.log(2))
    assert von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.562335, abs=1e-6)
    assert von_neumann_entropy(np.diag([0.5, 0.5]), k_B=2.0) == pytest.approx(2 * math.log(2))


def test_entropy_rejects_non_states():
    with pytest.raises(NotAState):
        von_neumann_entropy(np.diag([0.7, 0.7]))
    with pytest.raises(NotAState):
        von_neumann_entropy(np.diag([1.2, -0.2]))
    with pytest.raises(NotAState):
        von_neumann_entropy(np.array([[0.5, 0.1], [0.3, 0.5]]))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_entropy_unitary_invariance(d, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    assume(np.min(np.linalg.eigvalsh(rho)) > 0)
    u = random_unitary(d, rng).entries
    before = von_neumann_entropy(rho)
    after = von_neumann_entropy(u @ rho @ u.conj().T)
    assert after == pytest.approx(before, abs=1e-9)
