import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import trapezoid

from cohertherm.errors import (
    AsymmetricCouplings,
    CutoffTooSmall,
    DimensionMismatch,
    NotHermitian,
    PositivityLoss,
    StabilityViolation,
)
from cohertherm.opensystem import (
    CoherentSubspace,
    LindbladModel,
    PhononCoupling,
    ResonantCoupling,
    build_phonon_hamiltonian,
    build_resonant_hamiltonian,
    dephasing_operators,
    entropy_trace,
    evolve_lindblad,
    evolve_von_neumann,
    lowering_operator,
    project_coherent_subspace,
    write_snapshot_csv,
)
from cohertherm.purification import random_unitary
from cohertherm.states import DensityMatrix, von_neumann_entropy

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
SMINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |1><0|, basis (excited, ground)
PLUS = DensityMatrix.pure(np.array([1, 1]) / math.sqrt(2))


def random_state(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_hermitian(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def dephasing(gamma):
    return LindbladModel(np.zeros((2, 2)), (SZ,), (gamma,))


def damping(gamma):
    return LindbladModel(np.zeros((2, 2)), (SMINUS,), (gamma,))


def max_norm(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


# ------------------------------------------------------------- von Neumann


def test_stationary_state():
    rng = np.random.default_rng(1)
    h = random_hermitian(4, rng)
    evals, vecs = np.linalg.eigh(h)
    rho = DensityMatrix.trusted((vecs * [0.4, 0.3, 0.2, 0.1]) @ vecs.conj().T)
    assert max_norm(evolve_von_neumann(rho, h, 3.7), rho) < 1e-12


def test_larmor_precession():
    de = 0.8
    h = 0.5 * de * SZ
    period = 2 * math.pi / de
    for t in (0.3, 1.1, period):
        rho = evolve_von_neumann(PLUS, h, t).entries
        assert rho[0, 1] == pytest.approx(0.5 * np.exp(-1j * de * t), abs=1e-12)
    assert max_norm(evolve_von_neumann(PLUS, h, period), PLUS) < 1e-12


def test_von_neumann_preserves_entropy_and_purity():
    rng = np.random.default_rng(2)
    rho = random_state(6, rng)
    out = evolve_von_neumann(rho, random_hermitian(6, rng), 2.3)
    assert von_neumann_entropy(out) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)
    assert out.purity() == pytest.approx(rho.purity(), abs=1e-10)


def test_von_neumann_errors():
    with pytest.raises(DimensionMismatch):
        evolve_von_neumann(PLUS, np.eye(3), 1.0)
    with pytest.raises(NotHermitian):
        evolve_von_neumann(PLUS, np.array([[0, 1], [0, 0]]), 1.0)


# ---------------------------------------------------------------- Lindblad


def test_closed_limit_matches_von_neumann():
    rng = np.random.default_rng(3)
    h = random_hermitian(3, rng)
    rho = random_state(3, rng)
    model = LindbladModel(h, (np.eye(3),), (0.0,))
    for t, snap in evolve_lindblad(rho, model, 5.0, 0.005, snapshot_every=50):
        assert max_norm(snap, evolve_von_neumann(rho, h, t)) < 1e-8


def test_qubit_dephasing_closed_form():
    g = 0.3
    snaps = evolve_lindblad(PLUS, dephasing(g), 5.0, 0.01, snapshot_every=10)
    for t, rho in snaps:
        assert abs(rho.entries[0, 1]) == pytest.approx(0.5 * math.exp(-2 * g * t), abs=1e-6)
        assert max_norm(rho.populations(), [0.5, 0.5]) < 1e-8


def test_amplitude_damping_closed_form():
    g = 0.4
    excited = DensityMatrix.pure([1.0, 0.0])
    for t, rho in evolve_lindblad(excited, damping(g), 8.0, 0.01, snapshot_every=20):
        assert rho.populations()[0] == pytest.approx(math.exp(-g * t), abs=1e-6)


def test_rk4_order():
    rng = np.random.default_rng(4)
    h = random_hermitian(3, rng)
    ops = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),)
    model = LindbladModel(h, ops, (0.2,))
    rho = random_state(3, rng)
    t, dt = 2.0, 0.04

    def final(step):
        return evolve_lindblad(rho, model, t, step)[-1][1].entries

    ref = final(dt / 4)
    ratio = max_norm(final(dt), ref) / max_norm(final(dt / 2), ref)
    # against a quarter-step reference the ideal order-4 ratio is (1 - 1/256)/(1/16 - 1/256) = 17
    assert 12 <= ratio <= 20


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_hermiticity_positivity(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 5))
    h = random_hermitian(d, rng)
    ops = tuple(rng.standard_normal((d, d)) * 0.5 for _ in range(2))
    model = LindbladModel(h, ops, tuple(rng.uniform(0, 0.5, 2)))
    radius = float(np.max(np.abs(np.linalg.eigvalsh(h))))
    dt = 0.05 / max(radius, 0.5)
    for _, rho in evolve_lindblad(random_state(d, rng), model, 20.0, dt, snapshot_every=25):
        m = rho.entries
        assert abs(np.trace(m).real - 1) < 1e-9
        assert max_norm(m, m.conj().T) < 1e-10
        assert np.linalg.eigvalsh(m)[0] > -1e-6


def test_stability_guard_and_positivity_loss(monkeypatch):
    with pytest.raises(StabilityViolation):
        evolve_lindblad(PLUS, dephasing(2.0), 1.0, 0.1)
    with pytest.raises(StabilityViolation):
        evolve_lindblad(PLUS, LindbladModel(5 * SX, (), ()), 1.0, 0.05)
    # with the guard lifted, RK4 at rate*dt = 3 amplifies the excited population
    # (growth factor 1 - 3 + 9/2 - 9/2 + 27/8 > 1) and the ground population goes negative
    import cohertherm.opensystem as osys
    monkeypatch.setattr(osys, "STABILITY_LIMIT", 100.0)
    excited = DensityMatrix.pure([1.0, 0.0])
    with pytest.raises(PositivityLoss):
        evolve_lindblad(excited, damping(1.0), 30.0, 3.0)


def test_model_validation():
    with pytest.raises(NotHermitian):
        LindbladModel(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        LindbladModel(np.eye(2), (SZ,), (-1.0,))
    with pytest.raises(ValueError):
        LindbladModel(np.eye(2), (SZ,), ())
    with pytest.raises(DimensionMismatch):
        LindbladModel(np.eye(2), (np.eye(3),), (1.0,))


def test_snapshot_times_land_on_t():
    snaps = evolve_lindblad(PLUS, dephasing(0.1), 1.0, 0.03)
    assert snaps[0][0] == 0.0 and snaps[-1][0] == 1.0
    assert len(snaps) == 35


# ------------------------------------------------------------- projection


def test_projection_examples():
    rho = random_state(4, np.random.default_rng(5))
    out, w = project_coherent_subspace(rho, CoherentSubspace(np.eye(4)))
    assert max_norm(out, rho) < 1e-15 and w == pytest.approx(1.0)
    pure = DensityMatrix.pure([1, 0, 0, 0])
    out, w = project_coherent_subspace(pure, CoherentSubspace(np.diag([0, 1, 1, 0])))
    assert np.all(out == 0) and w == 0.0
    sub = CoherentSubspace.spanned_by([[1, 1j, 0, 1]])
    _, w = project_coherent_subspace(DensityMatrix.maximally_mixed(4), sub)
    assert w == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        project_coherent_subspace(PLUS, sub)
    with pytest.raises(ValueError):
        CoherentSubspace(np.diag([1.0, 0.5]))


# ------------------------------------------------------------ Hamiltonians


def test_resonant_examples():
    j = 0.7
    h = build_resonant_hamiltonian(ResonantCoupling(2, [[0, j], [j, 0]]))
    assert np.linalg.eigvalsh(h) == pytest.approx([-j, j], abs=1e-15)
    assert np.all(build_resonant_hamiltonian(ResonantCoupling(3, np.zeros((3, 3)))) == 0)
    ring = build_resonant_hamiltonian(ResonantCoupling(3, j * (np.ones((3, 3)) - np.eye(3))))
    assert np.linalg.eigvalsh(ring) == pytest.approx([-j, -j, 2 * j], abs=1e-12)
    with pytest.raises(AsymmetricCouplings):
        build_resonant_hamiltonian(ResonantCoupling(2, [[0, 1], [0.5, 0]]))
    with pytest.raises(AsymmetricCouplings):
        build_resonant_hamiltonian(ResonantCoupling(2, [[1, 1], [1, 0]]))


def test_phonon_examples():
    zero = build_phonon_hamiltonian(PhononCoupling(2, 1, (1.0,), np.zeros((2, 1))))
    assert np.all(zero == 0)
    h = build_phonon_hamiltonian(PhononCoupling(1, 1, (1.0,), [[1.0]], fock_cutoff=2))
    assert np.array_equal(h, np.array([[0, 1], [1, 0]], dtype=complex))
    c = PhononCoupling(2, 1, (1.0,), [[0.1], [-0.1]], fock_cutoff=4)
    h = build_phonon_hamiltonian(c)
    assert h.shape == (8, 8)
    assert max_norm(h, h.conj().T) < 1e-14
    assert np.all(h[:4, 4:] == 0) and np.all(h[4:, :4] == 0)
    x = lowering_operator(4) + lowering_operator(4).T
    assert max_norm(h[:4, :4], 0.1 * x) == 0 and max_norm(h[4:, 4:], -0.1 * x) == 0
    with pytest.raises(CutoffTooSmall):
        build_phonon_hamiltonian(PhononCoupling(1, 1, (1.0,), [[1.0]], fock_cutoff=1))


def test_phonon_free_term_and_two_modes():
    c = PhononCoupling(1, 2, (1.0, 2.0), [[0.0, 0.0]], fock_cutoff=3)
    h = build_phonon_hamiltonian(c, include_free=True)
    levels = sorted({round(n1 + 2 * n2, 12) for n1 in range(3) for n2 in range(3)})
    assert sorted(set(np.round(np.linalg.eigvalsh(h), 12))) == levels
    assert lowering_operator(3)[1, 2] == pytest.approx(math.sqrt(2))


# ----------------------------------------------------------------- entropy


def test_entropy_constant_under_unitary_evolution():
    rng = np.random.default_rng(6)
    rho = random_state(3, rng)
    model = LindbladModel(random_hermitian(3, rng))
    s = [e for _, e in entropy_trace(evolve_lindblad(rho, model, 5.0, 0.005, snapshot_every=100))]
    assert max(s) - min(s) < 1e-9


def test_dephasing_entropy_rises_to_ln2():
    g = 0.5
    snaps = evolve_lindblad(PLUS, dephasing(g), 10 / g, 0.01, snapshot_every=10)
    s = [e for _, e in entropy_trace(snaps)]
    assert all(b >= a - 1e-12 for a, b in zip(s, s[1:]))
    assert s[-1] == pytest.approx(math.log(2), abs=1e-4)


def test_damping_lowers_entropy_of_mixed_qubit():
    snaps = evolve_lindblad(DensityMatrix.maximally_mixed(2), damping(0.5), 10.0, 0.01,
                            snapshot_every=100)
    s = [e for _, e in entropy_trace(snaps)]
    assert s[0] == pytest.approx(math.log(2))
    assert s[-1] < math.log(2) - 0.1


def test_unitary_invariance_of_entropy():
    rng = np.random.default_rng(8)
    for d in range(1, 9):
        rho = random_state(d, rng)
        u = random_unitary(d, rng).entries
        assert von_neumann_entropy(u @ rho.entries @ u.conj().T) == pytest.approx(
            von_neumann_entropy(rho), abs=1e-9)


def target_population(j, gamma=0.5):
    h = build_resonant_hamiltonian(ResonantCoupling(2, [[0, j], [j, 0]], (1.0, 0.0)))
    model = LindbladModel(h, tuple(dephasing_operators(2)), (gamma, gamma))
    snaps = evolve_lindblad(DensityMatrix.pure([1.0, 0.0]), model, 10.0, 0.01)
    pops = np.array([rho.populations()[1] for _, rho in snaps])
    return float(trapezoid(pops, dx=0.01) / 10.0)


def test_structured_coupling_feeds_target_site():
    off, on = target_population(0.0), target_population(1.0)
    assert off == pytest.approx(0.0, abs=1e-15)
    assert on > off + 0.01


def test_snapshot_csv(tmp_path):
    snaps = evolve_lindblad(PLUS, dephasing(0.2), 0.1, 0.05)
    path = tmp_path / "s.csv"
    write_snapshot_csv(snaps, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "time,entropy,purity,pop_0,pop_1,abs_coh_max"
    first = [float(x) for x in lines[1].split(",")]
    assert first == pytest.approx([0.0, 0.0, 1.0, 0.5, 0.5, 0.5], abs=1e-15)
    assert len(lines) == 4
