"""Finite shots, readout corruption, mitigation, and distribution distance."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pitvqe.sampling import (
    Counts,
    ReadoutModel,
    bhattacharyya,
    corrupt_counts,
    corrupt_distribution,
    counts_to_csv,
    distribution_to_csv,
    flip_model,
    identity_model,
    mitigate,
    sample,
)
from pitvqe.simulator import InitKind, apply_ry, init_state


def test_counts_histogram_consistency():
    Counts(shots=10, histogram={0: 4, 3: 6})
    with pytest.raises(ValueError):
        Counts(shots=10, histogram={0: 4})


def test_counts_to_distribution():
    dist = Counts(shots=8, histogram={0: 6, 2: 2}).to_distribution(2)
    assert dist == pytest.approx([0.75, 0.0, 0.25, 0.0])


def test_readout_model_validation():
    with pytest.raises(ValueError, match="2x2"):
        ReadoutModel((np.eye(3),))
    with pytest.raises(ValueError, match="sum to 1"):
        ReadoutModel((np.array([[0.9, 0.1], [0.2, 0.9]]),))
    with pytest.raises(ValueError, match="\\[0, 1\\]"):
        ReadoutModel((np.array([[1.5, 0.0], [-0.5, 1.0]]),))


def test_flip_model_matrix_layout():
    m = flip_model(1, p10=0.03, p01=0.015).matrices[0]
    # column = true bit, row = observed bit
    assert m[0, 1] == pytest.approx(0.03)
    assert m[1, 0] == pytest.approx(0.015)


def test_full_matrix_qubit0_least_significant():
    model = ReadoutModel((np.array([[0.9, 0.0], [0.1, 1.0]]), np.eye(2)))
    full = model.full_matrix()
    # a flip on qubit 0 mixes indices 0 and 1, not 0 and 2
    assert full[1, 0] == pytest.approx(0.1)
    assert full[2, 0] == pytest.approx(0.0)


def test_sample_deterministic_and_complete():
    state = apply_ry(init_state(2, InitKind.ALL_ZERO), 0, 1.1)
    c1, c2 = sample(state, 1000, seed=7), sample(state, 1000, seed=7)
    assert c1 == c2
    assert sum(c1.histogram.values()) == 1000
    with pytest.raises(ValueError):
        sample(state, 0, seed=7)


def test_superposition_frequencies_balanced():
    # 10^6 shots on |+>: both outcomes within 0.002 of one half (5 sigma)
    state = init_state(1, InitKind.SUPERPOSITION)
    counts = sample(state, 10**6, seed=3)
    for outcome in (0, 1):
        assert abs(counts.histogram[outcome] / 10**6 - 0.5) < 0.002


def test_corrupt_distribution_single_qubit_closed_form():
    model = flip_model(1, p10=0.2, p01=0.1)
    noisy = corrupt_distribution(np.array([1.0, 0.0]), model)
    assert noisy == pytest.approx([0.9, 0.1])
    noisy = corrupt_distribution(np.array([0.0, 1.0]), model)
    assert noisy == pytest.approx([0.2, 0.8])


def test_corrupt_counts_preserves_shots():
    counts = Counts(shots=500, histogram={0b11: 500})
    noisy = corrupt_counts(counts, flip_model(2, p10=0.5, p01=0.0), seed=1)
    assert sum(noisy.histogram.values()) == 500
    assert noisy != counts


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_corrupt_then_mitigate_is_identity(n, seed):
    rng = np.random.default_rng(seed)
    dist = rng.dirichlet(np.ones(1 << n))
    model = flip_model(n)
    recovered = mitigate(corrupt_distribution(dist, model), model)
    assert np.allclose(recovered, dist, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_mitigation_output_is_a_distribution(n, seed):
    rng = np.random.default_rng(seed)
    dist = rng.dirichlet(np.ones(1 << n))
    out = mitigate(dist, flip_model(n, p10=0.2, p01=0.1))
    assert np.all(out >= 0)
    assert out.sum() == pytest.approx(1.0)


def test_mitigate_rejects_singular_model():
    model = ReadoutModel((np.array([[0.5, 0.5], [0.5, 0.5]]),))
    with pytest.raises(FloatingPointError):
        mitigate(np.array([0.5, 0.5]), model)


def test_bhattacharyya_closed_forms():
    assert bhattacharyya(np.array([0.3, 0.7]), np.array([0.3, 0.7])) == 0.0
    d = bhattacharyya(np.array([1.0, 0.0]), np.array([0.5, 0.5]))
    assert d == pytest.approx(-np.log(np.sqrt(0.5)))
    assert bhattacharyya(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == np.inf
    with pytest.raises(ValueError):
        bhattacharyya(np.ones(2) / 2, np.ones(4) / 4)


def test_empirical_distance_shrinks_with_shots():
    state = apply_ry(init_state(3, InitKind.SUPERPOSITION), 1, 0.7)
    exact = state.amps**2
    medians = []
    for shots in (10**2, 10**4, 10**6):
        ds = [bhattacharyya(sample(state, shots, seed).to_distribution(3), exact)
              for seed in range(20)]
        medians.append(np.median(ds))
    assert medians[0] > medians[1] > medians[2]


def test_csv_formats():
    counts = Counts(shots=5, histogram={0b01: 3, 0b10: 2})
    assert counts_to_csv(counts, 2) == "bitstring,count\n10,3\n01,2\n"
    dist = np.array([0.25, 0.75])
    assert distribution_to_csv(dist, 1) == (
        "bitstring,probability\n0,0.25\n1,0.75\n"
    )
