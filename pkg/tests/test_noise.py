import numpy as np
import pytest

from lstsim import dense_oracle as oracle
from lstsim.codes import LogicalStatePrep, trivial_code
from lstsim.gf2_pauli import PauliOp
from lstsim.noise import NoiseSpec, sample_pauli_frame, shot_rng


def test_rate_bounds():
    NoiseSpec(0.0)
    NoiseSpec(1.0)
    with pytest.raises(ValueError):
        NoiseSpec(-0.1)
    with pytest.raises(ValueError):
        NoiseSpec(1.5)


def test_p_zero_always_identity(rng):
    spec = NoiseSpec(0.0)
    for _ in range(50):
        frame = sample_pauli_frame(spec, 6, rng)
        assert frame == PauliOp.identity(6)


def test_p_one_uniform_over_xyz():
    spec = NoiseSpec(1.0)
    counts = {"X": 0, "Y": 0, "Z": 0}
    trials = 10000
    rng = np.random.default_rng(0)
    for _ in range(trials):
        frame = sample_pauli_frame(spec, 1, rng)
        counts[frame.to_string()[1]] += 1
    sigma = np.sqrt(trials * (1 / 3) * (2 / 3))
    for letter in "XYZ":
        assert abs(counts[letter] - trials / 3) < 3 * sigma


def test_identity_probability_five_qubits():
    spec = NoiseSpec(0.1)
    trials = 100000
    rng = np.random.default_rng(1)
    hits = sum(
        1
        for _ in range(trials)
        if sample_pauli_frame(spec, 5, rng).weight == 0
    )
    p_id = 0.9**5
    sigma = np.sqrt(trials * p_id * (1 - p_id))
    assert abs(hits - trials * p_id) < 3 * sigma


def test_weight_distribution_is_binomial():
    spec = NoiseSpec(0.3)
    n, trials = 8, 20000
    rng = np.random.default_rng(2)
    weights = np.array([sample_pauli_frame(spec, n, rng).weight for _ in range(trials)])
    mean_want = n * 0.3
    var_want = n * 0.3 * 0.7
    assert abs(weights.mean() - mean_want) < 3 * np.sqrt(var_want / trials)
    assert abs(weights.var() - var_want) < 0.15 * var_want


def test_frame_average_reproduces_channel():
    # averaging dense conjugated states over sampled frames matches the exact channel
    n, trials, p = 2, 100000, 0.25
    code = trivial_code(1)
    prep = LogicalStatePrep.from_strings(["+X"], name="plus")
    rho0 = np.kron(np.array([[1, 0], [0, 0]]), np.array([[0.5, 0.5], [0.5, 0.5]])).astype(complex)
    want = oracle.apply_depolarizing(rho0, p)
    rng = np.random.default_rng(3)
    acc = np.zeros_like(rho0)
    spec = NoiseSpec(p)
    for _ in range(trials):
        f = oracle.pauli_matrix(sample_pauli_frame(spec, n, rng))
        acc += f @ rho0 @ f.conj().T
    mc = acc / trials
    assert np.abs(mc - want).max() < 5.0 / np.sqrt(trials)


def test_shot_rng_is_counter_split():
    a1 = shot_rng(42, 7).random(4)
    a2 = shot_rng(42, 7).random(4)
    b = shot_rng(42, 8).random(4)
    c = shot_rng(43, 7).random(4)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(a1, c)
