import numpy as np
import pytest

from lstsim import dense_oracle as oracle
from lstsim.codes import LogicalStatePrep, lift_logical_multi, resolve_code, trivial_code
from lstsim.gf2_pauli import AffinePauliFactor, PauliOp


class TestPauliMatrix:
    def test_single_qubit_table(self):
        assert np.allclose(oracle.pauli_matrix(PauliOp.from_string("X")), [[0, 1], [1, 0]])
        assert np.allclose(oracle.pauli_matrix(PauliOp.from_string("Y")), [[0, -1j], [1j, 0]])
        assert np.allclose(oracle.pauli_matrix(PauliOp.from_string("-Z")), [[-1, 0], [0, 1]])

    def test_qubit_zero_is_least_significant(self):
        m = oracle.pauli_matrix(PauliOp.from_string("XI"))
        want = np.kron(np.eye(2), oracle.pauli_matrix(PauliOp.from_string("X")))
        assert np.allclose(m, want)

    def test_hermiticity_of_even_phases(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 5))
            p = PauliOp(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)), int(rng.integers(2)) * 2)
            m = oracle.pauli_matrix(p)
            assert np.allclose(m, m.conj().T)

    def test_size_cap(self):
        with pytest.raises(ValueError):
            oracle.pauli_matrix(PauliOp.identity(13))


class TestPauliApply:
    def test_matches_matrix_action(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 6))
            p = PauliOp(n, int(rng.integers(1 << n)), int(rng.integers(1 << n)), int(rng.integers(4)))
            v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
            assert np.allclose(oracle.pauli_apply(p, v), oracle.pauli_matrix(p) @ v, atol=1e-12)


class TestNoisyState:
    def test_p_zero_is_pure(self):
        code = resolve_code("nn5_513")
        state = oracle.exact_noisy_state([code], LogicalStatePrep.zero(1), 0.0)
        state.validate()
        rho = state.matrix
        assert abs(np.trace(rho @ rho).real - 1.0) < 1e-12

    def test_fully_depolarizing_point(self):
        # under E(rho) = (1-p) rho + (p/3) sum_P P rho P the channel is fully
        # mixing at p = 3/4, while p = 1 is an over-rotation to diag(1/3, 2/3)
        tc = trivial_code(1)
        mixed = oracle.exact_noisy_state([tc], LogicalStatePrep.zero(1), 0.75)
        assert np.allclose(mixed.matrix, np.eye(2) / 2, atol=1e-12)
        over = oracle.exact_noisy_state([tc], LogicalStatePrep.zero(1), 1.0)
        assert np.allclose(over.matrix, np.diag([1 / 3, 2 / 3]), atol=1e-12)

    def test_channel_properties_on_513(self):
        code = resolve_code("nn5_513")
        state = oracle.exact_noisy_state([code], LogicalStatePrep.zero(1), 0.1)
        state.validate()

    def test_channel_matches_kraus_sum(self, rng):
        # reshaping route equals the explicit Kraus sum on a random state
        n, p = 2, 0.3
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
        got = oracle.apply_depolarizing(rho, p)
        want = rho.copy()
        for q in range(n):
            acc = (1 - p) * want
            for letter in "XYZ":
                k = oracle.pauli_matrix(PauliOp.single(n, q, letter))
                acc += (p / 3) * k @ want @ k.conj().T
            want = acc
        assert np.allclose(got, want, atol=1e-12)

    def test_validate_rejects_bad_states(self):
        with pytest.raises(ValueError):
            oracle.DenseState(np.array([[1.0, 0.5], [0.0, 0.0]])).validate()
        with pytest.raises(ValueError):
            oracle.DenseState(np.diag([0.7, 0.7])).validate()


class TestExactLstValue:
    def test_trivial_code_reduces_to_plain_expectation(self, rng):
        tc = trivial_code(2)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        rho = np.outer(v, v.conj())
        obs = oracle.pauli_matrix(PauliOp.from_string("ZX"))
        want = np.trace(rho @ obs).real
        assert oracle.exact_lst_value(rho, [tc], obs, [1.0]) == pytest.approx(want)

    def test_noiseless_fidelity_is_exactly_one(self):
        code = resolve_code("nn5_513")
        rho = oracle.exact_noisy_state([code], LogicalStatePrep.zero(1), 0.0).matrix
        zbar = lift_logical_multi([code], PauliOp.from_string("Z"))
        obs = (np.eye(32) + oracle.pauli_matrix(zbar)) / 2
        assert oracle.exact_lst_value(rho, [code], obs, [1.0]) == 1.0

    def test_zero_denominator_raises(self):
        code = resolve_code("nn5_513")
        # a state fully outside the codespace: flip one qubit of the codeword by X
        rho0 = oracle.exact_noisy_state([code], LogicalStatePrep.zero(1), 0.0).matrix
        err = oracle.pauli_matrix(PauliOp.single(5, 0, "X"))
        rho = err @ rho0 @ err
        with pytest.raises(ZeroDivisionError):
            oracle.exact_lst_value(rho, [code], np.eye(32), [1.0])


class TestSmallPDefectPath:
    def test_agrees_with_generic_route(self):
        code = resolve_code("nn5_513")
        from lstsim.codes import prepare_logical_state

        t = prepare_logical_state([code], LogicalStatePrep.zero(1))
        psi = oracle.statevector_from_tableau(t, dtype=np.clongdouble)
        zbar = lift_logical_multi([code], PauliOp.from_string("Z"))
        obs = (np.eye(32) + oracle.pauli_matrix(zbar)) / 2
        for m, coeffs in ((1, [1.0]), (2, [0.0, 1.0])):
            rho = oracle.exact_noisy_state([code], LogicalStatePrep.zero(1), 0.05).matrix
            generic = 1.0 - oracle.exact_lst_value(rho, [code], obs, coeffs)
            defect = oracle.projected_infidelity_small_p([code], psi, 0.05, m)
            assert abs(generic - defect) < 1e-10 * max(1.0, abs(generic))

    def test_rejects_unsupported_power(self):
        code = resolve_code("nn5_513")
        with pytest.raises(ValueError):
            oracle.projected_infidelity_small_p([code], np.ones(32), 0.01, 3)


class TestTableauBridge:
    def test_statevector_requires_pure_state(self):
        from lstsim.tableau import Tableau

        with pytest.raises(ValueError):
            oracle.statevector_from_tableau(Tableau.maximally_mixed(2))

    def test_affine_product_dense_matches_engine(self):
        factors = [
            AffinePauliFactor(0.5, 0.5, PauliOp.from_string("ZZ")),
            AffinePauliFactor(0.5, 0.5, PauliOp.from_string("XX")),
        ]
        from lstsim.gf2_pauli import affine_product_trace

        dense = np.trace(oracle.affine_product_dense(factors)).real
        assert affine_product_trace(factors) == pytest.approx(dense)
