import numpy as np
import pytest

from lstsim import dense_oracle as oracle
from lstsim.clifford import (
    CliffordElement,
    clifford_group_order,
    random_index_below,
    symplectic_from_index,
    symplectic_group_order,
    symplectic_index,
    _symp_inner,
)
from lstsim.gf2_pauli import PauliOp, commutes, multiply
from lstsim.tableau import Tableau


def random_pauli(n, rng, phase=True):
    return PauliOp(
        n,
        int(rng.integers(0, 1 << n)),
        int(rng.integers(0, 1 << n)),
        int(rng.integers(0, 4)) if phase else 0,
    )


class TestSymplecticIndexing:
    def test_group_orders(self):
        assert symplectic_group_order(1) == 6
        assert symplectic_group_order(2) == 720
        assert clifford_group_order(1) == 24
        assert clifford_group_order(2) == 11520

    @pytest.mark.parametrize("n", [1, 2])
    def test_bijection_and_symplectic_property(self, n):
        seen = set()
        for i in range(symplectic_group_order(n)):
            rows = symplectic_from_index(i, n)
            key = tuple(rows)
            assert key not in seen
            seen.add(key)
            for a in range(2 * n):
                for b in range(a + 1, 2 * n):
                    want = 1 if a // 2 == b // 2 else 0
                    assert _symp_inner(rows[a], rows[b], n) == want
            assert symplectic_index(rows, n) == i

    def test_index_round_trip_large_n(self, rng):
        for n in (3, 5, 11):
            for _ in range(10):
                el = CliffordElement.random(n, rng)
                idx = el.index()
                again = CliffordElement.from_index(idx, n)
                assert again.row_x == el.row_x
                assert again.row_z == el.row_z
                assert again.signs == el.signs


class TestSampling:
    def test_n1_uniform_over_24_elements(self):
        from scipy.stats import chisquare

        rng = np.random.default_rng(5)
        counts = np.zeros(24)
        draws = 100000
        for _ in range(draws):
            counts[CliffordElement.random(1, rng).index()] += 1
        _, pvalue = chisquare(counts)
        assert pvalue > 0.01

    def test_random_index_below_bigint(self, rng):
        bound = 12345678901234567890123456789
        vals = [random_index_below(rng, bound) for _ in range(50)]
        assert all(0 <= v < bound for v in vals)
        assert len(set(vals)) > 1


class TestConjugation:
    def test_inverse_undoes(self, rng):
        for n in (1, 2, 4, 9):
            for _ in range(10):
                el = CliffordElement.random(n, rng)
                inv = el.inverse()
                p = random_pauli(n, rng)
                assert inv.conjugate(el.conjugate(p)) == p

    def test_preserves_products_and_commutation(self, rng):
        for _ in range(40):
            n = int(rng.integers(1, 6))
            el = CliffordElement.random(n, rng)
            p, q = random_pauli(n, rng), random_pauli(n, rng)
            assert el.conjugate(multiply(p, q)) == multiply(el.conjugate(p), el.conjugate(q))
            assert commutes(p, q) == commutes(el.conjugate(p), el.conjugate(q))

    @pytest.mark.parametrize("n", [1, 2])
    def test_matches_dense_unitary(self, n, rng):
        for _ in range(25):
            el = CliffordElement.random(n, rng)
            u = oracle.clifford_unitary(el)
            assert np.allclose(u @ u.conj().T, np.eye(1 << n), atol=1e-12)
            p = random_pauli(n, rng)
            want = u @ oracle.pauli_matrix(p) @ u.conj().T
            assert np.allclose(want, oracle.pauli_matrix(el.conjugate(p)), atol=1e-10)

    def test_identity_element(self):
        el = CliffordElement.identity(3)
        p = PauliOp.from_string("-iXYZ")
        assert el.conjugate(p) == p


class TestCircuitSynthesis:
    def test_circuit_reproduces_action_on_tableau(self, rng):
        for n in (1, 2, 3, 5):
            for _ in range(10):
                el = CliffordElement.random(n, rng)
                t1 = Tableau.zero(n)
                t1.apply_clifford(el)
                t2 = Tableau.zero(n)
                for gate, qs in el.to_circuit():
                    t2.apply_gate(gate, *qs)
                assert (t1.xs, t1.zs, t1.phases) == (t2.xs, t2.zs, t2.phases)

    def test_gate_names_are_supported(self, rng):
        el = CliffordElement.random(4, rng)
        allowed = {"H", "S", "CX", "CZ", "SWAP", "X", "Z"}
        assert {gate for gate, _ in el.to_circuit()} <= allowed


class TestPacking:
    def test_pack_unpack_round_trip(self, rng):
        for n in (1, 3, 8, 17):
            el = CliffordElement.random(n, rng)
            again = CliffordElement.unpack(n, el.pack(), el.signs)
            assert again.row_x == el.row_x and again.row_z == el.row_z
            assert len(el.pack()) == (4 * n * n + 7) // 8
