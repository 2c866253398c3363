import numpy as np
import pytest

from lstsim import dense_oracle as oracle
from lstsim.codes import (
    CodeParseError,
    InvalidCodeError,
    LogicalStatePrep,
    StabilizerCode,
    builtin_codes,
    lift_logical,
    lift_logical_multi,
    parse_code,
    prep_by_name,
    prepare_logical_state,
    random_code,
    resolve_code,
    trivial_code,
    verify_distance_at_least,
)
from lstsim.gf2_pauli import PauliOp, affine_product_trace, commutes, multiply



class TestLoading:
    def test_five_qubit_code(self):
        code = resolve_code("nn5_513")
        assert (code.n_physical, code.k_logical, code.distance) == (5, 1, 3)
        assert [g.to_string() for g in code.generators] == [
            "+XZZXI",
            "+IXZZX",
            "+XIXZZ",
            "+ZXIXZ",
        ]
        assert verify_distance_at_least(code, 3)
        assert not verify_distance_at_least(code, 4)

    def test_trivial_code_passes(self):
        text = "2 2\nX:\n+XI\n+IX\nZ:\n+ZI\n+IZ\n"
        code = parse_code(text)
        assert code.k_logical == 2 and not code.generators

    def test_anticommuting_generators_rejected(self):
        text = "3 1\n+XII\n+ZII\nX:\n+IXX\nZ:\n+IZZ\n"
        with pytest.raises(InvalidCodeError, match="anticommute"):
            parse_code(text)

    def test_dependent_generators_rejected(self):
        text = "3 1\n+ZZI\n+ZZI\nX:\n+XXX\nZ:\n+ZII\n"
        with pytest.raises(InvalidCodeError, match="dependent"):
            parse_code(text)

    def test_bad_pairing_rejected(self):
        text = "2 1 1\n+XX\nX:\n+XI\nZ:\n+ZI\n"
        with pytest.raises(InvalidCodeError):
            parse_code(text)

    def test_parse_errors(self):
        with pytest.raises(CodeParseError):
            parse_code("")
        with pytest.raises(CodeParseError):
            parse_code("5\n")
        with pytest.raises(CodeParseError):
            parse_code("2 1 1\n+XX\nZ:\n+ZZ\nX:\n+XI\n")  # sections swapped

    def test_text_round_trip(self):
        code = resolve_code("nn5_513")
        again = parse_code(code.to_text())
        assert again == code

    def test_builtin_inventory(self):
        names = set(builtin_codes())
        assert {"nn5_513", "nn7_steane", "nn11", "nn15", "nn17", "nn30", "nn60"} <= names

    def test_resolve_unknown(self):
        with pytest.raises(CodeParseError):
            resolve_code("no_such_code")


class TestProjectorFactors:
    def test_five_qubit_trace(self):
        code = resolve_code("nn5_513")
        factors = code.projector_factors()
        assert len(factors) == 4
        assert affine_product_trace(factors) == 2.0  # Tr Pi = 2^k

    def test_trivial_code_identity_projector(self):
        code = trivial_code(3)
        assert code.projector_factors() == []
        assert affine_product_trace([], n_qubits=3) == 8.0

    def test_toy_422_trace(self, toy422):
        assert affine_product_trace(toy422.projector_factors()) == 4.0

    def test_signed_generator_goes_into_b(self):
        text = "2 1 1\n-XX\nX:\n+XI\nZ:\n+ZZ\n"
        code = parse_code(text)
        (factor,) = code.projector_factors()
        assert factor.b == -0.5 and factor.op.phase_exp == 0


class TestLifting:
    def test_logical_z_on_513(self):
        code = resolve_code("nn5_513")
        assert lift_logical(code, PauliOp.from_string("Z")).to_string() == "+ZZZZZ"

    def test_identity_lifts_to_identity(self):
        code = resolve_code("nn5_513")
        lifted = lift_logical(code, PauliOp.identity(1))
        assert lifted == PauliOp.identity(5)

    def test_logical_y_is_i_x_z(self):
        code = resolve_code("nn5_513")
        ly = lift_logical(code, PauliOp.from_string("Y"))
        lx = lift_logical(code, PauliOp.from_string("X"))
        lz = lift_logical(code, PauliOp.from_string("Z"))
        prod = multiply(lx, lz)
        assert ly == prod.with_phase((prod.phase_exp + 1) & 3)
        assert ly.is_hermitian

    def test_lift_commutes_with_generators(self, toy422):
        for s in ("XI", "IZ", "YY", "ZX"):
            lifted = lift_logical(toy422, PauliOp.from_string(s))
            for g in toy422.generators:
                assert commutes(lifted, g) == 0

    def test_lift_is_multiplicative(self, toy422, rng):
        for _ in range(30):
            a = PauliOp(2, int(rng.integers(4)), int(rng.integers(4)), int(rng.integers(4)))
            b = PauliOp(2, int(rng.integers(4)), int(rng.integers(4)), int(rng.integers(4)))
            assert lift_logical(toy422, multiply(a, b)) == multiply(
                lift_logical(toy422, a), lift_logical(toy422, b)
            )

    def test_multi_sector_lift(self, toy21):
        lifted = lift_logical_multi([toy21, toy21], PauliOp.from_string("XZ"))
        assert lifted.n_qubits == 4
        assert commutes(lifted, PauliOp.from_string("XXII")) == 0
        assert commutes(lifted, PauliOp.from_string("IIXX")) == 0


class TestStatePrep:
    def test_zero_state_on_513(self):
        code = resolve_code("nn5_513")
        t = prepare_logical_state([code], LogicalStatePrep.zero(1))
        assert t.rank_deficit == 0
        for g in code.generators:
            assert t.expectation(g) == 1.0
        assert t.expectation(lift_logical(code, PauliOp.from_string("Z"))) == 1.0
        assert t.expectation(lift_logical(code, PauliOp.from_string("X"))) == 0.0

    def test_ghz_two_sectors(self):
        code = resolve_code("nn5_513")
        t = prepare_logical_state([code, code], LogicalStatePrep.ghz(2))
        xx = lift_logical_multi([code, code], PauliOp.from_string("XX"))
        zi = lift_logical_multi([code, code], PauliOp.from_string("ZI"))
        assert t.expectation(xx) == 1.0
        assert t.expectation(zi) == 0.0

    def test_ghz_three_sectors_dense_fidelity(self, toy21):
        codes = [toy21] * 3
        t = prepare_logical_state(codes, LogicalStatePrep.ghz(3))
        rho = oracle.tableau_to_dense(t)
        # densely constructed logical GHZ from the codewords
        zero = prepare_logical_state(codes, LogicalStatePrep.zero(3))
        v0 = oracle.statevector_from_tableau(zero)
        flip = lift_logical_multi(codes, PauliOp.from_string("XXX"))
        v1 = oracle.pauli_matrix(flip) @ v0
        ghz = (v0 + v1) / np.sqrt(2)
        fidelity = np.real(ghz.conj() @ rho @ ghz)
        assert abs(fidelity - 1.0) < 1e-10

    def test_shape_mismatch(self, toy21):
        with pytest.raises(ValueError):
            prepare_logical_state([toy21], LogicalStatePrep.ghz(2))
        with pytest.raises(ValueError):
            prepare_logical_state([trivial_code(2)], LogicalStatePrep.zero(1))

    def test_prep_by_name(self):
        assert prep_by_name("zero", 2).name == "zero"
        assert prep_by_name("ghz", 3).k == 3
        with pytest.raises(ValueError):
            prep_by_name("cat", 2)


class TestRandomCode:
    def test_deterministic_and_valid(self):
        a = random_code(8, seed=3)
        b = random_code(8, seed=3)
        assert a == b
        a.validate()
        assert verify_distance_at_least(a, 3)

    def test_different_seed_differs(self):
        assert random_code(8, seed=3) != random_code(8, seed=4)


def test_validate_names_offending_pair():
    code = StabilizerCode("bad", 3, 1, (PauliOp.from_string("XII"), PauliOp.from_string("ZII")),
                          (PauliOp.from_string("IXX"),), (PauliOp.from_string("IZZ"),))
    with pytest.raises(InvalidCodeError, match="generators 0 .* and 1 .* anticommute"):
        code.validate()
