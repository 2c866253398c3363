"""Exact dense-matrix reference implementation for small registers.

Everything the bit-packed fast paths compute is recomputed here by direct
matrix arithmetic on 2^N x 2^N arrays (N <= 12): noisy encoded states, the
projected distilled traces, Born probabilities, and Clifford-channel averages.
All derived test values come from this module.

Basis convention: computational-basis index b has bit q equal to the outcome
of qubit q, matching the integer bit-strings used everywhere else.  A dtype
may be passed to run the small-noise expansions in extended precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2_pauli import AffinePauliFactor, PauliOp
from .tableau import Tableau

MAX_DENSE_QUBITS = 12

_PAULI_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_GATE_1Q = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "X": _PAULI_1Q["X"],
    "Y": _PAULI_1Q["Y"],
    "Z": _PAULI_1Q["Z"],
}


def _check_size(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense oracle capped at {MAX_DENSE_QUBITS} qubits, got {n}")


@dataclass
class DenseState:
    """A density matrix with its basic physicality checks."""

    matrix: np.ndarray

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.matrix.shape[0]))

    def validate(self, atol: float = 1e-10) -> None:
        rho = self.matrix
        if not np.allclose(rho, rho.conj().T, atol=atol):
            raise ValueError("state is not Hermitian")
        if abs(np.trace(rho) - 1.0) > atol:
            raise ValueError("state does not have unit trace")
        eigs = np.linalg.eigvalsh(rho.astype(complex))
        if eigs.min() < -atol:
            raise ValueError("state is not positive semidefinite")


def pauli_matrix(op: PauliOp, dtype=complex) -> np.ndarray:
    """Dense matrix of a signed Pauli operator (qubit 0 = least significant bit)."""
    _check_size(op.n_qubits)
    m = np.array([[1.0]], dtype=complex)
    for q in range(op.n_qubits):
        xb = (op.x_bits >> q) & 1
        zb = (op.z_bits >> q) & 1
        letter = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(xb, zb)]
        m = np.kron(_PAULI_1Q[letter], m)
    # the Y entry of the letter table already carries the i^(x.z) prefactor
    return ((1j) ** op.phase_exp * m).astype(dtype)


def tableau_to_dense(t: Tableau, dtype=complex) -> np.ndarray:
    """Density matrix prod_active (1 + S_i)/2 / 2^rank_deficit of a tableau."""
    _check_size(t.n)
    dim = 1 << t.n
    rho = np.eye(dim, dtype=dtype)
    for i in range(t.active):
        rho = (rho + rho @ pauli_matrix(t.stabilizer(i), dtype=dtype)) / 2.0
    return rho / (1 << t.rank_deficit)


def statevector_from_tableau(t: Tableau, dtype=complex) -> np.ndarray:
    """Statevector of a pure tableau, normalized with an arbitrary global phase."""
    if t.rank_deficit != 0:
        raise ValueError("tableau is not a pure state")
    rho = tableau_to_dense(t, dtype=dtype)
    col = int(np.argmax(np.abs(np.diag(rho))))
    vec = rho[:, col]
    return vec / np.sqrt(np.abs(vec[col]))


def affine_product_dense(factors: Sequence[AffinePauliFactor], dtype=complex) -> np.ndarray:
    """Dense prod_j (a_j 1 + b_j M_j); reference for the GF(2) trace engine."""
    n = factors[0].op.n_qubits
    _check_size(n)
    dim = 1 << n
    out = np.eye(dim, dtype=dtype)
    for f in factors:
        out = out @ (f.a * np.eye(dim, dtype=dtype) + f.b * pauli_matrix(f.op, dtype=dtype))
    return out


def _apply_1q_channel(rho: np.ndarray, kraus: Sequence[tuple[float, np.ndarray]],
                      qubit: int, n: int) -> np.ndarray:
    """Apply sum_k w_k K rho K^dag with single-qubit K on the given qubit."""
    dtype = rho.dtype
    t = rho.reshape([2] * (2 * n))
    # tensor axes: axis q is the ket index of qubit (n-1-q) under kron ordering;
    # axis for qubit `qubit` on the ket side:
    ket_ax = n - 1 - qubit
    bra_ax = 2 * n - 1 - qubit
    out = np.zeros_like(t)
    for w, k in kraus:
        kd = k.astype(dtype)
        tmp = np.tensordot(kd, t, axes=([1], [ket_ax]))
        tmp = np.moveaxis(tmp, 0, ket_ax)
        tmp = np.tensordot(kd.conj(), tmp, axes=([1], [bra_ax]))
        tmp = np.moveaxis(tmp, 0, bra_ax)
        out = out + w * tmp
    return out.reshape(rho.shape)


def apply_depolarizing(rho: np.ndarray, p: float, dtype=None) -> np.ndarray:
    """Independent single-qubit depolarizing channel on every qubit:
    rho -> (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z) per qubit."""
    n = int(np.log2(rho.shape[0]))
    _check_size(n)
    if dtype is not None:
        rho = rho.astype(dtype)
    kraus = [
        (1.0 - p, _PAULI_1Q["I"]),
        (p / 3.0, _PAULI_1Q["X"]),
        (p / 3.0, _PAULI_1Q["Y"]),
        (p / 3.0, _PAULI_1Q["Z"]),
    ]
    for q in range(n):
        rho = _apply_1q_channel(rho, kraus, q, n)
    return rho


def exact_noisy_state(codes, prep, p: float, dtype=complex) -> DenseState:
    """Depolarize the encoded pure state exactly.  codes: one [[n,1]] per sector."""
    from .codes import prepare_logical_state

    t = prepare_logical_state(codes, prep)
    _check_size(t.n)
    rho = tableau_to_dense(t, dtype=dtype)
    return DenseState(apply_depolarizing(rho, p, dtype=dtype))


def code_projector(codes, dtype=complex) -> np.ndarray:
    """Dense codespace projector prod_j (1 + S_j)/2 over all sector generators."""
    from .codes import embedded_generators

    gens = embedded_generators(codes)
    n = gens[0].n_qubits if gens else sum(c.n_physical for c in codes)
    _check_size(n)
    dim = 1 << n
    proj = np.eye(dim, dtype=dtype)
    for g in gens:
        proj = proj @ (np.eye(dim, dtype=dtype) + pauli_matrix(g, dtype=dtype)) / 2.0
    return proj


def lst_numerator_denominator(
    rho: np.ndarray, codes, observable, coefficients: Sequence[float], dtype=None
) -> tuple[float, float]:
    """Dense (Tr(Pi f(rho) Pi O), Tr(Pi f(rho) Pi)) with f(x) = sum_p c_p x^p."""
    if dtype is not None:
        rho = rho.astype(dtype)
    proj = code_projector(codes, dtype=rho.dtype)
    if isinstance(observable, PauliOp):
        obs = pauli_matrix(observable, dtype=rho.dtype)
    else:
        obs = np.asarray(observable, dtype=rho.dtype)
    f = np.zeros_like(rho)
    power = np.eye(rho.shape[0], dtype=rho.dtype)
    for c in coefficients:
        power = power @ rho
        if c != 0.0:
            f = f + c * power
    core = proj @ f @ proj
    num = np.trace(core @ obs)
    den = np.trace(core)
    return float(num.real), float(den.real)


def exact_lst_value(rho: np.ndarray, codes, observable, coefficients: Sequence[float],
                    dtype=None) -> float:
    """Dense Tr(Pi f(rho) Pi O) / Tr(Pi f(rho) Pi)."""
    num, den = lst_numerator_denominator(rho, codes, observable, coefficients, dtype=dtype)
    if den == 0.0:
        raise ZeroDivisionError("projected denominator is zero")
    return num / den


def born_probabilities(rho: np.ndarray) -> np.ndarray:
    """Computational-basis outcome distribution of a density matrix."""
    return np.real(np.diag(rho)).copy()


def pauli_apply(op: PauliOp, vec: np.ndarray) -> np.ndarray:
    """op @ vec without forming the matrix (signed permutation action)."""
    n = op.n_qubits
    dim = 1 << n
    idx = np.arange(dim)
    src = idx ^ op.x_bits
    # (X^x Z^z v)[j] = (-1)^{z.(j^x)} v[j^x]; overall i^{phase + x.z}
    signs = np.where(_parity_lookup(src & op.z_bits, n), -1.0, 1.0)
    phase = (1j) ** ((op.phase_exp + (op.x_bits & op.z_bits).bit_count()) & 3)
    return (phase * signs * vec[src]).astype(vec.dtype, copy=False)


def _parity_lookup(values: np.ndarray, n: int) -> np.ndarray:
    parity = np.zeros_like(values, dtype=bool)
    v = values.copy()
    for _ in range(n):
        parity ^= (v & 1).astype(bool)
        v >>= 1
    return parity


def projected_infidelity_small_p(codes, psi: np.ndarray, p: float, m: int,
                                 dtype=np.clongdouble) -> float:
    """Cancellation-free 1 - LST fidelity for f = rho^m, m in {1, 2}.

    Splits the depolarized state as rho = (1-p)^N psi psi^dag + sigma with
    sigma summed explicitly over the 4^N - 1 non-identity Pauli errors.  The
    fidelity defect reduces to Tr(Pi sigma^m Pi O_perp): the terms carrying
    the large noiseless component vanish identically, so tiny infidelities
    (down to ~1e-22 in extended precision) are computed at full relative
    accuracy instead of drowning in rounding noise.
    """
    if m not in (1, 2):
        raise ValueError("small-p defect path supports m = 1 and m = 2 only")
    n = sum(c.n_physical for c in codes)
    _check_size(n)
    psi = psi.astype(dtype)
    psi = psi / np.sqrt(np.vdot(psi, psi).real)
    dim = 1 << n
    sigma = np.zeros((dim, dim), dtype=dtype)
    real_t = np.zeros(1, dtype=dtype).real.dtype.type
    one_minus = real_t(1.0) - real_t(p)
    third = real_t(p) / real_t(3.0)
    for x, z in _nonidentity_error_bits(n):
        w = one_minus ** (n - _weight(x, z)) * third ** _weight(x, z)
        ev = pauli_apply(PauliOp(n, x, z, 0), psi)
        sigma += w * np.outer(ev, ev.conj())
    proj = code_projector(codes, dtype=dtype)
    o_perp = np.eye(dim, dtype=dtype) - np.outer(psi, psi.conj())
    w0 = real_t(one_minus ** n)
    if m == 1:
        core = proj @ sigma @ proj
        defect = np.trace(core @ o_perp).real
        denom = w0 + np.trace(core).real
    else:
        core = proj @ sigma @ sigma @ proj
        defect = np.trace(core @ o_perp).real
        s_psi = np.vdot(psi, sigma @ psi).real
        denom = w0 * w0 + 2.0 * w0 * s_psi + np.trace(core).real
    return float(defect / denom)


def _weight(x: int, z: int) -> int:
    return (x | z).bit_count()


def _nonidentity_error_bits(n: int):
    from itertools import product

    for x, z in product(range(1 << n), repeat=2):
        if x | z:
            yield x, z


def gate_unitary(name: str, qubits: Sequence[int], n: int, dtype=complex) -> np.ndarray:
    """Dense unitary of a named gate embedded in an n-qubit register."""
    _check_size(n)
    dim = 1 << n
    name = name.upper()
    u = np.zeros((dim, dim), dtype=dtype)
    if name in _GATE_1Q:
        (q,) = qubits
        g = _GATE_1Q[name]
        for b in range(dim):
            src = (b >> q) & 1
            for dst in range(2):
                amp = g[dst, src]
                if amp != 0:
                    u[(b & ~(1 << q)) | (dst << q), b] += amp
        return u
    a, b_ = qubits
    for b in range(dim):
        ba, bb = (b >> a) & 1, (b >> b_) & 1
        if name == "CX":
            u[b ^ ((1 << b_) if ba else 0), b] = 1
        elif name == "CZ":
            u[b, b] = -1 if (ba and bb) else 1
        elif name == "SWAP":
            nb = (b & ~((1 << a) | (1 << b_))) | (bb << a) | (ba << b_)
            u[nb, b] = 1
        else:
            raise ValueError(f"unknown gate {name!r}")
    return u


def circuit_unitary(circuit: Sequence[tuple[str, tuple[int, ...]]], n: int,
                    dtype=complex) -> np.ndarray:
    """Dense unitary of a gate list applied left-to-right."""
    u = np.eye(1 << n, dtype=dtype)
    for name, qubits in circuit:
        u = gate_unitary(name, qubits, n, dtype=dtype) @ u
    return u


def clifford_unitary(element, dtype=complex) -> np.ndarray:
    """Dense unitary (up to global phase) of a Clifford element via its circuit."""
    return circuit_unitary(element.to_circuit(), element.n, dtype=dtype)
