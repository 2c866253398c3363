"""Signed Pauli algebra in binary symplectic form, plus the GF(2) trace engine.

Every N-qubit Pauli operator is encoded by two N-bit integers ``x_bits`` and
``z_bits`` (bit i = qubit i) together with a phase exponent e, and denotes

    value = i^e * sigma(x, z),      sigma(x, z) = i^(x.z) prod_i X_i^{x_i} Z_i^{z_i},

where ``x.z`` counts qubits carrying both an X and a Z component.  The
``i^(x.z)`` prefactor makes sigma(x, z) Hermitian by construction, so
operators with even phase exponent are Hermitian (+/-) and odd exponents mark
+i/-i multiples.  Multiplication tracks the exponent exactly mod 4.

Bit masks are stored in plain Python integers: they are machine-word packed,
and XOR / AND / ``int.bit_count`` are the only inner-loop primitives.

The trace engine evaluates Tr(prod_j (a_j 1 + b_j M_j)) by finding the GF(2)
null space of the binary matrix whose columns encode the M_j, then summing
2^N * z(x) * prod_j a_j^(1-x_j) b_j^(x_j) over the null vectors x, where
prod_j M_j^{x_j} = z(x) * 1 defines the sign z(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

DEFAULT_NULL_SPACE_CAP = 1 << 20

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {bits: letter for letter, bits in _LETTER_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


class NullSpaceTooLargeError(RuntimeError):
    """Null space of the factor matrix exceeds the enumeration cap."""


class ImaginaryPhaseError(ValueError):
    """A null vector produced a non-real phase z(x); the factor list is malformed."""


@dataclass(frozen=True)
class PauliOp:
    """A signed Pauli string on ``n_qubits`` qubits with phase exponent mod 4."""

    n_qubits: int
    x_bits: int
    z_bits: int
    phase_exp: int = 0

    def __post_init__(self) -> None:
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be non-negative")
        mask = (1 << self.n_qubits) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("bit vector exceeds qubit count")
        if not 0 <= self.phase_exp <= 3:
            object.__setattr__(self, "phase_exp", self.phase_exp & 3)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliOp":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def single(cls, n_qubits: int, qubit: int, letter: str) -> "PauliOp":
        """Single-qubit Pauli ``letter`` on ``qubit``, identity elsewhere."""
        x, z = _LETTER_BITS[letter]
        return cls(n_qubits, x << qubit, z << qubit, 0)

    @classmethod
    def from_string(cls, text: str) -> "PauliOp":
        """Parse e.g. ``"-iXIZ"``; leftmost letter is qubit 0."""
        s = text.strip().replace("−", "-")
        phase = 0
        for token, exp in (("+i", 1), ("-i", 3), ("+", 0), ("-", 2)):
            if s.startswith(token):
                phase = exp
                s = s[len(token):]
                break
        if not s or any(c not in _LETTER_BITS for c in s):
            raise ValueError(f"invalid Pauli string: {text!r}")
        x = z = 0
        for q, letter in enumerate(s):
            xb, zb = _LETTER_BITS[letter]
            x |= xb << q
            z |= zb << q
        return cls(len(s), x, z, phase)

    def to_string(self) -> str:
        letters = "".join(
            _BITS_LETTER[(self.x_bits >> q) & 1, (self.z_bits >> q) & 1]
            for q in range(self.n_qubits)
        )
        return _PHASE_PREFIX[self.phase_exp] + letters

    def __str__(self) -> str:
        return self.to_string()

    @property
    def weight(self) -> int:
        """Number of qubits acted on non-trivially."""
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian operators."""
        if not self.is_hermitian:
            raise ValueError("operator is not Hermitian")
        return 1 if self.phase_exp == 0 else -1

    def is_identity_bits(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def embed(self, n_total: int, offset: int) -> "PauliOp":
        """Embed into a larger register, acting on qubits [offset, offset+n)."""
        if offset < 0 or offset + self.n_qubits > n_total:
            raise ValueError("embedding window out of range")
        return PauliOp(
            n_total, self.x_bits << offset, self.z_bits << offset, self.phase_exp
        )

    def with_phase(self, phase_exp: int) -> "PauliOp":
        return PauliOp(self.n_qubits, self.x_bits, self.z_bits, phase_exp & 3)

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        return multiply(self, other)

    def commutes_with(self, other: "PauliOp") -> bool:
        return commutes(self, other) == 0


def phase_product_exp(x1: int, z1: int, x2: int, z2: int) -> int:
    """Mod-4 exponent p with sigma(x1,z1) sigma(x2,z2) = i^p sigma(x1^x2, z1^z2).

    Word-parallel form of the per-qubit sum of
    z_i x'_i - x_i z'_i + 2(z_i+z'_i)floor((x_i+x'_i)/2) + 2(x_i+x'_i)floor((z_i+z'_i)/2).
    """
    t = (z1 & x2).bit_count() - (x1 & z2).bit_count()
    t += (x1 & x2 & (z1 ^ z2)).bit_count() << 1
    t += (z1 & z2 & (x1 ^ x2)).bit_count() << 1
    return t & 3


def multiply(p: PauliOp, q: PauliOp) -> PauliOp:
    """Exact signed product p*q."""
    if p.n_qubits != q.n_qubits:
        raise ValueError("qubit count mismatch")
    phase = (p.phase_exp + q.phase_exp + phase_product_exp(p.x_bits, p.z_bits, q.x_bits, q.z_bits)) & 3
    return PauliOp(p.n_qubits, p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits, phase)


def commutes(p: PauliOp, q: PauliOp) -> int:
    """Anticommutation indicator: 0 iff pq = qp, else 1."""
    if p.n_qubits != q.n_qubits:
        raise ValueError("qubit count mismatch")
    return ((p.z_bits & q.x_bits) ^ (p.x_bits & q.z_bits)).bit_count() & 1


@dataclass(frozen=True)
class AffinePauliFactor:
    """One factor a*1 + b*op of an affine Pauli product."""

    a: float
    b: float
    op: PauliOp


@dataclass(frozen=True)
class Gf2Matrix:
    """Dense GF(2) matrix; each row is packed into one integer (bit j = column j)."""

    n_rows: int
    n_cols: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n_rows:
            raise ValueError("row count mismatch")
        mask = (1 << self.n_cols) - 1
        if any(r & ~mask for r in self.rows):
            raise ValueError("row exceeds column count")

    @classmethod
    def from_pauli_columns(cls, ops: Sequence[PauliOp]) -> "Gf2Matrix":
        """2n x l matrix whose column j is the (x, z) encoding of ops[j]."""
        if not ops:
            raise ValueError("empty operator list")
        n = ops[0].n_qubits
        if any(op.n_qubits != n for op in ops):
            raise ValueError("qubit count mismatch")
        rows = []
        for i in range(n):
            rows.append(sum(((op.x_bits >> i) & 1) << j for j, op in enumerate(ops)))
        for i in range(n):
            rows.append(sum(((op.z_bits >> i) & 1) << j for j, op in enumerate(ops)))
        return cls(2 * n, len(ops), tuple(rows))

    def rank(self) -> int:
        return gf2_rank(list(self.rows), self.n_cols)

    def null_space_basis(self) -> list[int]:
        return gf2_null_space(list(self.rows), self.n_cols)


def gf2_rank(rows: Iterable[int], n_cols: int) -> int:
    """Rank over GF(2); first nonzero pivot by column order."""
    work = list(rows)
    rank = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rank, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and (work[r] >> col) & 1:
                work[r] ^= work[rank]
        rank += 1
        if rank == len(work):
            break
    return rank


def gf2_null_space(rows: Iterable[int], n_cols: int) -> list[int]:
    """Basis of {x : A x = 0 mod 2} for the matrix with the given packed rows.

    Returned basis vectors are integers with bit j = component j.  Pivots are
    chosen as the first nonzero entry in column order, which makes the output
    deterministic.
    """
    work = list(rows)
    pivot_cols: list[int] = []
    rank = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rank, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(len(work)):
            if r != rank and (work[r] >> col) & 1:
                work[r] ^= work[rank]
        pivot_cols.append(col)
        rank += 1
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vec = 1 << free
        for i, col in enumerate(pivot_cols):
            if (work[i] >> free) & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis


def null_space(ops: Sequence[PauliOp]) -> list[int]:
    """GF(2) basis of subsets of ``ops`` whose product is proportional to identity.

    Each basis vector is an integer with bit j set iff ops[j] enters the subset.
    """
    return Gf2Matrix.from_pauli_columns(ops).null_space_basis()


def _ordered_product_phase(ops_x: Sequence[int], ops_z: Sequence[int],
                           ops_phase: Sequence[int], subset: int) -> tuple[int, int, int]:
    """(x, z, phase) of prod_j ops[j]^{subset_j} taken in ascending j order."""
    x = z = phase = 0
    m = subset
    while m:
        j = (m & -m).bit_length() - 1
        m &= m - 1
        phase += ops_phase[j] + phase_product_exp(x, z, ops_x[j], ops_z[j])
        x ^= ops_x[j]
        z ^= ops_z[j]
    return x, z, phase & 3


def affine_product_trace(
    factors: Sequence[AffinePauliFactor],
    null_space_cap: int = DEFAULT_NULL_SPACE_CAP,
    n_qubits: int | None = None,
    drop_imaginary: bool = False,
) -> float:
    """Tr(prod_j (a_j 1 + b_j M_j)), exact up to floating-point rounding.

    Enumerates the full null space spanned by the GF(2) basis; raises
    NullSpaceTooLargeError when the enumeration would exceed ``null_space_cap``
    vectors.  A surviving product with phase +/-i raises ImaginaryPhaseError:
    a single commuting shadow group times a projector group times a commuting
    observable can never produce one, so for those chains the trace is real
    and exact.  Products of two or more mutually non-commuting shadow groups
    legitimately acquire imaginary parts whose expectation vanishes; pass
    ``drop_imaginary=True`` to return the real part of the trace instead.
    ``n_qubits`` is only required for an empty factor list.
    """
    if not factors:
        if n_qubits is None:
            raise ValueError("n_qubits required for an empty factor list")
        return float(1 << n_qubits)
    n = factors[0].op.n_qubits
    if n_qubits is not None and n_qubits != n:
        raise ValueError("n_qubits disagrees with factor operators")
    if any(f.op.n_qubits != n for f in factors):
        raise ValueError("qubit count mismatch")

    ops_x = [f.op.x_bits for f in factors]
    ops_z = [f.op.z_bits for f in factors]
    ops_phase = [f.op.phase_exp for f in factors]
    a = [f.a for f in factors]
    b = [f.b for f in factors]
    l = len(factors)

    basis = gf2_null_space(_pauli_matrix_rows(ops_x, ops_z, n, l), l)
    dim = len(basis)
    if dim.bit_length() > 0 and (1 << dim) > null_space_cap:
        raise NullSpaceTooLargeError(
            f"null space has 2^{dim} vectors, cap is {null_space_cap}"
        )

    total = 0.0
    for mask in range(1 << dim):
        subset = 0
        m = mask
        while m:
            t = (m & -m).bit_length() - 1
            m &= m - 1
            subset ^= basis[t]
        coeff = 1.0
        for j in range(l):
            coeff *= b[j] if (subset >> j) & 1 else a[j]
            if coeff == 0.0:
                break
        if coeff == 0.0:
            continue
        _, _, phase = _ordered_product_phase(ops_x, ops_z, ops_phase, subset)
        if phase == 0:
            total += coeff
        elif phase == 2:
            total -= coeff
        elif not drop_imaginary:
            raise ImaginaryPhaseError(
                f"subset {subset:#x} multiplies to i^{phase} * identity"
            )
    return float(1 << n) * total


def _pauli_matrix_rows(ops_x: Sequence[int], ops_z: Sequence[int], n: int, l: int) -> list[int]:
    rows = []
    for i in range(n):
        rows.append(sum(((ops_x[j] >> i) & 1) << j for j in range(l)))
    for i in range(n):
        rows.append(sum(((ops_z[j] >> i) & 1) << j for j in range(l)))
    return rows
