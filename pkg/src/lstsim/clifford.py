"""Uniformly sampled Clifford group elements stored by their conjugation action.

A CliffordElement on n qubits records the images of the generators X_j, Z_j
under P -> U P U† as 2n signed Pauli rows.  That is all the acquisition and
post-processing stages need: the action conjugates arbitrary Paulis in O(n)
row products, can be inverted, packs into 4n^2 + 2n bits for storage, and can
be synthesized into an {H, S, CX, CZ, SWAP, X, Z} circuit when a dense unitary
is wanted.

Uniform sampling uses the canonical transvection construction of the
symplectic group Sp(2n, 2): every integer below the group order maps to a
distinct symplectic matrix and back, so drawing a uniform index (plus 2n sign
bits) draws a uniform Clifford element modulo global phase.  Bit vectors of
length 2n interleave the qubit components as (x_0, z_0, x_1, z_1, ...).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .gf2_pauli import PauliOp, phase_product_exp


@lru_cache(maxsize=None)
def _pair_mask(n: int) -> int:
    """Bits at even positions 0, 2, ..., 2n-2."""
    m = 0
    for i in range(n):
        m |= 1 << (2 * i)
    return m


def _symp_inner(v: int, w: int, n: int) -> int:
    """Symplectic inner product with (x, z) pairs interleaved."""
    even = _pair_mask(n)
    return (((v & (w >> 1)) ^ ((v >> 1) & w)) & even).bit_count() & 1


def _transvect(k: int, v: int, n: int) -> int:
    """Transvection Z_k: v -> v + <k, v> k."""
    return v ^ k if _symp_inner(k, v, n) else v


def _find_transvection(x: int, y: int, n: int) -> tuple[int, int]:
    """Return (h1, h2) with Z_h1 Z_h2 x = y, for nonzero x, y."""
    if x == y:
        return 0, 0
    if _symp_inner(x, y, n):
        return x ^ y, 0
    z = 0
    for i in range(n):
        xx, xz = (x >> (2 * i)) & 1, (x >> (2 * i + 1)) & 1
        yx, yz = (y >> (2 * i)) & 1, (y >> (2 * i + 1)) & 1
        if (xx | xz) and (yx | yz):
            # a qubit where both are non-identity
            zx, zz = xx ^ yx, xz ^ yz
            if not (zx | zz):
                zz = 1
                if xx != xz:
                    zx = 1
            z = (zx << (2 * i)) | (zz << (2 * i + 1))
            return x ^ z, y ^ z
    for i in range(n):
        xx, xz = (x >> (2 * i)) & 1, (x >> (2 * i + 1)) & 1
        yx, yz = (y >> (2 * i)) & 1, (y >> (2 * i + 1)) & 1
        if (xx | xz) and not (yx | yz):
            if xx == xz:
                zz, zx = 1, 0
            else:
                zz, zx = xx, xz
            z |= (zx << (2 * i)) | (zz << (2 * i + 1))
            break
    for i in range(n):
        xx, xz = (x >> (2 * i)) & 1, (x >> (2 * i + 1)) & 1
        yx, yz = (y >> (2 * i)) & 1, (y >> (2 * i + 1)) & 1
        if (yx | yz) and not (xx | xz):
            if yx == yz:
                zz, zx = 1, 0
            else:
                zz, zx = yx, yz
            z |= (zx << (2 * i)) | (zz << (2 * i + 1))
            break
    return x ^ z, y ^ z


def symplectic_group_order(n: int) -> int:
    """|Sp(2n, 2)| = prod_j 2^(2j-1) (4^j - 1)."""
    order = 1
    for j in range(1, n + 1):
        order *= (1 << (2 * j - 1)) * ((1 << (2 * j)) - 1)
    return order


def clifford_group_order(n: int) -> int:
    """Number of Clifford elements modulo global phase: |Sp(2n,2)| * 4^n."""
    return symplectic_group_order(n) << (2 * n)


def symplectic_from_index(index: int, n: int) -> list[int]:
    """Canonical symplectic matrix for an index in [0, |Sp(2n,2)|).

    Row j is the image of basis vector j as an interleaved bit vector.
    """
    return _symplectic_from_index(index, n, _pair_mask(n))


def _symplectic_from_index(index: int, n: int, even: int) -> list[int]:
    nn = 2 * n
    s = (1 << nn) - 1
    f1 = (index % s) + 1
    index //= s
    t0, t1 = _find_transvection(1, f1, n)
    bits = index & ((1 << (nn - 1)) - 1)
    index >>= nn - 1
    eprime = (1 | (((bits >> 1) << 2))) & s
    h0 = _transvect(t0, _transvect(t1, eprime, n), n)
    f1star = 0 if bits & 1 else f1
    if n == 1:
        rows = [1, 2]
    else:
        rows = [1, 2] + [r << 2 for r in _symplectic_from_index(index, n - 1, even)]
    out = []
    for r in rows:
        if t0 and (((t0 & (r >> 1)) ^ ((t0 >> 1) & r)) & even).bit_count() & 1:
            r ^= t0
        if t1 and (((t1 & (r >> 1)) ^ ((t1 >> 1) & r)) & even).bit_count() & 1:
            r ^= t1
        if (((h0 & (r >> 1)) ^ ((h0 >> 1) & r)) & even).bit_count() & 1:
            r ^= h0
        if f1star and (((f1star & (r >> 1)) ^ ((f1star >> 1) & r)) & even).bit_count() & 1:
            r ^= f1star
        out.append(r)
    return out


def symplectic_index(rows: list[int], n: int) -> int:
    """Canonical index of a symplectic matrix; inverse of symplectic_from_index."""
    nn = 2 * n
    v, w = rows[0], rows[1]
    t0, t1 = _find_transvection(v, 1, n)
    tw = _transvect(t1, _transvect(t0, w, n), n)
    b = tw & 1
    h0 = (tw & ~3) | 1
    bb = b | ((tw >> 2) << 1)
    zv = v - 1
    cvw = bb * ((1 << nn) - 1) + zv
    if n == 1:
        return cvw
    sub = []
    for r in rows:
        r = _transvect(t1, _transvect(t0, r, n), n)
        r = _transvect(h0, r, n)
        if b == 0:
            r = _transvect(1, r, n)
        sub.append(r)
    gnew = [r >> 2 for r in sub[2:]]
    coset = (1 << (nn - 1)) * ((1 << nn) - 1)
    return symplectic_index(gnew, n - 1) * coset + cvw


def sample_uniform_clifford(n: int, rng) -> "CliffordElement":
    """Exactly uniform n-qubit Clifford element (modulo global phase)."""
    return CliffordElement.random(n, rng)


def random_index_below(rng, bound: int) -> int:
    """Uniform integer in [0, bound) from a numpy Generator, bigint-safe."""
    bits = bound.bit_length()
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if value < bound:
            return value


def _bits_matrix(rows: list[int], width: int) -> np.ndarray:
    """(len(rows), width) uint8 bit matrix from packed integer rows."""
    acc = 0
    for r, v in enumerate(rows):
        acc |= v << (r * width)
    total = width * len(rows)
    buf = acc.to_bytes((total + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8), bitorder="little", count=total)
    return bits.reshape(len(rows), width)


def _ints_from_bits(bits: np.ndarray) -> list[int]:
    """Packed integer per row of a uint8 bit matrix."""
    packed = np.packbits(np.ascontiguousarray(bits), axis=1, bitorder="little")
    return [int.from_bytes(packed[r].tobytes(), "little") for r in range(bits.shape[0])]


class CliffordElement:
    """An n-qubit Clifford element, represented by its conjugation table."""

    __slots__ = ("n", "row_x", "row_z", "signs")

    def __init__(self, n: int, row_x: list[int], row_z: list[int], signs: int):
        # row 2j holds the image of X_j, row 2j+1 the image of Z_j;
        # bit r of signs flips the sign of row r.
        self.n = n
        self.row_x = row_x
        self.row_z = row_z
        self.signs = signs

    # -- constructors ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "CliffordElement":
        row_x = []
        row_z = []
        for j in range(n):
            row_x += [1 << j, 0]
            row_z += [0, 1 << j]
        return cls(n, row_x, row_z, 0)

    @classmethod
    def from_index(cls, index: int, n: int) -> "CliffordElement":
        """Element with the given canonical index in [0, clifford_group_order(n))."""
        if not 0 <= index < clifford_group_order(n):
            raise ValueError("index out of range")
        signs = index & ((1 << (2 * n)) - 1)
        rows = symplectic_from_index(index >> (2 * n), n)
        bits = _bits_matrix(rows, 2 * n)
        return cls(n, _ints_from_bits(bits[:, 0::2]), _ints_from_bits(bits[:, 1::2]), signs)

    @classmethod
    def random(cls, n: int, rng) -> "CliffordElement":
        """Exactly uniform over the Clifford group modulo global phase."""
        return cls.from_index(random_index_below(rng, clifford_group_order(n)), n)

    def index(self) -> int:
        """Canonical index; inverse of from_index."""
        rows = _ints_from_bits(self._interleaved_bits())
        return (symplectic_index(rows, self.n) << (2 * self.n)) | self.signs

    # -- bit plumbing ----------------------------------------------------------

    def _interleaved_bits(self) -> np.ndarray:
        """(2n, 2n) uint8 matrix with columns (x_0, z_0, x_1, z_1, ...)."""
        n = self.n
        out = np.empty((2 * n, 2 * n), dtype=np.uint8)
        out[:, 0::2] = _bits_matrix(self.row_x, n)
        out[:, 1::2] = _bits_matrix(self.row_z, n)
        return out

    # -- conjugation -----------------------------------------------------------

    def image_x(self, j: int) -> PauliOp:
        r = 2 * j
        return PauliOp(self.n, self.row_x[r], self.row_z[r], 2 * ((self.signs >> r) & 1))

    def image_z(self, j: int) -> PauliOp:
        r = 2 * j + 1
        return PauliOp(self.n, self.row_x[r], self.row_z[r], 2 * ((self.signs >> r) & 1))

    def conjugate_bits(self, x: int, z: int) -> tuple[int, int, int]:
        """Image (x', z', phase) of the canonical sigma(x, z) under P -> U P U^dag."""
        px = pz = 0
        phase = (x & z).bit_count()  # i^(x.z) prefactor of the input
        m = x | z
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            if (x >> j) & 1:
                r = 2 * j
                phase += 2 * ((self.signs >> r) & 1) + phase_product_exp(px, pz, self.row_x[r], self.row_z[r])
                px ^= self.row_x[r]
                pz ^= self.row_z[r]
            if (z >> j) & 1:
                r = 2 * j + 1
                phase += 2 * ((self.signs >> r) & 1) + phase_product_exp(px, pz, self.row_x[r], self.row_z[r])
                px ^= self.row_x[r]
                pz ^= self.row_z[r]
        # the accumulated product phase is already relative to sigma(px, pz)
        return px, pz, phase & 3

    def conjugate(self, op: PauliOp) -> PauliOp:
        """U op U^dag with exact sign tracking."""
        if op.n_qubits != self.n:
            raise ValueError("operator size mismatch")
        px, pz, phase = self.conjugate_bits(op.x_bits, op.z_bits)
        return PauliOp(self.n, px, pz, (phase + op.phase_exp) & 3)

    def inverse(self) -> "CliffordElement":
        """Element implementing P -> U^dag P U."""
        n = self.n
        nn = 2 * n
        # symplectic inverse: Lambda G^T Lambda, with Lambda swapping each (x, z) pair
        bits = self._interleaved_bits().T
        perm = np.arange(nn) ^ 1
        bits = bits[perm][:, perm]
        inv = CliffordElement(n, _ints_from_bits(bits[:, 0::2]), _ints_from_bits(bits[:, 1::2]), 0)
        # fix signs so that U (U^dag P U) U^dag = P on every generator
        signs = 0
        for r in range(nn):
            px, pz, phase = self.conjugate_bits(inv.row_x[r], inv.row_z[r])
            basis_bit = 1 << (r // 2)
            assert (px, pz) == ((basis_bit, 0) if r % 2 == 0 else (0, basis_bit))
            if phase:
                signs |= 1 << r
        inv.signs = signs
        return inv

    # -- packing ----------------------------------------------------------------

    def pack(self) -> bytes:
        """Row-major packed symplectic bits; pairs with ``signs`` for storage."""
        nn = 2 * self.n
        flat = np.packbits(self._interleaved_bits().reshape(-1), bitorder="little")
        return flat.tobytes()[: (nn * nn + 7) // 8]

    @classmethod
    def unpack(cls, n: int, data: bytes, signs: int) -> "CliffordElement":
        nn = 2 * n
        bits = np.unpackbits(
            np.frombuffer(data, dtype=np.uint8), bitorder="little", count=nn * nn
        ).reshape(nn, nn)
        return cls(n, _ints_from_bits(bits[:, 0::2]), _ints_from_bits(bits[:, 1::2]), signs)

    # -- circuit synthesis -------------------------------------------------------

    def to_circuit(self) -> list[tuple[str, tuple[int, ...]]]:
        """Gate sequence implementing the element (up to global phase).

        Reduces a copy of the conjugation table to the identity with gate
        conjugations, then emits the inverse gates in reverse order.  Once the
        images of X_j and Z_j are exactly X_j and Z_j, commutation forces every
        later row off qubit j, so the sweep never revisits finished qubits.
        """
        from .tableau import apply_gate_to_rows

        n = self.n
        xs = list(self.row_x)
        zs = list(self.row_z)
        phases = [2 * ((self.signs >> r) & 1) for r in range(2 * n)]
        applied: list[tuple[str, tuple[int, ...]]] = []

        def do(gate: str, *qubits: int) -> None:
            apply_gate_to_rows(xs, zs, phases, gate, qubits)
            applied.append((gate, qubits))

        for j in range(n):
            rx, rz = 2 * j, 2 * j + 1
            # bring the X_j image to +X_j
            if not any((xs[rx] >> q) & 1 for q in range(j, n)):
                q = next(q for q in range(j, n) if (zs[rx] >> q) & 1)
                do("H", q)
            q = next(q for q in range(j, n) if (xs[rx] >> q) & 1)
            if q != j:
                do("SWAP", j, q)
            for q in range(j + 1, n):
                if (xs[rx] >> q) & 1:
                    do("CX", j, q)
            if (zs[rx] >> j) & 1:
                do("S", j)
            for q in range(j + 1, n):
                if (zs[rx] >> q) & 1:
                    do("CZ", j, q)
            # bring the Z_j image to +Z_j without disturbing X_j
            for q in range(j + 1, n):
                if (xs[rz] >> q) & 1:
                    if (zs[rz] >> q) & 1:
                        do("S", q)
                    do("H", q)
            for q in range(j + 1, n):
                if (zs[rz] >> q) & 1:
                    do("CX", q, j)
            if (xs[rz] >> j) & 1:
                # X -> X, Y -> Z rotation
                do("H", j)
                do("S", j)
                do("H", j)
            if phases[rx]:
                do("Z", j)
            if phases[rz]:
                do("X", j)
            assert xs[rx] == 1 << j and zs[rx] == 0 and phases[rx] == 0
            assert xs[rz] == 0 and zs[rz] == 1 << j and phases[rz] == 0

        circuit: list[tuple[str, tuple[int, ...]]] = []
        for gate, qubits in reversed(applied):
            if gate == "S":
                circuit += [("S", qubits)] * 3  # S inverse
            else:
                circuit.append((gate, qubits))
        return circuit
