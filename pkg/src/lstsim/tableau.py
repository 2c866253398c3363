"""Stabilizer-state simulator on a stabilizer/destabilizer tableau.

A tableau on N qubits keeps 2N signed Pauli rows: rows 0..N-1 are stabilizer
candidates, rows N..2N-1 their destabilizer partners, with the usual pairing
(stabilizers commute among themselves, destabilizers likewise, and stabilizer
i anticommutes with destabilizer j exactly when i == j).  Only the first
``active`` stabilizer rows constrain the state; the remaining rows are basis
completion.  The represented density matrix is

    rho = prod_{i < active} (1 + S_i) / 2   /   2^rank_deficit,

so ``rank_deficit = N - active`` is the log-2 rank (0 for pure states, N for
the maximally mixed state).

Projection by a commuting set of signed generators follows the three-way case
split: a generator anticommuting with an active stabilizer halves the trace
and replaces that stabilizer; a generator independent of the active group
halves the trace and is promoted into it (the rank drops); a generator already
in the group leaves the trace alone when its sign is compatible and kills it
otherwise.  Rows are fixed up with rowsum-style multiplications against the
pivot so the pairing invariants survive every update.
"""

from __future__ import annotations

from .gf2_pauli import PauliOp, commutes, phase_product_exp

_ONE_QUBIT_GATES = {"H", "S", "X", "Y", "Z"}
_TWO_QUBIT_GATES = {"CX", "CZ", "SWAP"}


class IncompatibleGeneratorsError(ValueError):
    """Projection generators do not pairwise commute."""


def apply_gate_to_rows(xs: list[int], zs: list[int], phases: list[int],
                       gate: str, qubits: tuple[int, ...]) -> None:
    """Replace each signed Pauli row (xs[r], zs[r], phases[r]) by its conjugate
    under the named Clifford gate.  Shared by the tableau and circuit synthesis."""
    nrows = len(xs)
    if gate in _ONE_QUBIT_GATES:
        if len(qubits) != 1:
            raise ValueError(f"{gate} takes one qubit")
        (q,) = qubits
        bit = 1 << q
        if gate == "H":
            for r in range(nrows):
                xb, zb = xs[r] & bit, zs[r] & bit
                if xb and zb:
                    phases[r] ^= 2
                if bool(xb) != bool(zb):
                    xs[r] ^= bit
                    zs[r] ^= bit
        elif gate == "S":
            for r in range(nrows):
                if xs[r] & bit:
                    if zs[r] & bit:
                        phases[r] ^= 2
                    zs[r] ^= bit
        elif gate == "X":
            for r in range(nrows):
                if zs[r] & bit:
                    phases[r] ^= 2
        elif gate == "Z":
            for r in range(nrows):
                if xs[r] & bit:
                    phases[r] ^= 2
        else:  # Y
            for r in range(nrows):
                if bool(xs[r] & bit) != bool(zs[r] & bit):
                    phases[r] ^= 2
        return
    if gate not in _TWO_QUBIT_GATES:
        raise ValueError(f"unknown gate {gate!r}")
    if len(qubits) != 2 or qubits[0] == qubits[1]:
        raise ValueError(f"{gate} takes two distinct qubits")
    a, b = qubits
    abit, bbit = 1 << a, 1 << b
    if gate == "CX":
        for r in range(nrows):
            xc, zc = xs[r] & abit, zs[r] & abit
            xt, zt = xs[r] & bbit, zs[r] & bbit
            if xc and zt and (bool(xt) == bool(zc)):
                phases[r] ^= 2
            if xc:
                xs[r] ^= bbit
            if zt:
                zs[r] ^= abit
    elif gate == "CZ":
        for r in range(nrows):
            xa, xb = xs[r] & abit, xs[r] & bbit
            if xa and xb and (bool(zs[r] & abit) != bool(zs[r] & bbit)):
                phases[r] ^= 2
            if xb:
                zs[r] ^= abit
            if xa:
                zs[r] ^= bbit
    else:  # SWAP
        for r in range(nrows):
            va = (xs[r] >> a) & 1
            vb = (xs[r] >> b) & 1
            if va != vb:
                xs[r] ^= abit | bbit
            va = (zs[r] >> a) & 1
            vb = (zs[r] >> b) & 1
            if va != vb:
                zs[r] ^= abit | bbit


class Tableau:
    """Mutable stabilizer tableau.  Single-owner during a shot; copy to share."""

    __slots__ = ("n", "active", "xs", "zs", "phases")

    def __init__(self, n: int, xs: list[int], zs: list[int], phases: list[int], active: int):
        self.n = n
        self.xs = xs
        self.zs = zs
        self.phases = phases
        self.active = active

    @classmethod
    def zero(cls, n: int) -> "Tableau":
        """Pure |0...0>: stabilizers Z_i, destabilizers X_i."""
        if n < 1:
            raise ValueError("need at least one qubit")
        xs = [0] * n + [1 << i for i in range(n)]
        zs = [1 << i for i in range(n)] + [0] * n
        return cls(n, xs, zs, [0] * (2 * n), n)

    @classmethod
    def maximally_mixed(cls, n: int) -> "Tableau":
        """Identity/2^n: same rows as |0...0> but no active stabilizers."""
        t = cls.zero(n)
        t.active = 0
        return t

    @classmethod
    def from_stabilizers(cls, generators: list[PauliOp], n: int) -> "Tableau":
        """Tableau stabilized by the given independent, commuting signed generators.

        Fewer than n generators yield a mixed state of rank 2^(n - len).
        """
        for g in generators:
            if g.n_qubits != n:
                raise ValueError("generator size mismatch")
            if not g.is_hermitian:
                raise ValueError(f"non-Hermitian generator {g}")
        for i in range(len(generators)):
            for j in range(i + 1, len(generators)):
                if commutes(generators[i], generators[j]):
                    raise IncompatibleGeneratorsError(
                        f"generators {i} and {j} anticommute"
                    )
        t = cls.maximally_mixed(n)
        for g in generators:
            factor = t._project_generator(g.x_bits, g.z_bits, g.phase_exp)
            if factor != 0.5:
                raise ValueError(f"generator {g} is dependent or sign-inconsistent")
        return t

    def copy(self) -> "Tableau":
        return Tableau(self.n, list(self.xs), list(self.zs), list(self.phases), self.active)

    @property
    def rank_deficit(self) -> int:
        return self.n - self.active

    def stabilizer(self, i: int) -> PauliOp:
        return PauliOp(self.n, self.xs[i], self.zs[i], self.phases[i])

    def destabilizer(self, i: int) -> PauliOp:
        return PauliOp(self.n, self.xs[self.n + i], self.zs[self.n + i], self.phases[self.n + i])

    # -- row helpers ---------------------------------------------------------

    def _anti(self, row: int, gx: int, gz: int) -> int:
        return ((self.zs[row] & gx) ^ (self.xs[row] & gz)).bit_count() & 1

    def _mul_row(self, row: int, px: int, pz: int, pphase: int) -> None:
        """row := row * (px, pz, pphase); callers only multiply commuting rows."""
        self.phases[row] = (
            self.phases[row] + pphase + phase_product_exp(self.xs[row], self.zs[row], px, pz)
        ) & 3
        self.xs[row] ^= px
        self.zs[row] ^= pz

    def _swap_pairs(self, i: int, j: int) -> None:
        """Swap stabilizer rows i, j together with their destabilizer partners."""
        if i == j:
            return
        n = self.n
        for a, b in ((i, j), (n + i, n + j)):
            self.xs[a], self.xs[b] = self.xs[b], self.xs[a]
            self.zs[a], self.zs[b] = self.zs[b], self.zs[a]
            self.phases[a], self.phases[b] = self.phases[b], self.phases[a]

    # -- gates and frames ----------------------------------------------------

    def apply_gate(self, gate: str, *qubits: int) -> None:
        """Conjugate every row by the named Clifford gate with exact signs."""
        for q in qubits:
            if not 0 <= q < self.n:
                raise IndexError(f"qubit {q} out of range")
        apply_gate_to_rows(self.xs, self.zs, self.phases, gate.upper(), qubits)

    def apply_pauli(self, frame: PauliOp) -> None:
        """Conjugate the state by a Pauli frame; only row signs can flip."""
        if frame.n_qubits != self.n:
            raise ValueError("frame size mismatch")
        fx, fz = frame.x_bits, frame.z_bits
        for r in range(2 * self.n):
            if ((self.zs[r] & fx) ^ (self.xs[r] & fz)).bit_count() & 1:
                self.phases[r] ^= 2

    def apply_clifford(self, element, offset: int = 0) -> None:
        """Conjugate rows by a Clifford element acting on qubits [offset, offset+m)."""
        m = element.n
        if offset < 0 or offset + m > self.n:
            raise ValueError("sector out of range")
        mask = (1 << m) - 1
        clear = ~(mask << offset)
        xs, zs, ph = self.xs, self.zs, self.phases
        for r in range(2 * self.n):
            sx = (xs[r] >> offset) & mask
            sz = (zs[r] >> offset) & mask
            if not (sx | sz):
                continue
            cx, cz, cph = element.conjugate_bits(sx, sz)
            xs[r] = (xs[r] & clear) | (cx << offset)
            zs[r] = (zs[r] & clear) | (cz << offset)
            ph[r] = (ph[r] + cph) & 3

    # -- measurement ---------------------------------------------------------

    def measure_all(self, rng) -> int:
        """Measure every qubit in the Z basis, ascending index; collapses the state.

        Returns the outcome bit-string as an integer (bit q = qubit q).
        Deterministic outcomes consume no randomness.
        """
        n = self.n
        out = 0
        for q in range(n):
            zbit = 1 << q
            random_outcome = False
            for i in range(self.active):
                if self.xs[i] & zbit:
                    random_outcome = True
                    break
            if not random_outcome:
                # Z_q commutes with the active group; random iff independent of it.
                for i in range(self.active, n):
                    if self.xs[i] & zbit:
                        random_outcome = True
                        break
                else:
                    for j in range(self.active, n):
                        if self.xs[n + j] & zbit:
                            random_outcome = True
                            break
            if random_outcome:
                bit = int(rng.integers(0, 2))
                factor = self._project_generator(0, zbit, 2 * bit)
                assert factor == 0.5
            else:
                # outcome fixed by the group: recover the sign of Z_q in it
                px = pz = pphase = 0
                for j in range(self.active):
                    row = n + j
                    if self.xs[row] & zbit:
                        pphase += self.phases[j] + phase_product_exp(px, pz, self.xs[j], self.zs[j])
                        px ^= self.xs[j]
                        pz ^= self.zs[j]
                assert px == 0 and pz == zbit
                bit = 0 if (pphase & 3) == 0 else 1
            out |= bit << q
        return out

    # -- projection ----------------------------------------------------------

    def project(self, generators: list[PauliOp], validate: bool = True) -> float:
        """Project by Pi = prod_k (1 + G_k)/2 and return Tr(Pi rho Pi).

        The returned trace is an exact dyadic rational (a power of 1/2, or 0).
        The tableau is updated in place to the post-projection state; on a zero
        trace it is left at the generator that annihilated it.
        """
        if validate:
            for g in generators:
                if g.n_qubits != self.n:
                    raise ValueError("generator size mismatch")
                if not g.is_hermitian:
                    raise ValueError(f"non-Hermitian generator {g}")
            for i in range(len(generators)):
                for j in range(i + 1, len(generators)):
                    if commutes(generators[i], generators[j]):
                        raise IncompatibleGeneratorsError(
                            f"generators {i} ({generators[i]}) and {j} ({generators[j]}) anticommute"
                        )
        trace = 1.0
        for g in generators:
            trace *= self._project_generator(g.x_bits, g.z_bits, g.phase_exp)
            if trace == 0.0:
                return 0.0
        return trace

    def _project_generator(self, gx: int, gz: int, gphase: int) -> float:
        n = self.n
        xs, zs = self.xs, self.zs

        pivot = None
        activate = False
        for i in range(n):
            if ((zs[i] & gx) ^ (xs[i] & gz)).bit_count() & 1:
                if i < self.active:
                    pivot = i          # error projection: trace halves, rank fixed
                else:
                    pivot = i          # independent generator: promote, rank drops
                    activate = True
                break
        if pivot is None:
            for j in range(self.active, n):
                if ((zs[n + j] & gx) ^ (xs[n + j] & gz)).bit_count() & 1:
                    pivot = n + j      # independent, witnessed by a free destabilizer
                    activate = True
                    break

        if pivot is not None:
            px, pz, pph = xs[pivot], zs[pivot], self.phases[pivot]
            for r in range(2 * n):
                if r != pivot and ((zs[r] & gx) ^ (xs[r] & gz)).bit_count() & 1:
                    self._mul_row(r, px, pz, pph)
            if pivot < n:
                # old stabilizer row becomes the destabilizer partner of G
                stab = pivot
                drow = n + pivot
                xs[drow], zs[drow], self.phases[drow] = px, pz, pph
            else:
                stab = pivot - n
            xs[stab], zs[stab], self.phases[stab] = gx, gz, gphase & 3
            if activate:
                self._swap_pairs(stab, self.active)
                self.active += 1
            return 0.5

        # G is in +/- the active group: deterministic outcome
        px = pz = pph = 0
        for j in range(self.active):
            if ((zs[n + j] & gx) ^ (xs[n + j] & gz)).bit_count() & 1:
                pph += self.phases[j] + phase_product_exp(px, pz, xs[j], zs[j])
                px ^= xs[j]
                pz ^= zs[j]
        assert px == gx and pz == gz, "tableau pairing is inconsistent"
        delta = (gphase - pph) & 3
        if delta == 0:
            return 1.0
        if delta == 2:
            return 0.0
        raise ValueError("non-Hermitian projection generator")

    # -- expectation values --------------------------------------------------

    def expectation(self, op: PauliOp) -> float:
        """Tr(rho P) / Tr(rho) for a Hermitian signed Pauli P; one of -1, 0, +1."""
        if op.n_qubits != self.n:
            raise ValueError("operator size mismatch")
        if not op.is_hermitian:
            raise ValueError("expectation of a non-Hermitian operator")
        n = self.n
        gx, gz = op.x_bits, op.z_bits
        for i in range(n):
            if self._anti(i, gx, gz):
                return 0.0
        for j in range(self.active, n):
            if self._anti(n + j, gx, gz):
                return 0.0
        px = pz = pph = 0
        for j in range(self.active):
            if self._anti(n + j, gx, gz):
                pph += self.phases[j] + phase_product_exp(px, pz, self.xs[j], self.zs[j])
                px ^= self.xs[j]
                pz ^= self.zs[j]
        if px != gx or pz != gz:
            return 0.0
        delta = (op.phase_exp - pph) & 3
        assert delta % 2 == 0
        return 1.0 if delta == 0 else -1.0

    # -- diagnostics ----------------------------------------------------------

    def check_invariants(self) -> None:
        """Raise AssertionError if the pairing or sign structure is broken."""
        n = self.n
        assert 0 <= self.active <= n
        for r in range(2 * n):
            assert self.phases[r] in (0, 2), "tableau rows must stay Hermitian"
        for i in range(n):
            for j in range(i + 1, n):
                assert not self._anti(i, self.xs[j], self.zs[j]), "stabilizers anticommute"
                assert not self._anti(n + i, self.xs[n + j], self.zs[n + j]), "destabilizers anticommute"
        for i in range(n):
            for j in range(n):
                want = 1 if i == j else 0
                assert self._anti(i, self.xs[n + j], self.zs[n + j]) == want, "pairing broken"
