"""Stabilizer-code registry: loading, validation, projectors, logical lifting.

Code file format (text, comments start with '#'):

    5 1 3            <- header: N k [distance]
    +XZZXI           <- N-k signed generator lines
    ...
    X:               <- k logical X operators
    +XXXXX
    Z:               <- k logical Z operators
    +ZZZZZ

A trivial code (k = N) has no generator lines and uses bare X_i / Z_i as its
logical operators.  Validation checks commutation, GF(2) independence and the
logical pairing; the offending pair is named on failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .gf2_pauli import PauliOp, commutes, gf2_rank, multiply
from .tableau import Tableau


class CodeParseError(ValueError):
    """Malformed code file."""


class InvalidCodeError(ValueError):
    """Code data violates a stabilizer-code invariant."""


@dataclass(frozen=True)
class StabilizerCode:
    """An [[N, k]] stabilizer code with chosen logical operators."""

    name: str
    n_physical: int
    k_logical: int
    generators: tuple[PauliOp, ...]
    logical_x: tuple[PauliOp, ...]
    logical_z: tuple[PauliOp, ...]
    distance: int | None = None

    def validate(self) -> None:
        n, k = self.n_physical, self.k_logical
        if not 1 <= k <= n:
            raise InvalidCodeError(f"{self.name}: need 1 <= k <= N")
        if len(self.generators) != n - k:
            raise InvalidCodeError(f"{self.name}: expected {n - k} generators")
        if len(self.logical_x) != k or len(self.logical_z) != k:
            raise InvalidCodeError(f"{self.name}: expected {k} logical X and Z operators")
        for label, ops in (
            ("generator", self.generators),
            ("logical X", self.logical_x),
            ("logical Z", self.logical_z),
        ):
            for op in ops:
                if op.n_qubits != n:
                    raise InvalidCodeError(f"{self.name}: {label} {op} has wrong length")
                if not op.is_hermitian:
                    raise InvalidCodeError(f"{self.name}: {label} {op} is not +/- Hermitian")
        gens = self.generators
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if commutes(gens[i], gens[j]):
                    raise InvalidCodeError(
                        f"{self.name}: generators {i} ({gens[i]}) and {j} ({gens[j]}) anticommute"
                    )
        rows = [g.x_bits | (g.z_bits << n) for g in gens]
        if gf2_rank(rows, 2 * n) != len(gens):
            raise InvalidCodeError(f"{self.name}: generators are GF(2) dependent")
        for label, ops in (("logical X", self.logical_x), ("logical Z", self.logical_z)):
            for i, op in enumerate(ops):
                for j, g in enumerate(gens):
                    if commutes(op, g):
                        raise InvalidCodeError(
                            f"{self.name}: {label} {i} anticommutes with generator {j}"
                        )
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                want = 1 if i == j else 0
                if commutes(lx, lz) != want:
                    raise InvalidCodeError(
                        f"{self.name}: logical X {i} / logical Z {j} pairing is wrong"
                    )
        for label, ops in (("logical X", self.logical_x), ("logical Z", self.logical_z)):
            for i in range(len(ops)):
                for j in range(i + 1, len(ops)):
                    if commutes(ops[i], ops[j]):
                        raise InvalidCodeError(
                            f"{self.name}: {label} operators {i} and {j} anticommute"
                        )

    def projector_factors(self):
        """Affine factors (1 + S_j)/2 per generator; sign carried in b."""
        from .gf2_pauli import AffinePauliFactor

        out = []
        for g in self.generators:
            out.append(AffinePauliFactor(0.5, 0.5 * g.sign, g.with_phase(0)))
        return out

    def contains_stabilizer(self, op: PauliOp) -> bool:
        """True iff op's bit pattern lies in the generator span (any sign)."""
        n = self.n_physical
        rows = [g.x_bits | (g.z_bits << n) for g in self.generators]
        vec = op.x_bits | (op.z_bits << n)
        base = gf2_rank(rows, 2 * n)
        return gf2_rank(rows + [vec], 2 * n) == base

    def to_text(self) -> str:
        lines = [f"# name: {self.name}"]
        header = f"{self.n_physical} {self.k_logical}"
        if self.distance is not None:
            header += f" {self.distance}"
        lines.append(header)
        lines += [g.to_string() for g in self.generators]
        lines.append("X:")
        lines += [op.to_string() for op in self.logical_x]
        lines.append("Z:")
        lines += [op.to_string() for op in self.logical_z]
        return "\n".join(lines) + "\n"


def projector_factors(code: StabilizerCode):
    return code.projector_factors()


def parse_code(text: str, name: str = "code") -> StabilizerCode:
    """Parse and validate a code from its text form."""
    lines = []
    for raw in text.splitlines():
        stripped = raw.strip()
        if stripped.startswith("# name:"):
            name = stripped.split(":", 1)[1].strip() or name
        if not stripped or stripped.startswith("#"):
            continue
        lines.append(stripped)
    if not lines:
        raise CodeParseError("empty code file")
    header = lines[0].split()
    if len(header) not in (2, 3):
        raise CodeParseError(f"bad header {lines[0]!r}, expected 'N k [d]'")
    try:
        n, k = int(header[0]), int(header[1])
        distance = int(header[2]) if len(header) == 3 else None
    except ValueError as exc:
        raise CodeParseError(f"bad header {lines[0]!r}") from exc
    body = lines[1:]
    n_gens = n - k
    if len(body) != n_gens + 2 + 2 * k:
        raise CodeParseError(
            f"expected {n_gens} generators plus X:/Z: sections with {k} operators each"
        )
    try:
        generators = tuple(PauliOp.from_string(s) for s in body[:n_gens])
        if body[n_gens] != "X:":
            raise CodeParseError("missing 'X:' section")
        logical_x = tuple(PauliOp.from_string(s) for s in body[n_gens + 1 : n_gens + 1 + k])
        if body[n_gens + 1 + k] != "Z:":
            raise CodeParseError("missing 'Z:' section")
        logical_z = tuple(PauliOp.from_string(s) for s in body[n_gens + 2 + k :])
    except ValueError as exc:
        raise CodeParseError(str(exc)) from exc
    code = StabilizerCode(name, n, k, generators, logical_x, logical_z, distance)
    code.validate()
    return code


def load_code(path: str | Path) -> StabilizerCode:
    path = Path(path)
    return parse_code(path.read_text(), name=path.stem)


def builtin_code_dir() -> Path:
    return Path(__file__).parent / "data" / "codes"


def builtin_codes() -> dict[str, Path]:
    """Shipped .code files, keyed by file stem (e.g. 'nn5_513')."""
    return {p.stem: p for p in sorted(builtin_code_dir().glob("*.code"))}


def resolve_code(spec: str) -> StabilizerCode:
    """Load a code from a path, or from the shipped set by name."""
    p = Path(spec)
    if p.exists():
        return load_code(p)
    table = builtin_codes()
    if spec in table:
        return load_code(table[spec])
    raise CodeParseError(f"unknown code {spec!r}; shipped codes: {', '.join(table)}")


def trivial_code(n: int) -> StabilizerCode:
    """[[n, n]]: no generators, bare X_i / Z_i logicals, identity projector."""
    lx = tuple(PauliOp.single(n, i, "X") for i in range(n))
    lz = tuple(PauliOp.single(n, i, "Z") for i in range(n))
    return StabilizerCode(f"trivial{n}", n, n, (), lx, lz, distance=1)


# -- logical lifting -----------------------------------------------------------


def lift_logical(code: StabilizerCode, logical_op: PauliOp) -> PauliOp:
    """Physical operator for a k-qubit logical Pauli, phases tracked exactly.

    Per logical qubit the letters map as X -> logical_x, Z -> logical_z and
    Y -> i * logical_x * logical_z, matching the canonical Hermitian form.
    """
    if logical_op.n_qubits != code.k_logical:
        raise ValueError(
            f"logical operator acts on {logical_op.n_qubits} qubits, code has k={code.k_logical}"
        )
    out = PauliOp.identity(code.n_physical).with_phase(logical_op.phase_exp)
    for i in range(code.k_logical):
        xb = (logical_op.x_bits >> i) & 1
        zb = (logical_op.z_bits >> i) & 1
        if xb:
            out = multiply(out, code.logical_x[i])
        if zb:
            out = multiply(out, code.logical_z[i])
        if xb and zb:
            out = out.with_phase((out.phase_exp + 1) & 3)
    return out


def sector_offsets(codes: Sequence[StabilizerCode]) -> list[int]:
    offsets = []
    total = 0
    for c in codes:
        offsets.append(total)
        total += c.n_physical
    return offsets


def total_qubits(codes: Sequence[StabilizerCode]) -> int:
    return sum(c.n_physical for c in codes)


def embedded_generators(codes: Sequence[StabilizerCode]) -> list[PauliOp]:
    """All sector generators embedded into the full register."""
    n_total = total_qubits(codes)
    out = []
    for code, off in zip(codes, sector_offsets(codes)):
        out += [g.embed(n_total, off) for g in code.generators]
    return out


def lift_logical_multi(codes: Sequence[StabilizerCode], logical_op: PauliOp) -> PauliOp:
    """Lift a k-qubit logical Pauli across k single-logical-qubit sectors."""
    if any(c.k_logical != 1 for c in codes):
        raise ValueError("sector codes must each encode one logical qubit")
    if logical_op.n_qubits != len(codes):
        raise ValueError("logical operator size must match the sector count")
    n_total = total_qubits(codes)
    out = PauliOp.identity(n_total).with_phase(logical_op.phase_exp)
    for i, (code, off) in enumerate(zip(codes, sector_offsets(codes))):
        letter = PauliOp(1, (logical_op.x_bits >> i) & 1, (logical_op.z_bits >> i) & 1, 0)
        out = multiply(out, lift_logical(code, letter).embed(n_total, off))
    return out


# -- logical state preparation ---------------------------------------------------


@dataclass(frozen=True)
class LogicalStatePrep:
    """A pure logical stabilizer state given by k signed logical generators."""

    name: str
    generators: tuple[PauliOp, ...] = field(default_factory=tuple)

    @classmethod
    def zero(cls, k: int) -> "LogicalStatePrep":
        """|0...0> on the logical qubits."""
        return cls("zero", tuple(PauliOp.single(k, i, "Z") for i in range(k)))

    @classmethod
    def ghz(cls, k: int) -> "LogicalStatePrep":
        """(|0...0> + |1...1>)/sqrt(2): generators X...X and Z_i Z_{i+1}."""
        gens = [PauliOp(k, (1 << k) - 1, 0, 0)]
        for i in range(k - 1):
            gens.append(PauliOp(k, 0, 0b11 << i, 0))
        return cls("ghz", tuple(gens))

    @classmethod
    def from_strings(cls, strings: Sequence[str], name: str = "custom") -> "LogicalStatePrep":
        return cls(name, tuple(PauliOp.from_string(s) for s in strings))

    @property
    def k(self) -> int:
        return self.generators[0].n_qubits if self.generators else 0


def prep_by_name(name: str, k: int) -> LogicalStatePrep:
    if name == "zero":
        return LogicalStatePrep.zero(k)
    if name == "ghz":
        return LogicalStatePrep.ghz(k)
    raise ValueError(f"unknown prep {name!r} (expected 'zero' or 'ghz')")


def prepare_logical_state(codes: Sequence[StabilizerCode], prep: LogicalStatePrep) -> Tableau:
    """Physical tableau stabilized by all sector generators plus the lifted prep.

    Sector codes must each be [[n, 1]]; the prep acts on k = len(codes) logical
    qubits.  The result is pure (rank deficit 0).
    """
    if any(c.k_logical != 1 for c in codes):
        raise ValueError("sector codes must each encode one logical qubit")
    if prep.k != len(codes):
        raise ValueError(f"prep is on {prep.k} logical qubits, have {len(codes)} sectors")
    n_total = total_qubits(codes)
    gens = embedded_generators(codes)
    gens += [lift_logical_multi(codes, g) for g in prep.generators]
    return Tableau.from_stabilizers(gens, n_total)


# -- distance checks and random code construction --------------------------------


def _weight_limited_paulis(n: int, max_weight: int):
    """All non-identity Paulis of weight <= max_weight (no phase)."""
    from itertools import combinations, product

    letters = ("X", "Y", "Z")
    for w in range(1, max_weight + 1):
        for qubits in combinations(range(n), w):
            for choice in product(letters, repeat=w):
                x = z = 0
                for q, letter in zip(qubits, choice):
                    xb, zb = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}[letter]
                    x |= xb << q
                    z |= zb << q
                yield PauliOp(n, x, z, 0)


def verify_distance_at_least(code: StabilizerCode, d: int) -> bool:
    """Brute-force check that no Pauli of weight < d is an undetected logical.

    An error of weight w < d must either anticommute with some generator
    (detected) or lie inside the stabilizer group (harmless).
    """
    for err in _weight_limited_paulis(code.n_physical, d - 1):
        if all(commutes(err, g) == 0 for g in code.generators):
            if not code.contains_stabilizer(err):
                return False
    return True


def random_code(n: int, seed: int, min_distance: int = 3, max_tries: int = 200) -> StabilizerCode:
    """A random valid [[n, 1]] code with verified distance >= min_distance.

    Stabilizers are the images of Z_2..Z_n under a uniformly random Clifford,
    with the images of X_1, Z_1 as the logical pair; re-samples until the
    brute-force distance check passes.  Deterministic given the seed.
    """
    import numpy as np

    from .clifford import CliffordElement

    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        el = CliffordElement.random(n, rng)
        gens = tuple(el.image_z(j).with_phase(0) for j in range(1, n))
        code = StabilizerCode(
            f"random{n}", n, 1, gens,
            (el.image_x(0).with_phase(0),), (el.image_z(0).with_phase(0),),
            distance=min_distance,
        )
        code.validate()
        if verify_distance_at_least(code, min_distance):
            return code
    raise RuntimeError(f"no [[{n},1]] code of distance >= {min_distance} found in {max_tries} tries")
