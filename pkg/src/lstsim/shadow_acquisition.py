"""Shot execution and shadow-ensemble persistence.

One shot: prepare the encoded logical state, apply a sampled Pauli noise
frame, draw an independent uniform Clifford per logical sector, conjugate the
state, and measure every qubit in the computational basis.  The stored record
(U_i, b_i) per sector is equivalent to the stabilizer state U†|b><b|U that the
estimator reconstructs later.

Ensemble file format (versioned, little-endian, deterministic given the seed):

    magic "LSTSHD01" | u16 version | u16 n | u16 k | f64 p | u64 seed |
    u64 count | u16 len + code name utf-8 | u16 len + prep name utf-8 |
    count * k * [ sym (4n^2 bits) | signs (2n bits) | outcome (n bits) ] |
    u32 crc32 of everything after the magic

A JSON-lines debug form (metadata line, then one object per snapshot) is also
read/written; both round-trip bit-exactly.
"""

from __future__ import annotations

import json
import struct
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Sequence

from .clifford import CliffordElement, sample_uniform_clifford
from .codes import LogicalStatePrep, StabilizerCode, prepare_logical_state
from .noise import NoiseSpec, sample_pauli_frame, shot_rng
from .tableau import Tableau

FORMAT_MAGIC = b"LSTSHD01"
FORMAT_VERSION = 1
ENSEMBLE_TYPE = "tensor_clifford"


class EnsembleFormatError(ValueError):
    """Corrupt, truncated, or version-incompatible ensemble data."""


@dataclass(frozen=True)
class Snapshot:
    """One shadow sample: per-sector Clifford element and measured bits."""

    shot_index: int
    sector_cliffords: tuple[bytes, ...]
    sector_signs: tuple[int, ...]
    sector_bits: tuple[int, ...]

    def clifford(self, sector: int, n: int) -> CliffordElement:
        return CliffordElement.unpack(n, self.sector_cliffords[sector], self.sector_signs[sector])


@dataclass
class ShadowEnsemble:
    """Ordered snapshots plus the metadata needed to post-process them."""

    code_name: str
    n_sector: int
    k: int
    p: float
    prep_name: str
    master_seed: int
    snapshots: list[Snapshot] = field(default_factory=list)
    version: int = FORMAT_VERSION

    @property
    def shots(self) -> int:
        return len(self.snapshots)

    @property
    def n_total(self) -> int:
        return self.n_sector * self.k

    def check_matches(self, codes: Sequence[StabilizerCode]) -> None:
        """Reject post-processing against a different code than was sampled."""
        if len(codes) != self.k or any(c.n_physical != self.n_sector for c in codes):
            raise EnsembleFormatError(
                f"ensemble is {self.k} sector(s) of n={self.n_sector}, "
                f"got {len(codes)} code(s) of n={[c.n_physical for c in codes]}"
            )
        name = "+".join(c.name for c in codes)
        if name != self.code_name:
            raise EnsembleFormatError(
                f"ensemble was sampled with code {self.code_name!r}, got {name!r}"
            )


def acquire_shot(
    codes: Sequence[StabilizerCode],
    prep: LogicalStatePrep,
    noise: NoiseSpec,
    rng,
    shot_index: int = 0,
    base_tableau: Tableau | None = None,
    sampler=sample_uniform_clifford,
) -> Snapshot:
    """Run one shot: encode, noise frame, per-sector Clifford, measure."""
    t = base_tableau.copy() if base_tableau is not None else prepare_logical_state(codes, prep)
    n_total = t.n
    t.apply_pauli(sample_pauli_frame(noise, n_total, rng))
    elements = []
    offset = 0
    for code in codes:
        el = sampler(code.n_physical, rng)
        t.apply_clifford(el, offset)
        elements.append(el)
        offset += code.n_physical
    outcome = t.measure_all(rng)
    bits = []
    offset = 0
    for code in codes:
        bits.append((outcome >> offset) & ((1 << code.n_physical) - 1))
        offset += code.n_physical
    return Snapshot(
        shot_index,
        tuple(el.pack() for el in elements),
        tuple(el.signs for el in elements),
        tuple(bits),
    )


def _acquire_range(codes, prep, noise, master_seed, start, stop) -> list[Snapshot]:
    base = prepare_logical_state(codes, prep)
    return [
        acquire_shot(codes, prep, noise, shot_rng(master_seed, s), s, base_tableau=base)
        for s in range(start, stop)
    ]


def acquire_ensemble(
    codes: Sequence[StabilizerCode],
    prep: LogicalStatePrep,
    noise: NoiseSpec,
    shots: int,
    master_seed: int | None = None,
    threads: int = 1,
) -> ShadowEnsemble:
    """Collect an ordered ensemble; shot i depends only on (master_seed, i)."""
    if shots < 1:
        raise ValueError("shots must be positive")
    sizes = {c.n_physical for c in codes}
    if len(sizes) != 1:
        raise ValueError("sector codes must share one size")
    if master_seed is None:
        master_seed = noise.seed
    ensemble = ShadowEnsemble(
        code_name="+".join(c.name for c in codes),
        n_sector=codes[0].n_physical,
        k=len(codes),
        p=noise.p,
        prep_name=prep.name,
        master_seed=master_seed,
    )
    if threads <= 1:
        ensemble.snapshots = _acquire_range(codes, prep, noise, master_seed, 0, shots)
        return ensemble
    chunk = max(1, (shots + threads - 1) // threads)
    spans = [(lo, min(lo + chunk, shots)) for lo in range(0, shots, chunk)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(
            _acquire_range_star,
            [(list(codes), prep, noise, master_seed, lo, hi) for lo, hi in spans],
        )
        for part in parts:
            ensemble.snapshots.extend(part)
    return ensemble


def _acquire_range_star(args):
    return _acquire_range(*args)


# -- binary serialization ---------------------------------------------------------


def _sector_record_size(n: int) -> tuple[int, int, int]:
    sym = (4 * n * n + 7) // 8
    signs = (2 * n + 7) // 8
    bits = (n + 7) // 8
    return sym, signs, bits


def write_ensemble(ensemble: ShadowEnsemble, sink: str | Path | BinaryIO) -> None:
    payload = bytearray()
    payload += struct.pack(
        "<HHHxxd Q Q",
        ensemble.version,
        ensemble.n_sector,
        ensemble.k,
        ensemble.p,
        ensemble.master_seed,
        ensemble.shots,
    )
    for text in (ensemble.code_name, ensemble.prep_name):
        raw = text.encode("utf-8")
        payload += struct.pack("<H", len(raw)) + raw
    n = ensemble.n_sector
    sym_len, sign_len, bit_len = _sector_record_size(n)
    for snap in ensemble.snapshots:
        for s in range(ensemble.k):
            sym = snap.sector_cliffords[s]
            if len(sym) != sym_len:
                raise EnsembleFormatError("sector record has wrong size")
            payload += sym
            payload += snap.sector_signs[s].to_bytes(sign_len, "little")
            payload += snap.sector_bits[s].to_bytes(bit_len, "little")
    blob = FORMAT_MAGIC + bytes(payload) + struct.pack("<I", zlib.crc32(bytes(payload)))
    if isinstance(sink, (str, Path)):
        Path(sink).write_bytes(blob)
    else:
        sink.write(blob)


def read_ensemble(source: str | Path | BinaryIO) -> ShadowEnsemble:
    if isinstance(source, (str, Path)):
        blob = Path(source).read_bytes()
    else:
        blob = source.read()
    if len(blob) < len(FORMAT_MAGIC) + 4 or blob[: len(FORMAT_MAGIC)] != FORMAT_MAGIC:
        raise EnsembleFormatError("not an ensemble file (bad magic)")
    payload, crc_raw = blob[len(FORMAT_MAGIC):-4], blob[-4:]
    if zlib.crc32(payload) != struct.unpack("<I", crc_raw)[0]:
        raise EnsembleFormatError("checksum mismatch: file is corrupt or truncated")
    head = struct.calcsize("<HHHxxd Q Q")
    version, n, k, p, seed, count = struct.unpack("<HHHxxd Q Q", payload[:head])
    if version != FORMAT_VERSION:
        raise EnsembleFormatError(f"unsupported format version {version}")
    pos = head
    names = []
    for _ in range(2):
        (ln,) = struct.unpack_from("<H", payload, pos)
        pos += 2
        names.append(payload[pos : pos + ln].decode("utf-8"))
        pos += ln
    ensemble = ShadowEnsemble(names[0], n, k, p, names[1], seed, version=version)
    sym_len, sign_len, bit_len = _sector_record_size(n)
    rec = sym_len + sign_len + bit_len
    expect = pos + count * k * rec
    if len(payload) != expect:
        raise EnsembleFormatError(
            f"payload is {len(payload)} bytes, header implies {expect}"
        )
    for shot in range(count):
        cliffs, signs, bits = [], [], []
        for _ in range(k):
            cliffs.append(bytes(payload[pos : pos + sym_len]))
            pos += sym_len
            signs.append(int.from_bytes(payload[pos : pos + sign_len], "little"))
            pos += sign_len
            bits.append(int.from_bytes(payload[pos : pos + bit_len], "little"))
            pos += bit_len
        ensemble.snapshots.append(Snapshot(shot, tuple(cliffs), tuple(signs), tuple(bits)))
    return ensemble


# -- JSON-lines debug format -------------------------------------------------------


def write_ensemble_jsonl(ensemble: ShadowEnsemble, sink: str | Path) -> None:
    lines = [
        json.dumps(
            {
                "format": ENSEMBLE_TYPE,
                "version": ensemble.version,
                "code": ensemble.code_name,
                "n": ensemble.n_sector,
                "k": ensemble.k,
                "p": ensemble.p,
                "prep": ensemble.prep_name,
                "seed": ensemble.master_seed,
                "shots": ensemble.shots,
            }
        )
    ]
    for snap in ensemble.snapshots:
        lines.append(
            json.dumps(
                {
                    "shot": snap.shot_index,
                    "sym": [c.hex() for c in snap.sector_cliffords],
                    "signs": list(snap.sector_signs),
                    "bits": list(snap.sector_bits),
                }
            )
        )
    Path(sink).write_text("\n".join(lines) + "\n")


def read_ensemble_jsonl(source: str | Path) -> ShadowEnsemble:
    lines = Path(source).read_text().splitlines()
    if not lines:
        raise EnsembleFormatError("empty JSON-lines ensemble")
    try:
        meta = json.loads(lines[0])
        ensemble = ShadowEnsemble(
            meta["code"], meta["n"], meta["k"], meta["p"], meta["prep"], meta["seed"],
            version=meta["version"],
        )
        for line in lines[1:]:
            rec = json.loads(line)
            ensemble.snapshots.append(
                Snapshot(
                    rec["shot"],
                    tuple(bytes.fromhex(h) for h in rec["sym"]),
                    tuple(rec["signs"]),
                    tuple(rec["bits"]),
                )
            )
    except (KeyError, ValueError) as exc:
        raise EnsembleFormatError(f"bad JSON-lines ensemble: {exc}") from exc
    if ensemble.shots != meta["shots"]:
        raise EnsembleFormatError("snapshot count disagrees with metadata")
    return ensemble
