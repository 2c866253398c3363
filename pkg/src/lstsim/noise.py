"""Single-qubit depolarizing noise realized as stochastic Pauli frames.

Each qubit independently suffers no error with probability 1 - p, otherwise
X, Y or Z with probability p/3 each, i.e. the channel
E(rho) = (1-p) rho + (p/3)(X rho X + Y rho Y + Z rho Z) per qubit.  One frame
is sampled per shot and applied once to the prepared encoded state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2_pauli import PauliOp

_ERROR_BITS = ((1, 0), (1, 1), (0, 1))  # X, Y, Z


@dataclass(frozen=True)
class NoiseSpec:
    p: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("depolarizing rate must be in [0, 1]")


def shot_rng(master_seed: int, shot_index: int) -> np.random.Generator:
    """Counter-split per-shot stream: reproducible independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, shot_index)))


def sample_pauli_frame(spec: NoiseSpec, n_qubits: int, rng: np.random.Generator) -> PauliOp:
    """One stochastic Pauli frame for an n-qubit register."""
    x = z = 0
    if spec.p > 0.0:
        hit = np.nonzero(rng.random(n_qubits) < spec.p)[0]
        if hit.size:
            letters = rng.integers(0, 3, size=hit.size)
            for q, letter in zip(hit, letters):
                xb, zb = _ERROR_BITS[letter]
                x |= xb << int(q)
                z |= zb << int(q)
    return PauliOp(n_qubits, x, z, 0)
