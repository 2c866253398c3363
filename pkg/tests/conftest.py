from __future__ import annotations

import numpy as np
import pytest

from lstsim.codes import parse_code
from lstsim.tableau import Tableau

ONE_QUBIT_GATES = ["H", "S", "X", "Y", "Z"]
TWO_QUBIT_GATES = ["CX", "CZ", "SWAP"]

TOY_21_TEXT = """\
# name: toy21
2 1 1
+XX
X:
+XI
Z:
+ZZ
"""

TOY_422_TEXT = """\
# name: toy422
4 2 2
+XXXX
+ZZZZ
X:
+XXII
+XIXI
Z:
+ZIZI
+ZZII
"""


def random_gate(rng: np.random.Generator, n: int):
    if n == 1 or rng.random() < 0.5:
        return ONE_QUBIT_GATES[rng.integers(0, 5)], (int(rng.integers(0, n)),)
    a, b = rng.permutation(n)[:2]
    return TWO_QUBIT_GATES[rng.integers(0, 3)], (int(a), int(b))


def random_tableau(n: int, rng: np.random.Generator, gates: int = 25) -> Tableau:
    t = Tableau.zero(n)
    for _ in range(gates):
        g, qs = random_gate(rng, n)
        t.apply_gate(g, *qs)
    return t


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def toy21():
    return parse_code(TOY_21_TEXT)


@pytest.fixture
def toy422():
    return parse_code(TOY_422_TEXT)
