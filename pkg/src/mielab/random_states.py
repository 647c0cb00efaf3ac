"""Random state generators used by validation suites and tests."""

from __future__ import annotations

from typing import List, Tuple

import numpy as np

from .pauli import PauliString
from .tableau import StabilizerTableau

__all__ = [
    "random_css_tableau",
    "random_stabilizer_tableau",
    "random_tripartition",
]


def random_css_tableau(n: int, rng, n_ops: int = 0) -> StabilizerTableau:
    """Random CSS state from X/ZZ/XX/ZIZ measurements and CNOTs on |+...+>.

    Every operation maps CSS groups to CSS groups, so the result always
    admits a pure-X / pure-Z generating set (possibly with negative
    pure-X signs fixable by single-qubit Z gates).
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if n_ops <= 0:
        n_ops = 4 * n
    t = StabilizerTableau.plus_state(n, rng)
    for _ in range(n_ops):
        kind = int(rng.integers(0, 5))
        i = int(rng.integers(0, n))
        j = (i + 1) % n
        k = (i + 2) % n
        if kind == 0:
            t.measure_pauli(PauliString.x_on(n, i))
        elif kind == 1:
            t.measure_pauli(PauliString.z_on(n, i, j))
        elif kind == 2:
            t.measure_pauli(PauliString.x_on(n, i, j))
        elif kind == 3:
            t.measure_pauli(PauliString.z_on(n, i, k))
        else:
            t.apply_gate("CNOT", i, j)
    return t


def random_stabilizer_tableau(n: int, rng, depth: int = 0) -> StabilizerTableau:
    """Generic random stabilizer state via brickwork Clifford layers."""
    if n < 2:
        raise ValueError("need n >= 2")
    if depth <= 0:
        depth = 2 * n
    t = StabilizerTableau.zero_state(n, rng)
    for layer in range(depth):
        start = layer % 2
        pairs = [(i, (i + 1) % n) for i in range(start, n - 1, 2)]
        if pairs:
            t.random_clifford_layer(pairs)
        if rng.random() < 0.3:
            site = int(rng.integers(0, n))
            if rng.random() < 0.5:
                t.measure_pauli(PauliString.z_on(n, site))
            else:
                t.measure_pauli(PauliString.x_on(n, site))
    return t


def random_tripartition(n: int, rng) -> Tuple[List[int], List[int], List[int]]:
    """Random assignment of all n sites to three non-empty parties."""
    while True:
        labels = rng.integers(0, 3, size=n)
        parts = [list(np.flatnonzero(labels == k)) for k in range(3)]
        if all(parts):
            return tuple([int(x) for x in p] for p in parts)
