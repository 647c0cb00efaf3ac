"""Stabilizer tableau simulation with destabilizer bookkeeping.

The tableau stores 2n packed Pauli rows (destabilizers then stabilizers)
and supports Clifford gates, Pauli measurement in O(n^2), and exact
integer entanglement entropies.  All entropies here are in bits.
"""

from __future__ import annotations

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .pauli import PauliString

__all__ = [
    "StabilizerTableau",
    "as_region",
    "clifford_tables",
    "N_SYMPLECTIC",
]

Region = Tuple[int, ...]

N_SYMPLECTIC = 720  # |Sp(4, F2)|; with 16 sign choices: 11520 Cliffords


def as_region(sites: Iterable[int]) -> Region:
    """Normalize a site collection to a sorted duplicate-free tuple."""
    out = tuple(sorted(set(int(s) for s in sites)))
    return out


def _check_disjoint(*regions: Sequence[int]):
    seen = set()
    for r in regions:
        for s in r:
            if s in seen:
                raise ValueError(f"regions overlap at site {s}")
            seen.add(s)


def _pack(value: int, n_words: int) -> np.ndarray:
    out = np.zeros(n_words, np.uint64)
    mask = (1 << 64) - 1
    for w in range(n_words):
        out[w] = (value >> (64 * w)) & mask
    return out


def _unpack(words: np.ndarray) -> int:
    value = 0
    for w in range(words.shape[0]):
        value |= int(words[w]) << (64 * w)
    return value


# ---------------------------------------------------------------------------
# Two-qubit Clifford lookup tables
# ---------------------------------------------------------------------------

_CLIFFORD_TABLES: Optional[Tuple[np.ndarray, np.ndarray]] = None


def _sym_omega(u: int, v: int) -> int:
    """Symplectic form on 4-bit vectors (x1, z1, x2, z2)."""
    ux, uz = u & 0b0101, (u >> 1) & 0b0101
    vx, vz = v & 0b0101, (v >> 1) & 0b0101
    return ((ux & vz) ^ (uz & vx)).bit_count() & 1


def _vec_to_pauli(v: int) -> PauliString:
    """4-bit symplectic vector to a Hermitian 2-qubit Pauli with + sign."""
    x = (v & 1) | ((v >> 1) & 2)
    z = ((v >> 1) & 1) | ((v >> 2) & 2)
    return PauliString(2, x, z, (x & z).bit_count() % 4)


def clifford_tables() -> Tuple[np.ndarray, np.ndarray]:
    """Conjugation lookup for all 720 elements of Sp(4, F2).

    Returns (bits, phase), each (720, 16) uint8.  The key nibble encodes
    the input Pauli on the gate's two qubits as xa | za<<1 | xb<<2 |
    zb<<3; bits[e, key] is the image nibble and phase[e, key] the mod-4
    phase increment when all four generator images carry + signs.
    Random sign bits are layered on separately (a 4-bit mask adding
    2*popcount(key & mask)), giving 720 * 16 = 11520 distinct Cliffords.
    """
    global _CLIFFORD_TABLES
    if _CLIFFORD_TABLES is not None:
        return _CLIFFORD_TABLES
    elements = []
    nonzero = [v for v in range(1, 16)]
    for a in nonzero:
        bs = [v for v in nonzero if _sym_omega(a, v)]
        for b in bs:
            # symplectic complement of span{a,b}: 3 nonzero vectors
            cs = [v for v in nonzero
                  if not _sym_omega(a, v) and not _sym_omega(b, v)]
            for c in cs:
                for d in cs:
                    if _sym_omega(c, d):
                        elements.append((a, b, c, d))
    assert len(elements) == N_SYMPLECTIC
    bits = np.zeros((N_SYMPLECTIC, 16), np.uint8)
    phase = np.zeros((N_SYMPLECTIC, 16), np.uint8)
    for e, (a, b, c, d) in enumerate(elements):
        imgs = [_vec_to_pauli(v) for v in (a, b, c, d)]
        for key in range(16):
            acc = PauliString.identity(2)
            # input bits represent X1^xa Z1^za X2^xb Z2^zb in that order
            for gen, img in zip((0, 1, 2, 3), imgs):
                if (key >> gen) & 1:
                    acc = acc * img
            nib = (acc.x_bits & 1) | ((acc.z_bits & 1) << 1) \
                | (((acc.x_bits >> 1) & 1) << 2) | (((acc.z_bits >> 1) & 1) << 3)
            bits[e, key] = nib
            phase[e, key] = acc.phase
    _CLIFFORD_TABLES = (bits, phase)
    return _CLIFFORD_TABLES


# ---------------------------------------------------------------------------
# The tableau
# ---------------------------------------------------------------------------


class StabilizerTableau:
    """Pure stabilizer state of n qubits with destabilizer rows.

    Rows 0..n-1 of the packed arrays are destabilizers, rows n..2n-1
    stabilizers.  The tableau owns a seedable RNG used for measurement
    outcome draws and random Clifford sampling; identical seed and
    operation sequence replay bit for bit.
    """

    def __init__(self, n_qubits: int, rng=None):
        if n_qubits <= 0:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        self.n_words = (n_qubits + 63) >> 6
        self.xs = np.zeros((2 * n_qubits, self.n_words), np.uint64)
        self.zs = np.zeros((2 * n_qubits, self.n_words), np.uint64)
        self.rs = np.zeros(2 * n_qubits, np.uint8)
        if rng is None or isinstance(rng, (int, np.integer)):
            rng = np.random.default_rng(rng)
        self.rng = rng

    # -- constructors -------------------------------------------------

    @classmethod
    def zero_state(cls, n: int, rng=None) -> "StabilizerTableau":
        """|0...0>: stabilizers Z_i, destabilizers X_i."""
        t = cls(n, rng)
        for i in range(n):
            w, m = i >> 6, np.uint64(1 << (i & 63))
            t.xs[i, w] = m
            t.zs[n + i, w] = m
        return t

    @classmethod
    def plus_state(cls, n: int, rng=None) -> "StabilizerTableau":
        """|+...+>: stabilizers X_i, destabilizers Z_i."""
        t = cls(n, rng)
        for i in range(n):
            w, m = i >> 6, np.uint64(1 << (i & 63))
            t.zs[i, w] = m
            t.xs[n + i, w] = m
        return t

    @classmethod
    def from_stabilizers(cls, gens: Sequence[PauliString], rng=None) -> "StabilizerTableau":
        """State stabilized by the given commuting independent generators."""
        if not gens:
            raise ValueError("need at least one generator")
        n = gens[0].n_qubits
        t = cls.zero_state(n, rng)
        for p in gens:
            t.measure_pauli(p, forced=+1)
        for p in gens:
            if t.measure_pauli(p) != +1:
                raise ValueError(f"generators inconsistent at {p}")
        return t

    # -- row access ---------------------------------------------------

    def _row_pauli(self, row: int) -> PauliString:
        return PauliString(
            self.n_qubits,
            _unpack(self.xs[row]) & ((1 << self.n_qubits) - 1),
            _unpack(self.zs[row]) & ((1 << self.n_qubits) - 1),
            int(self.rs[row]),
        )

    @property
    def generators(self) -> List[PauliString]:
        n = self.n_qubits
        return [self._row_pauli(n + i) for i in range(n)]

    @property
    def destabilizers(self) -> List[PauliString]:
        return [self._row_pauli(i) for i in range(self.n_qubits)]

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n_qubits = self.n_qubits
        t.n_words = self.n_words
        t.xs = self.xs.copy()
        t.zs = self.zs.copy()
        t.rs = self.rs.copy()
        t.rng = self.rng
        return t

    # -- gates --------------------------------------------------------

    def apply_gate(self, gate: str, *sites: int):
        gate = gate.upper()
        for s in sites:
            if not 0 <= s < self.n_qubits:
                raise IndexError(f"site {s} out of range")
        if len(sites) == 2 and sites[0] == sites[1]:
            raise ValueError("two-qubit gate needs distinct sites")
        if gate == "H":
            K.k_gate_h(self.xs, self.zs, self.rs, sites[0])
        elif gate == "S":
            K.k_gate_s(self.xs, self.zs, self.rs, sites[0])
        elif gate == "X":
            K.k_gate_x(self.xs, self.zs, self.rs, sites[0])
        elif gate == "Z":
            K.k_gate_z(self.xs, self.zs, self.rs, sites[0])
        elif gate == "CNOT":
            K.k_gate_cnot(self.xs, self.zs, self.rs, sites[0], sites[1])
        elif gate == "CZ":
            K.k_gate_cz(self.xs, self.zs, self.rs, sites[0], sites[1])
        elif gate == "RANDOM_TWO_QUBIT_CLIFFORD":
            self.random_clifford_layer([(sites[0], sites[1])])
        else:
            raise ValueError(f"unknown gate {gate!r}")
        return self

    def random_clifford_layer(self, pairs: Sequence[Tuple[int, int]]):
        """Uniform random two-qubit Cliffords on disjoint qubit pairs."""
        if not pairs:
            return self
        bits_all, phase_all = clifford_tables()
        g = len(pairs)
        elems = self.rng.integers(0, N_SYMPLECTIC, size=g)
        signs = self.rng.integers(0, 16, size=g).astype(np.uint8)
        parr = np.asarray(pairs, np.int64).reshape(g, 2)
        K.k_clifford_layer(self.xs, self.zs, self.rs, parr,
                           bits_all[elems], phase_all[elems], signs)
        return self

    # -- measurement --------------------------------------------------

    def measure_pauli(self, p: PauliString, forced: Optional[int] = None) -> int:
        """Projective measurement of p; returns the outcome +1 or -1.

        With ``forced`` set to +1 or -1 the outcome of an otherwise
        random measurement is pinned; a deterministic measurement whose
        outcome disagrees with ``forced`` has the state's sign flipped
        by a single anticommuting Pauli (used by from_stabilizers).
        """
        if p.n_qubits != self.n_qubits:
            raise ValueError("Pauli size does not match tableau")
        if not p.is_hermitian():
            raise ValueError("cannot measure a non-Hermitian Pauli")
        n = self.n_qubits
        px = _pack(p.x_bits, self.n_words)
        pz = _pack(p.z_bits, self.n_words)
        if forced is None:
            coin = int(self.rng.integers(0, 2))
        else:
            coin = 0 if forced == +1 else 1
        det, outcome = K.k_measure(self.xs, self.zs, self.rs, n, px, pz,
                                   p.phase, coin)
        if det and forced is not None and outcome != coin:
            # flip the sign of one generator entering the product; the
            # destabilizer pairing tells us which generators contribute
            for i in range(n):
                if K.k_omega(self.xs[i], self.zs[i], px, pz):
                    self.rs[n + i] = (self.rs[n + i] + 2) & 3
                    outcome = coin
                    break
        return +1 if outcome == 0 else -1

    def measure_basis(self, sites: Sequence[int], basis: str = "Z"):
        """Measure every listed site in the Z or X basis (random outcomes)."""
        sites = np.asarray(sorted(sites), np.int64)
        if sites.size == 0:
            return self
        is_x = {"Z": 0, "X": 1}[basis.upper()]
        coins = self.rng.integers(0, 2, size=sites.size).astype(np.int64)
        K.k_measure_basis_sites(self.xs, self.zs, self.rs, self.n_qubits,
                                sites, is_x, coins)
        return self

    # -- entropies ----------------------------------------------------

    def entropy_bits(self, region: Iterable[int]) -> int:
        sites = np.asarray(as_region(region), np.int64)
        if sites.size and (sites[0] < 0 or sites[-1] >= self.n_qubits):
            raise IndexError("region site out of range")
        return int(K.k_entropy_bits(self.xs, self.zs, self.n_qubits, sites))

    def mutual_information_bits(self, a: Iterable[int], b: Iterable[int]) -> int:
        ra, rb = as_region(a), as_region(b)
        _check_disjoint(ra, rb)
        return (self.entropy_bits(ra) + self.entropy_bits(rb)
                - self.entropy_bits(ra + rb))

    def mie_bits(self, a: Iterable[int], b: Iterable[int], basis: str = "Z") -> int:
        """MIE(A:B): measure the complement in the given basis, S_A after.

        Works on a copy; a single outcome draw suffices because the
        post-measurement entropy of a stabilizer state is the same in
        every outcome branch.
        """
        ra, rb = as_region(a), as_region(b)
        _check_disjoint(ra, rb)
        ab = set(ra) | set(rb)
        comp = [q for q in range(self.n_qubits) if q not in ab]
        t = self.copy()
        t.measure_basis(comp, basis)
        return t.entropy_bits(ra)

    # -- serialization & checks ---------------------------------------

    def to_text(self) -> str:
        lines = [f"n={self.n_qubits}"]
        lines.extend(g.to_text() for g in self.generators)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, rng=None) -> "StabilizerTableau":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("n="):
            raise ValueError("expected first line n=<count>")
        n = int(lines[0][2:])
        gens = [PauliString.from_text(ln) for ln in lines[1:]]
        if len(gens) != n or any(g.n_qubits != n for g in gens):
            raise ValueError("generator count or width does not match n")
        return cls.from_stabilizers(gens, rng)

    def check_invariants(self):
        """Assert tableau consistency; raises AssertionError on violation."""
        n = self.n_qubits
        for i in range(2 * n):
            row = self._row_pauli(i)
            assert row.is_hermitian(), f"row {i} has imaginary phase"
        gens = self.generators
        dest = self.destabilizers
        from .pauli import pauli_commutes
        for i in range(n):
            for j in range(i + 1, n):
                assert pauli_commutes(gens[i], gens[j]), \
                    f"generators {i},{j} anticommute"
            for j in range(n):
                want = (i == j)
                got = not pauli_commutes(dest[i], gens[j])
                assert got == want, f"destabilizer {i} vs generator {j}"
        from .gf2 import BinaryMatrix, gf2_rank
        rows = [(g.x_bits | (g.z_bits << n)) for g in gens]
        assert gf2_rank(BinaryMatrix.from_ints(rows, 2 * n)) == n, \
            "generators not independent"
        return True
