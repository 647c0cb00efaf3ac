"""Bit-packed n-qubit Pauli strings.

A Pauli string is stored as two integer bitmasks (X part, Z part) plus a
phase exponent r, representing the operator

    i^r * prod_j X_j^{x_j} Z_j^{z_j}

with the per-qubit X-before-Z ordering.  Bit j of ``x_bits``/``z_bits``
corresponds to qubit j.  In this convention a Pauli Y on one qubit is
stored as x=1, z=1, phase=1 (Y = i XZ); the textual sign prefix accounts
for the Y count so that e.g. ``PauliString.from_text("+Y")`` round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "PauliString",
    "pauli_mul",
    "pauli_inverse",
    "pauli_commutes",
]

_PREFIXES = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX_VALUES = {"+": 0, "+i": 1, "-": 2, "-i": 3, "i": 1, "-1": 2, "1": 0}
_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator with a mod-4 phase (power of i)."""

    n_qubits: int
    x_bits: int
    z_bits: int
    phase: int = 0

    def __post_init__(self):
        if self.n_qubits < 0:
            raise ValueError("n_qubits must be nonnegative")
        mask = (1 << self.n_qubits) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask:
            raise ValueError("bit vector exceeds n_qubits")
        if not 0 <= self.phase <= 3:
            raise ValueError("phase must be in {0,1,2,3}")

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def x_on(cls, n: int, *sites: int) -> "PauliString":
        bits = 0
        for s in sites:
            bits |= 1 << s
        return cls(n, bits, 0, 0)

    @classmethod
    def z_on(cls, n: int, *sites: int) -> "PauliString":
        bits = 0
        for s in sites:
            bits |= 1 << s
        return cls(n, 0, bits, 0)

    @classmethod
    def from_text(cls, text: str) -> "PauliString":
        """Parse e.g. "-XZI" or "+iYZ".  Character k is qubit k."""
        text = text.strip()
        prefix = ""
        body = text
        for cand in ("+i", "-i", "+", "-"):
            if text.startswith(cand):
                prefix = cand
                body = text[len(cand):]
                break
        phase = _PREFIX_VALUES.get(prefix, 0)
        x = z = 0
        for k, ch in enumerate(body):
            if ch == "I":
                continue
            elif ch == "X":
                x |= 1 << k
            elif ch == "Z":
                z |= 1 << k
            elif ch == "Y":
                x |= 1 << k
                z |= 1 << k
                phase = (phase + 1) % 4
            else:
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(body), x, z, phase)

    # -- queries ------------------------------------------------------

    @property
    def n_y(self) -> int:
        return (self.x_bits & self.z_bits).bit_count()

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    def is_hermitian(self) -> bool:
        return (self.phase - self.n_y) % 2 == 0

    def sign(self) -> int:
        """Scalar in front of the I/X/Y/Z letters; requires a Hermitian string."""
        k = (self.phase - self.n_y) % 4
        if k == 0:
            return 1
        if k == 2:
            return -1
        raise ValueError("non-Hermitian Pauli has imaginary sign")

    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0 and self.phase == 0

    def to_text(self) -> str:
        k = (self.phase - self.n_y) % 4
        chars = []
        for q in range(self.n_qubits):
            chars.append(_CHARS[((self.x_bits >> q) & 1, (self.z_bits >> q) & 1)])
        return _PREFIXES[k] + "".join(chars)

    def __str__(self) -> str:
        return self.to_text()

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)


def _check_sizes(p: PauliString, q: PauliString):
    if p.n_qubits != q.n_qubits:
        raise ValueError(
            f"dimension mismatch: {p.n_qubits} vs {q.n_qubits} qubits"
        )


def pauli_mul(p: PauliString, q: PauliString) -> PauliString:
    """Group product p*q with full mod-4 phase tracking."""
    _check_sizes(p, q)
    # Reordering X^{qx} past Z^{pz} costs (-1) per overlapping qubit.
    swaps = (p.z_bits & q.x_bits).bit_count()
    phase = (p.phase + q.phase + 2 * swaps) % 4
    return PauliString(p.n_qubits, p.x_bits ^ q.x_bits, p.z_bits ^ q.z_bits, phase)


def pauli_inverse(p: PauliString) -> PauliString:
    """Inverse: same bits, phase chosen so p * inverse(p) is the identity."""
    swaps = (p.z_bits & p.x_bits).bit_count()
    phase = (-p.phase - 2 * swaps) % 4
    return PauliString(p.n_qubits, p.x_bits, p.z_bits, phase)


def pauli_commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the symplectic form p.x*q.z + p.z*q.x vanishes mod 2."""
    _check_sizes(p, q)
    w = (p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()
    return w % 2 == 0
