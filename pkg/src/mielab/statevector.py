"""Dense exact simulation of small qubit/qutrit chains.

Ground states come from a matrix-free iterative eigensolver; MIE, MIC
and FMIE are computed by exact enumeration of measurement outcomes on
the complement region, or by sequential Born-rule sampling.  All
entropies in this module are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .pauli import PauliString
from .tableau import StabilizerTableau, as_region, _check_disjoint

__all__ = [
    "DenseState",
    "HamiltonianSpec",
    "MeasurementRecord",
    "ground_state",
    "correlator",
    "expectation",
    "measure_site",
    "mie_exact",
    "mie_sampled",
    "mic_exact",
    "fmie",
    "state_is_sign_free",
    "haar_hybrid_trajectory",
    "haar_two_qubit",
    "entanglement_entropy_nats",
    "dense_from_tableau",
]

DIM_CAP = 1 << 22
_EIG_CUT = 1e-14

SX = np.array([[0, 1], [1, 0]], complex)
SY = np.array([[0, -1j], [1j, 0]], complex)
SZ = np.array([[1, 0], [0, -1]], complex)
I2 = np.eye(2, dtype=complex)

_W3 = np.exp(2j * np.pi / 3)
CLOCK = np.diag([_W3, _W3**2, _W3**3])          # U
SHIFT = np.roll(np.eye(3, dtype=complex), 1, axis=0)  # V: |n+1><n|

_OP_BY_NAME = {"X": SX, "Y": SY, "Z": SZ, "I": I2, "U": CLOCK, "V": SHIFT}

# Hadamard columns are the X eigenstates, so outcome 0 <-> |+>
_HAD = np.array([[1, 1], [1, -1]], complex) / math.sqrt(2)
# rows <k~| of the V eigenbasis |k~> = 3^{-1/2} sum_n w^{nk} |n>
_VROT = np.array([[_W3 ** (-(n * k)) for n in range(3)] for k in range(3)],
                 complex) / math.sqrt(3)


def _basis_rotation(local_dim: int, basis: str) -> Optional[np.ndarray]:
    """Matrix R with (R psi) giving amplitudes in the measurement basis."""
    b = basis.upper()
    if local_dim == 2:
        if b == "Z":
            return None
        if b == "X":
            return _HAD.conj().T  # rows <+|, <-|
        raise ValueError(f"qubit basis must be Z or X, got {basis!r}")
    if b == "U":
        return None
    if b == "V":
        return _VROT
    raise ValueError(f"qutrit basis must be U or V, got {basis!r}")


@dataclass
class DenseState:
    """Normalized complex amplitude vector over (local_dim)^n_sites."""

    local_dim: int
    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.local_dim not in (2, 3):
            raise ValueError("local_dim must be 2 or 3")
        dim = self.local_dim**self.n_sites
        if dim > DIM_CAP:
            raise ValueError(f"state dimension {dim} exceeds cap {DIM_CAP}")
        self.amplitudes = np.asarray(self.amplitudes, complex).reshape(dim)
        norm = np.linalg.norm(self.amplitudes)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state not normalized: |psi| = {norm}")

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.local_dim,) * self.n_sites)

    def copy(self) -> "DenseState":
        return DenseState(self.local_dim, self.n_sites, self.amplitudes.copy())

    @classmethod
    def computational(cls, n_sites: int, index: int = 0, local_dim: int = 2) -> "DenseState":
        amp = np.zeros(local_dim**n_sites, complex)
        amp[index] = 1.0
        return cls(local_dim, n_sites, amp)

    @classmethod
    def uniform_plus(cls, n_sites: int, local_dim: int = 2) -> "DenseState":
        dim = local_dim**n_sites
        amp = np.full(dim, 1.0 / math.sqrt(dim), complex)
        return cls(local_dim, n_sites, amp)


@dataclass
class MeasurementRecord:
    outcomes: Dict[int, int]
    probability: float
    post_state: DenseState


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HamiltonianSpec:
    """Sum of local terms on a periodic chain.

    terms: tuple of (sites, matrix) with matrix acting on the listed
    sites in order, shape (d^k, d^k).
    """

    model: str
    n_sites: int
    local_dim: int
    terms: Tuple[Tuple[Tuple[int, ...], np.ndarray], ...]
    couplings: Tuple[Tuple[str, float], ...] = ()

    @property
    def dim(self) -> int:
        return self.local_dim**self.n_sites


def _kron(*mats: np.ndarray) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _dedup_bonds(bonds: Iterable[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """Drop repeated wrap terms on tiny rings (e.g. bond (0,1) == (1,0))."""
    seen = set()
    out = []
    for b in bonds:
        key = frozenset(b)
        if len(key) < len(b):
            continue  # term folds onto itself; cannot occur for L >= 3
        if key in seen:
            continue
        seen.add(key)
        out.append(b)
    return out


def ising_critical(L: int) -> HamiltonianSpec:
    """H = -sum X_j X_{j+1} - sum Z_j, periodic, at the critical point."""
    if L < 2:
        raise ValueError("L must be >= 2")
    terms = []
    for j, k in _dedup_bonds([(j, (j + 1) % L) for j in range(L)]):
        terms.append(((j, k), -_kron(SX, SX)))
    for j in range(L):
        terms.append(((j,), -SZ.copy()))
    return HamiltonianSpec("ising", L, 2, tuple(terms), (("J", 1.0), ("h", 1.0)))


def field_only(L: int) -> HamiltonianSpec:
    """Degenerate-free sanity model: -sum Z_j with |0...0> ground state."""
    terms = tuple(((j,), -SZ.copy()) for j in range(L))
    return HamiltonianSpec("field_only", L, 2, terms, (("h", 1.0),))


def obrien_fendley(L: int, lam: float = 0.428) -> HamiltonianSpec:
    """Tricritical Ising chain: H_Ising + lam * sum (ZXX + XXZ)."""
    if L < 4:
        raise ValueError("L must be >= 4")
    terms = list(ising_critical(L).terms)
    for j in range(L):
        a, b, c = j, (j + 1) % L, (j + 2) % L
        terms.append(((a, b, c), lam * _kron(SZ, SX, SX)))
        terms.append(((a, b, c), lam * _kron(SX, SX, SZ)))
    return HamiltonianSpec("obrien_fendley", L, 2, tuple(terms),
                           (("lambda", lam),))


def potts3(L: int) -> HamiltonianSpec:
    """Critical three-state Potts chain in clock/shift operators."""
    if L < 2:
        raise ValueError("L must be >= 2")
    hop = _kron(CLOCK, CLOCK.conj().T)
    bond = -(hop + hop.conj().T)
    terms = []
    for j, k in _dedup_bonds([(j, (j + 1) % L) for j in range(L)]):
        terms.append(((j, k), bond))
    for j in range(L):
        terms.append(((j,), -(SHIFT + SHIFT.conj().T)))
    return HamiltonianSpec("potts3", L, 3, tuple(terms))


def gapless_spt(L: int) -> HamiltonianSpec:
    """Cluster-plus-ferromagnet chain on 2L interleaved qubits.

    sigma_j sits at index 2j, tau_{j+1/2} at index 2j+1 (mod 2L).
    H = -sum_j (tau^x sigma^z tau^x + sigma^x tau^z sigma^x)
        - sum_j sigma^x_j sigma^x_{j+1}
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    n = 2 * L
    terms = []
    bonds = _dedup_bonds([((2 * j - 2) % n, 2 * j) for j in range(L)])
    for j in range(L):
        s = 2 * j
        tl = (2 * j - 1) % n
        tr = 2 * j + 1
        terms.append((((tl, s, tr)), -_kron(SX, SZ, SX)))
        sl = (2 * j - 2) % n
        terms.append((((sl, tl, s)), -_kron(SX, SZ, SX)))
    for bond in bonds:
        terms.append((bond, -_kron(SX, SX)))
    return HamiltonianSpec("gapless_spt", n, 2, tuple(terms))


def sigma_sites(L: int) -> Tuple[int, ...]:
    return tuple(2 * j for j in range(L))


def tau_sites(L: int) -> Tuple[int, ...]:
    return tuple(2 * j + 1 for j in range(L))


def apply_hamiltonian(spec: HamiltonianSpec, vec: np.ndarray) -> np.ndarray:
    """Matrix-free H|psi> by per-term tensor contraction."""
    d = spec.local_dim
    n = spec.n_sites
    psi = vec.reshape((d,) * n)
    out = np.zeros_like(psi)
    for sites, mat in spec.terms:
        k = len(sites)
        tens = mat.reshape((d,) * (2 * k))
        # contract mat's input legs with the site axes, then restore order
        res = np.tensordot(tens, psi, axes=(tuple(range(k, 2 * k)), sites))
        res = np.moveaxis(res, tuple(range(k)), sites)
        out += res
    return out.reshape(-1)


def ground_state(spec: HamiltonianSpec, tol: float = 1e-10) -> Tuple[DenseState, float]:
    """Lowest eigenpair; raises on non-convergence or degeneracy."""
    dim = spec.dim
    if dim > DIM_CAP:
        raise ValueError(f"dimension {dim} exceeds cap")
    if dim <= 1024:
        H = np.zeros((dim, dim), complex)
        eye = np.eye(dim, dtype=complex)
        for col in range(dim):
            H[:, col] = apply_hamiltonian(spec, eye[:, col])
        vals, vecs = np.linalg.eigh(H)
        e0, e1 = vals[0], vals[1]
        vec = vecs[:, 0]
    else:
        op = LinearOperator((dim, dim),
                            matvec=lambda v: apply_hamiltonian(spec, v),
                            dtype=complex)
        vals, vecs = eigsh(op, k=2, which="SA", tol=tol)
        order = np.argsort(vals)
        e0, e1 = vals[order[0]], vals[order[1]]
        vec = vecs[:, order[0]]
        resid = np.linalg.norm(apply_hamiltonian(spec, vec) - e0 * vec)
        if resid > max(tol * 100, 1e-7) * max(abs(e0), 1.0):
            raise RuntimeError(f"eigensolver residual {resid} too large")
    if e1 - e0 < 10 * tol:
        raise RuntimeError(
            f"degenerate ground space: gap {e1 - e0:g} below {10 * tol:g}")
    # canonical global phase: largest amplitude real positive
    idx = int(np.argmax(np.abs(vec)))
    ph = vec[idx] / abs(vec[idx])
    vec = vec / ph
    vec = vec / np.linalg.norm(vec)
    return DenseState(spec.local_dim, spec.n_sites, vec), float(e0)


# ---------------------------------------------------------------------------
# Operators and measurement
# ---------------------------------------------------------------------------


def _op_matrix(op: Union[str, np.ndarray], d: int) -> np.ndarray:
    if isinstance(op, str):
        mat = _OP_BY_NAME[op.upper()]
    else:
        mat = np.asarray(op, complex)
    if mat.shape != (d, d):
        raise ValueError(f"operator shape {mat.shape} does not match d={d}")
    return mat


def _apply_site_op(arr: np.ndarray, mat: np.ndarray, site: int) -> np.ndarray:
    out = np.tensordot(mat, arr, axes=([1], [site]))
    return np.moveaxis(out, 0, site)


def correlator(state: DenseState, op_a, site_a: int, op_b, site_b: int) -> float:
    """Real part of <psi| O_A O_B |psi> (imaginary part checked small)."""
    if site_a == site_b:
        raise ValueError("sites must be distinct")
    for s in (site_a, site_b):
        if not 0 <= s < state.n_sites:
            raise IndexError(f"site {s} out of range")
    d = state.local_dim
    arr = state.tensor()
    out = _apply_site_op(arr, _op_matrix(op_b, d), site_b)
    out = _apply_site_op(out, _op_matrix(op_a, d), site_a)
    val = np.vdot(arr, out)
    if abs(val.imag) > 1e-8:
        raise ValueError(f"correlator has imaginary part {val.imag:g}")
    return float(val.real)


def expectation(state: DenseState, ops: Sequence[Tuple[Union[str, np.ndarray], int]]) -> complex:
    """<psi| prod O_site |psi> for an arbitrary operator list."""
    d = state.local_dim
    arr = state.tensor()
    out = arr
    for op, site in reversed(list(ops)):
        out = _apply_site_op(out, _op_matrix(op, d), site)
    return complex(np.vdot(arr, out))


def measure_site(
    state: DenseState,
    site: int,
    basis: str = "Z",
    forced_outcome: Optional[int] = None,
    rng=None,
) -> MeasurementRecord:
    """Projective single-site measurement in the given basis.

    Returns the outcome, its Born probability, and the collapsed
    (renormalized, full-size) state with the site left in the measured
    basis state.
    """
    if not 0 <= site < state.n_sites:
        raise IndexError(f"site {site} out of range")
    d = state.local_dim
    rot = _basis_rotation(d, basis)
    arr = state.tensor()
    work = arr if rot is None else _apply_site_op(arr, rot, site)
    moved = np.moveaxis(work, site, 0).reshape(d, -1)
    probs = np.sum(np.abs(moved) ** 2, axis=1)
    if forced_outcome is not None:
        k = int(forced_outcome)
        if not 0 <= k < d:
            raise ValueError(f"outcome {k} out of range")
        if probs[k] <= 1e-28:
            raise ValueError(f"forced outcome {k} has zero probability")
    else:
        if rng is None:
            rng = np.random.default_rng()
        k = int(rng.choice(d, p=probs / probs.sum()))
    proj = np.zeros_like(moved)
    proj[k] = moved[k]
    post = np.moveaxis(proj.reshape((d,) + work.shape[:site] + work.shape[site + 1:]),
                       0, site)
    if rot is not None:
        post = _apply_site_op(post, rot.conj().T, site)
    p = float(probs[k])
    post = post.reshape(-1) / math.sqrt(p)
    return MeasurementRecord({site: k}, p,
                             DenseState(d, state.n_sites, post))


# ---------------------------------------------------------------------------
# MIE / MIC / FMIE by exact enumeration
# ---------------------------------------------------------------------------


def _split_tensor(state: DenseState, a: Sequence[int], b: Sequence[int],
                  basis: str) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Amplitudes reordered to (dC, dA, dB) with C rotated to the basis."""
    ra, rb = as_region(a), as_region(b)
    _check_disjoint(ra, rb)
    inside = set(ra) | set(rb)
    rc = tuple(q for q in range(state.n_sites) if q not in inside)
    d = state.local_dim
    arr = state.tensor()
    rot = _basis_rotation(d, basis)
    if rot is not None:
        for q in rc:
            arr = _apply_site_op(arr, rot, q)
    arr = np.transpose(arr, rc + ra + rb)
    da = d ** len(ra)
    db = d ** len(rb)
    dc = d ** len(rc)
    return arr.reshape(dc, da, db), rc


def _branch_entropies(chi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-outcome (probability, S_A in nats) from a (dC, dA, dB) stack."""
    p = np.sum(np.abs(chi) ** 2, axis=(1, 2))
    svals = np.linalg.svd(chi, compute_uv=False)
    ent = np.zeros_like(p)
    live = p > _EIG_CUT
    lam = svals[live] ** 2 / p[live, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > _EIG_CUT, -lam * np.log(lam), 0.0)
    ent[live] = terms.sum(axis=1)
    return p, ent


def mie_exact(state: DenseState, a, b, basis: str = "Z") -> dict:
    """MIE(A:B) by exact enumeration of outcomes on the complement.

    Returns {"mie": nats, "histogram": [(entropy, probability), ...]}
    with one histogram entry per outcome with nonzero probability.
    """
    chi, rc = _split_tensor(state, a, b, basis)
    if chi.shape[0] > 4 * 10**6:
        raise ValueError(f"outcome enumeration cap exceeded: {chi.shape[0]}")
    p, ent = _branch_entropies(chi)
    live = p > _EIG_CUT
    mie = float(np.dot(p[live], ent[live]))
    hist = [(float(s), float(q)) for s, q in zip(ent[live], p[live])]
    return {"mie": mie, "histogram": hist}


def mie_sampled(state: DenseState, a, b, basis: str, n_samples: int, rng=None) -> dict:
    """MIE by sequential Born sampling of the complement sites.

    Each sample is an independent sweep: sites of C measured one by one
    (state shrinking as outcomes are fixed), then S_A of the remaining
    A:B state.  Returns {"mean", "stderr", "n_samples"}.
    """
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    ra, rb = as_region(a), as_region(b)
    _check_disjoint(ra, rb)
    inside = set(ra) | set(rb)
    rc = tuple(q for q in range(state.n_sites) if q not in inside)
    d = state.local_dim
    arr = state.tensor()
    rot = _basis_rotation(d, basis)
    if rot is not None:
        for q in rc:
            arr = _apply_site_op(arr, rot, q)
    # axes: A, B, then C sites (measured back to front)
    arr = np.transpose(arr, ra + rb + rc)
    da = d ** len(ra)
    db = d ** len(rb)
    base = arr.reshape((da, db) + (d,) * len(rc))
    total = 0.0
    total_sq = 0.0
    for _ in range(n_samples):
        work = base
        for _site in range(len(rc)):
            probs = np.sum(np.abs(work) ** 2, axis=tuple(range(work.ndim - 1)))
            probs = probs / probs.sum()
            k = int(rng.choice(d, p=probs))
            work = work[..., k]
        p = np.sum(np.abs(work) ** 2)
        sv = np.linalg.svd(work / math.sqrt(p), compute_uv=False)
        lam = sv**2
        lam = lam[lam > _EIG_CUT]
        s = float(-(lam * np.log(lam)).sum())
        total += s
        total_sq += s * s
    mean = total / n_samples
    var = max(total_sq / n_samples - mean**2, 0.0)
    stderr = math.sqrt(var / n_samples) if n_samples > 1 else 0.0
    return {"mean": mean, "stderr": stderr, "n_samples": n_samples}


def mic_exact(state: DenseState, site_a: int, site_b: int, basis: str = "Z") -> dict:
    """Measurement-induced concurrence between two single qubits.

    For a pure two-qubit state the concurrence is 2|det chi|, so the
    outcome average needs no per-branch normalization.  Returns the
    bounding correlators alongside.
    """
    if state.local_dim != 2:
        raise ValueError("mic_exact is defined for qubits")
    chi, _ = _split_tensor(state, (site_a,), (site_b,), basis)
    if chi.shape[0] > 4 * 10**6:
        raise ValueError("outcome enumeration cap exceeded")
    dets = chi[:, 0, 0] * chi[:, 1, 1] - chi[:, 0, 1] * chi[:, 1, 0]
    mic = float(2.0 * np.abs(dets).sum())
    xx = correlator(state, "X", site_a, "X", site_b)
    yy = expectation(state, [("Y", site_a), ("Y", site_b)])
    return {"mic": mic, "xx": xx, "yy_abs": abs(yy)}


def fmie(state: DenseState, a, b, basis: str = "Z") -> float:
    """Entropy of A after forcing the all-zero (Z) / all-plus (X) outcome."""
    chi, rc = _split_tensor(state, a, b, basis)
    branch = chi[0]
    p = float(np.sum(np.abs(branch) ** 2))
    if p <= 1e-28:
        raise ValueError("forced outcome has zero probability")
    sv = np.linalg.svd(branch / math.sqrt(p), compute_uv=False)
    lam = sv**2
    lam = lam[lam > _EIG_CUT]
    return float(-(lam * np.log(lam)).sum())


def state_is_sign_free(state: DenseState, basis: str = "Z", tol: float = 1e-8) -> bool:
    """All amplitudes nonnegative in the product basis, up to global phase."""
    d = state.local_dim
    arr = state.tensor()
    rot = _basis_rotation(d, basis)
    if rot is not None:
        for q in range(state.n_sites):
            arr = _apply_site_op(arr, rot, q)
    flat = arr.reshape(-1)
    idx = int(np.argmax(np.abs(flat)))
    ph = flat[idx] / abs(flat[idx])
    flat = flat / ph
    return bool(np.all(flat.real >= -tol) and np.all(np.abs(flat.imag) <= tol))


def entanglement_entropy_nats(state: DenseState, region) -> float:
    """Von Neumann entropy of the reduced state on the region, in nats."""
    reg = as_region(region)
    if not reg:
        return 0.0
    d = state.local_dim
    if d ** len(reg) > 1 << 12:
        raise ValueError("region too large for dense reduced density matrix")
    rest = tuple(q for q in range(state.n_sites) if q not in set(reg))
    arr = np.transpose(state.tensor(), reg + rest)
    mat = arr.reshape(d ** len(reg), -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    lam = sv**2
    lam = lam[lam > _EIG_CUT]
    return float(-(lam * np.log(lam)).sum())


# ---------------------------------------------------------------------------
# Haar-hybrid circuits
# ---------------------------------------------------------------------------


def haar_two_qubit(rng) -> np.ndarray:
    """Haar-uniform U(4) via QR of a complex Gaussian with fixed phases."""
    z = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    z /= math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _apply_two_site(arr: np.ndarray, u: np.ndarray, i: int, j: int) -> np.ndarray:
    tens = u.reshape(2, 2, 2, 2)
    out = np.tensordot(tens, arr, axes=([2, 3], [i, j]))
    return np.moveaxis(out, [0, 1], [i, j])


def haar_hybrid_trajectory(L: int, p: float, t_layers: int, rng=None) -> DenseState:
    """Brickwork Haar circuit with rate-p Z measurements, from |0...0>."""
    if L > 20:
        raise ValueError("L capped at 20 for dense evolution")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    arr = np.zeros((2,) * L, complex)
    arr[(0,) * L] = 1.0
    for layer in range(t_layers):
        start = layer % 2
        for i in range(start, L, 2):
            j = (i + 1) % L
            arr = _apply_two_site(arr, haar_two_qubit(rng), i, j)
        for site in range(L):
            if rng.random() < p:
                moved = np.moveaxis(arr, site, 0).reshape(2, -1)
                probs = np.sum(np.abs(moved) ** 2, axis=1)
                k = int(rng.choice(2, p=probs / probs.sum()))
                keep = np.zeros_like(moved)
                keep[k] = moved[k] / math.sqrt(probs[k])
                arr = np.moveaxis(
                    keep.reshape((2,) + arr.shape[:site] + arr.shape[site + 1:]),
                    0, site)
    flat = arr.reshape(-1)
    flat = flat / np.linalg.norm(flat)
    return DenseState(2, L, flat)


# ---------------------------------------------------------------------------
# Stabilizer conversion oracle
# ---------------------------------------------------------------------------


def _apply_pauli_dense(vec: np.ndarray, p: PauliString) -> np.ndarray:
    """i^phase * prod X^x Z^z acting on a 2^n amplitude vector.

    Qubit q is tensor axis q, i.e. bit n-1-q of the flat index
    (row-major reshape puts site 0 most significant).
    """
    n = p.n_qubits
    dim = 1 << n
    xrev = zrev = 0
    for q in range(n):
        if (p.x_bits >> q) & 1:
            xrev |= 1 << (n - 1 - q)
        if (p.z_bits >> q) & 1:
            zrev |= 1 << (n - 1 - q)
    idx = np.arange(dim)
    src = idx ^ xrev
    # Z acts before X in the X^x Z^z convention, so it sees the source
    # basis state
    zpar = np.zeros(dim, np.int64)
    for b in range(n):
        if (zrev >> b) & 1:
            zpar ^= (src >> b) & 1
    out = vec[src] * np.where(zpar, -1.0, 1.0)
    return out * (1j) ** p.phase


def dense_from_tableau(t: StabilizerTableau, rng=None) -> DenseState:
    """Dense amplitudes of a stabilizer state (small n only).

    Projects a random vector onto the joint +1 eigenspace of all
    generators; the stabilizer state is the unique fixed point.
    """
    n = t.n_qubits
    if n > 14:
        raise ValueError("dense conversion capped at 14 qubits")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    dim = 1 << n
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    for g in t.generators:
        vec = 0.5 * (vec + _apply_pauli_dense(vec, g))
    norm = np.linalg.norm(vec)
    if norm < 1e-9:
        # unlucky draw orthogonal to the state; retry deterministically
        vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        for g in t.generators:
            vec = 0.5 * (vec + _apply_pauli_dense(vec, g))
        norm = np.linalg.norm(vec)
    vec = vec / norm
    idx = int(np.argmax(np.abs(vec)))
    vec = vec / (vec[idx] / abs(vec[idx]))
    return DenseState(2, n, vec)
