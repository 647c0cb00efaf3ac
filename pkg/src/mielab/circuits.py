"""Measurement-circuit ensembles on a ring and their sampling loops.

Three models:

  xzz       odd steps measure single-site X with probability p, even
            steps measure nearest-neighbour ZZ with probability 1-p
  xxziz     odd steps measure bond XX with probability p, even steps
            next-nearest ZIZ with probability 1-p
  clifford  brickwork of uniform random two-qubit Cliffords with
            per-site Z measurement at rate p after each unitary layer

All models start from the all-|+> product state.  One "layer" below is
a full odd+even step pair.  Trajectory RNG streams derive from
(seed, trajectory index), so shards are reproducible and mergeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .percolation import ClusterPartition, FastClusters
from .stats import SampleAccumulator
from .tableau import StabilizerTableau

__all__ = [
    "CircuitSpec",
    "Geometry",
    "cross_ratio",
    "antipodal_family",
    "run_trajectory",
    "sample_ensemble",
    "cross_validate",
]

MODELS = ("xzz", "xxziz", "clifford")


@dataclass(frozen=True)
class CircuitSpec:
    model: str
    L: int
    p: float
    seed: int = 0
    t_equilibrate: Optional[int] = None
    t_sample: Optional[int] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.L < 4 or self.L % 2:
            raise ValueError("L must be even and >= 4")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must be in [0, 1]")

    @property
    def equilibration_layers(self) -> int:
        return self.t_equilibrate if self.t_equilibrate is not None else 2 * self.L

    @property
    def sample_layers(self) -> int:
        return self.t_sample if self.t_sample is not None else self.L


@dataclass(frozen=True)
class Geometry:
    """Disjoint ring intervals A = [x1, x2) and B = [x3, x4).

    Coordinates are site indices taken modulo L; an interval [a, b)
    holds the sites a, a+1, ..., b-1 (mod L).
    """

    x1: int
    x2: int
    x3: int
    x4: int
    L: int

    def __post_init__(self):
        sa, sb = set(self.sites_a), set(self.sites_b)
        if not sa or not sb:
            raise ValueError("empty interval")
        if sa & sb:
            raise ValueError("intervals overlap on the ring")

    def _interval(self, a: int, b: int) -> Tuple[int, ...]:
        a %= self.L
        b %= self.L
        if a < b:
            return tuple(range(a, b))
        return tuple(range(a, self.L)) + tuple(range(0, b))

    @property
    def sites_a(self) -> Tuple[int, ...]:
        return self._interval(self.x1, self.x2)

    @property
    def sites_b(self) -> Tuple[int, ...]:
        return self._interval(self.x3, self.x4)

    @property
    def eta(self) -> float:
        return cross_ratio(self.x1, self.x2, self.x3, self.x4, self.L)

    def translated(self, shift: int) -> "Geometry":
        return Geometry((self.x1 + shift) % self.L, (self.x2 + shift) % self.L,
                        (self.x3 + shift) % self.L, (self.x4 + shift) % self.L,
                        self.L)


def cross_ratio(x1: int, x2: int, x3: int, x4: int, L: int) -> float:
    """Conformal cross-ratio with chord weights w_ij = sin(pi |xi-xj| / L)."""

    def w(a, b):
        return math.sin(math.pi * (abs(a - b) % L) / L)

    w13 = w(x1, x3)
    w24 = w(x2, x4)
    if w13 == 0 or w24 == 0:
        raise ValueError("degenerate geometry: coincident endpoints")
    return (w(x1, x2) * w(x3, x4)) / (w13 * w24)


def antipodal_family(L: int, lengths: Iterable[int]) -> List[Geometry]:
    """Equal intervals of each length, placed diametrically opposite."""
    out = []
    for ell in lengths:
        if not 1 <= ell <= L // 2 - 1:
            raise ValueError(f"interval length {ell} does not fit")
        out.append(Geometry(0, ell, L // 2, L // 2 + ell, L))
    return out


# ---------------------------------------------------------------------------
# Event streams (shared verbatim between tableau engine and oracle)
# ---------------------------------------------------------------------------


def _xzz_layer_events(rng, L: int, p: float):
    """One X-step site list and one ZZ-step bond list."""
    x_sites = np.flatnonzero(rng.random(L) < p).astype(np.int64)
    zz_bonds = np.flatnonzero(rng.random(L) < (1.0 - p)).astype(np.int64)
    return x_sites, zz_bonds


def _trajectory_rng(seed: int, index: int):
    return np.random.default_rng([seed, index])


def _apply_xzz_layer(t: StabilizerTableau, x_sites, zz_bonds, rng):
    L = t.n_qubits
    if x_sites.size:
        coins = rng.integers(0, 2, size=x_sites.size).astype(np.int64)
        K.k_measure_basis_sites(t.xs, t.zs, t.rs, L, x_sites, 1, coins)
    if zz_bonds.size:
        a = zz_bonds
        b = (zz_bonds + 1) % L
        coins = rng.integers(0, 2, size=a.size).astype(np.int64)
        K.k_measure_two_site_layer(t.xs, t.zs, t.rs, L, a, b, 0, coins)


def _apply_xzz_layer_clusters(cl, x_sites, zz_bonds, L: int):
    for s in x_sites:
        cl.split(int(s))
    for s in zz_bonds:
        cl.merge(int(s), int((s + 1) % L))


def _apply_xxziz_layer(t: StabilizerTableau, rng, p: float):
    L = t.n_qubits
    xx = np.flatnonzero(rng.random(L) < p).astype(np.int64)
    if xx.size:
        coins = rng.integers(0, 2, size=xx.size).astype(np.int64)
        K.k_measure_two_site_layer(t.xs, t.zs, t.rs, L, xx, (xx + 1) % L, 1, coins)
    ziz = np.flatnonzero(rng.random(L) < (1.0 - p)).astype(np.int64)
    if ziz.size:
        coins = rng.integers(0, 2, size=ziz.size).astype(np.int64)
        K.k_measure_two_site_layer(t.xs, t.zs, t.rs, L, ziz, (ziz + 2) % L, 0, coins)


def _clifford_unitary_step(t: StabilizerTableau, parity: int):
    L = t.n_qubits
    start = parity & 1
    pairs = [((i % L), ((i + 1) % L)) for i in range(start, L + start, 2)]
    t.random_clifford_layer(pairs)


def _clifford_measure_step(t: StabilizerTableau, rng, p: float):
    L = t.n_qubits
    sites = np.flatnonzero(rng.random(L) < p).astype(np.int64)
    if sites.size:
        coins = rng.integers(0, 2, size=sites.size).astype(np.int64)
        K.k_measure_basis_sites(t.xs, t.zs, t.rs, L, sites, 0, coins)


def _apply_clifford_layer(t: StabilizerTableau, rng, p: float, parity: int):
    _clifford_unitary_step(t, parity)
    _clifford_measure_step(t, rng, p)


def _run_layers(t: StabilizerTableau, spec: CircuitSpec, rng, n_layers: int):
    if spec.model == "xzz":
        for _ in range(n_layers):
            x_sites, zz_bonds = _xzz_layer_events(rng, spec.L, spec.p)
            _apply_xzz_layer(t, x_sites, zz_bonds, rng)
    elif spec.model == "xxziz":
        for _ in range(n_layers):
            _apply_xxziz_layer(t, rng, spec.p)
    else:
        for k in range(n_layers):
            _apply_clifford_layer(t, rng, spec.p, 0)
            _apply_clifford_layer(t, rng, spec.p, 1)


def run_trajectory(spec: CircuitSpec, rng=None) -> StabilizerTableau:
    """Equilibrated steady-state tableau for one trajectory."""
    if rng is None:
        rng = _trajectory_rng(spec.seed, 0)
    t = StabilizerTableau.plus_state(spec.L, rng)
    _run_layers(t, spec, rng, spec.equilibration_layers)
    return t


# ---------------------------------------------------------------------------
# Ensemble sampling
# ---------------------------------------------------------------------------


def _record_tableau(t: StabilizerTableau, geometries, bases, acc: SampleAccumulator):
    for gi, geom in enumerate(geometries):
        a, b = geom.sites_a, geom.sites_b
        acc.add((gi, "mi"), t.mutual_information_bits(a, b))
        for basis in bases:
            acc.add((gi, f"mie_{basis.lower()}"), t.mie_bits(a, b, basis))


def sample_ensemble(
    spec: CircuitSpec,
    geometries: Sequence[Geometry],
    n_trajectories: int,
    bases: Sequence[str] = ("Z",),
    traj_offset: int = 0,
    use_cluster_oracle: Optional[bool] = None,
) -> SampleAccumulator:
    """Sample MI and per-basis MIE over an ensemble of trajectories.

    Each trajectory equilibrates, then records every geometry once per
    sample layer with a full layer of decorrelation in between.  Keys in
    the returned accumulator are (geometry index, observable name).

    For the xzz model the GHZ-cluster representation is exact, so the
    high-volume path evolves clusters instead of the tableau (the
    equivalence is enforced separately by cross_validate); pass
    use_cluster_oracle=False to force the tableau engine.
    """
    if n_trajectories < 1:
        raise ValueError("n_trajectories must be >= 1")
    if use_cluster_oracle is None:
        use_cluster_oracle = spec.model == "xzz"
    if use_cluster_oracle and spec.model != "xzz":
        raise ValueError("cluster oracle only models xzz dynamics")
    acc = SampleAccumulator()
    for traj in range(traj_offset, traj_offset + n_trajectories):
        rng = _trajectory_rng(spec.seed, traj)
        if use_cluster_oracle:
            cl = FastClusters(spec.L)
            ab = [(np.asarray(g.sites_a, np.int64), np.asarray(g.sites_b, np.int64))
                  for g in geometries]
            for _ in range(spec.equilibration_layers):
                x_sites, zz_bonds = _xzz_layer_events(rng, spec.L, spec.p)
                _apply_xzz_layer_clusters(cl, x_sites, zz_bonds, spec.L)
            for _ in range(spec.sample_layers):
                for gi, (sa, sb) in enumerate(ab):
                    obs = cl.observables(sa, sb)
                    acc.add((gi, "mi"), obs.mi_bits)
                    if "Z" in bases or "z" in bases:
                        acc.add((gi, "mie_z"), obs.mie_z_bits)
                    if "X" in bases or "x" in bases:
                        acc.add((gi, "mie_x"), obs.mie_x_bits)
                x_sites, zz_bonds = _xzz_layer_events(rng, spec.L, spec.p)
                _apply_xzz_layer_clusters(cl, x_sites, zz_bonds, spec.L)
        else:
            t = StabilizerTableau.plus_state(spec.L, rng)
            _run_layers(t, spec, rng, spec.equilibration_layers)
            if spec.model == "clifford":
                # record immediately after a unitary layer, before the
                # measurement round, so fresh single-site measurements do
                # not suppress the entanglement being probed
                for k in range(spec.sample_layers):
                    _clifford_unitary_step(t, k & 1)
                    _record_tableau(t, geometries, bases, acc)
                    _clifford_measure_step(t, rng, spec.p)
            else:
                for _ in range(spec.sample_layers):
                    _record_tableau(t, geometries, bases, acc)
                    _run_layers(t, spec, rng, 1)
    return acc


# ---------------------------------------------------------------------------
# Dual-path validation (tableau engine vs cluster oracle)
# ---------------------------------------------------------------------------


@dataclass
class ValidationReport:
    trajectories: int
    comparisons: int
    mismatches: int
    first_mismatch: Optional[dict] = None

    def to_json_dict(self) -> dict:
        out = {
            "trajectories": self.trajectories,
            "comparisons": self.comparisons,
            "mismatches": self.mismatches,
        }
        if self.first_mismatch is not None:
            out["first_mismatch"] = self.first_mismatch
        return out


def cross_validate(
    spec: CircuitSpec,
    n_trajectories: int,
    geometries: Sequence[Geometry],
    strict: bool = True,
) -> ValidationReport:
    """Run identical xzz event streams through tableau and clusters.

    Every (layer, geometry) record must agree exactly on MI, MIE_X and
    MIE_Z.  With strict=True the first mismatch raises immediately.
    """
    if spec.model != "xzz":
        raise ValueError("cross_validate applies to the xzz model only")
    comparisons = 0
    mismatches = 0
    first = None
    for traj in range(n_trajectories):
        ev_rng = _trajectory_rng(spec.seed, traj)
        out_rng = np.random.default_rng([spec.seed, traj, 1])
        t = StabilizerTableau.plus_state(spec.L, out_rng)
        cl = ClusterPartition(spec.L)
        n_layers = spec.equilibration_layers + spec.sample_layers
        for layer in range(n_layers):
            x_sites, zz_bonds = _xzz_layer_events(ev_rng, spec.L, spec.p)
            _apply_xzz_layer(t, x_sites, zz_bonds, out_rng)
            _apply_xzz_layer_clusters(cl, x_sites, zz_bonds, spec.L)
            if layer < spec.equilibration_layers:
                continue
            for gi, geom in enumerate(geometries):
                a, b = geom.sites_a, geom.sites_b
                obs = cl.observables(a, b)
                engine = (t.mutual_information_bits(a, b),
                          t.mie_bits(a, b, "X"),
                          t.mie_bits(a, b, "Z"))
                oracle = (obs.mi_bits, obs.mie_x_bits, obs.mie_z_bits)
                comparisons += 1
                if engine != oracle:
                    mismatches += 1
                    if first is None:
                        first = {
                            "trajectory": traj, "layer": layer,
                            "geometry": gi, "engine": list(engine),
                            "oracle": list(oracle),
                        }
                    if strict:
                        raise AssertionError(
                            f"oracle mismatch at traj {traj}, layer {layer}, "
                            f"geometry {gi}: engine {engine} vs oracle {oracle}")
    return ValidationReport(n_trajectories, comparisons, mismatches, first)
