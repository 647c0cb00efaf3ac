"""Command-line surface: experiment orchestration and artifact output.

Subcommands: measure-only, mipt-clifford, ground-state, haar-hybrid,
structure, validate, fit.  Results go to <out>/results.csv with the
schema

    model,L,p,basis,x1,x2,x3,x4,eta,observable,mean,stderr,n_samples,seed,units

plus fits.json (power-law fits) and verdict.json (validate).  Exit
codes: 0 success, 2 malformed invocation, 3 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

CSV_FIELDS = ["model", "L", "p", "basis", "x1", "x2", "x3", "x4", "eta",
              "observable", "mean", "stderr", "n_samples", "seed", "units"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3


def _ensure_out(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _write_rows(out_dir: str, rows: List[dict]):
    path = os.path.join(out_dir, "results.csv")
    new = not os.path.exists(path)
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        if new:
            writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def _write_json(out_dir: str, name: str, payload):
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _parse_lengths(text: str, L: int) -> List[int]:
    if text:
        return [int(x) for x in text.split(",")]
    top = max(2, L // 16)
    return sorted(set([1, 2] + [ell for ell in range(3, top + 1)]))


def _fit_observables(rows: List[dict], window) -> List[dict]:
    from .stats import fit_power_law

    by_obs: Dict[str, List[Tuple[float, float, float]]] = {}
    for row in rows:
        key = row["observable"]
        mean = float(row["mean"])
        err = float(row["stderr"])
        weight = 1.0 / err**2 if err > 0 else 1.0
        by_obs.setdefault(key, []).append((float(row["eta"]), mean, weight))
    fits = []
    for obs, pts in sorted(by_obs.items()):
        try:
            fit = fit_power_law(pts, window)
        except ValueError as exc:
            fits.append({"observable": obs, "error": str(exc)})
            continue
        rec = fit.to_json_dict()
        rec["observable"] = obs
        fits.append(rec)
    return fits


# ---------------------------------------------------------------------------
# Circuit-ensemble commands
# ---------------------------------------------------------------------------


def _ensemble_rows(spec, geometries, acc, bases, units: str) -> List[dict]:
    rows = []
    for gi, geom in enumerate(geometries):
        observables = ["mi"] + [f"mie_{b.lower()}" for b in bases]
        for obs in observables:
            key = (gi, obs)
            if key not in set(acc.keys()):
                continue
            basis = obs[4:] if obs.startswith("mie_") else "na"
            rows.append({
                "model": spec.model, "L": spec.L, "p": spec.p,
                "basis": basis,
                "x1": geom.x1, "x2": geom.x2, "x3": geom.x3, "x4": geom.x4,
                "eta": f"{geom.eta:.10g}",
                "observable": obs,
                "mean": f"{acc.mean(key):.10g}",
                "stderr": f"{acc.stderr(key):.10g}",
                "n_samples": acc.count(key),
                "seed": spec.seed,
                "units": units,
            })
    return rows


def cmd_measure_only(args) -> int:
    from .circuits import CircuitSpec, antipodal_family, sample_ensemble

    spec = CircuitSpec(args.model, args.L, args.p, seed=args.seed,
                       t_equilibrate=args.equilibrate, t_sample=args.layers)
    lengths = _parse_lengths(args.lengths, args.L)
    geometries = antipodal_family(args.L, lengths)
    bases = [b.strip().upper() for b in args.basis.split(",")]
    n_layers = spec.sample_layers
    n_traj = max(1, math.ceil(args.samples / n_layers))
    acc = sample_ensemble(spec, geometries, n_traj, bases)
    out = _ensure_out(args.out)
    rows = _ensemble_rows(spec, geometries, acc, bases, "bits")
    _write_rows(out, rows)
    window = tuple(args.window) if args.window else None
    fits = _fit_observables(rows, window)
    _write_json(out, "fits.json", fits)
    for fit in fits:
        if "exponent" in fit:
            print(f"{fit['observable']}: exponent {fit['exponent']:+.4f} "
                  f"+- {fit['exponent_stderr']:.4f} (r2={fit['r_squared']:.4f})")
        else:
            print(f"{fit['observable']}: {fit['error']}")
    return EXIT_OK


def cmd_mipt_clifford(args) -> int:
    args.model = "clifford"
    args.basis = "z"
    return cmd_measure_only(args)


def cmd_haar_hybrid(args) -> int:
    from .circuits import antipodal_family
    from .statevector import haar_hybrid_trajectory, mie_exact, entanglement_entropy_nats
    from .stats import SampleAccumulator

    L = args.L
    lengths = _parse_lengths(args.lengths, L) if args.lengths else [1, 2, 3]
    lengths = [ell for ell in lengths if ell <= L // 4]
    geometries = antipodal_family(L, lengths)
    t_layers = args.layers if args.layers else 2 * L
    acc = SampleAccumulator()
    for traj in range(args.samples):
        rng = np.random.default_rng([args.seed, traj])
        state = haar_hybrid_trajectory(L, args.p, t_layers, rng)
        for gi, geom in enumerate(geometries):
            a, b = geom.sites_a, geom.sites_b
            acc.add((gi, "mie_z"), mie_exact(state, a, b, "Z")["mie"])
            sa = entanglement_entropy_nats(state, a)
            sb = entanglement_entropy_nats(state, b)
            sab = entanglement_entropy_nats(state, a + b)
            acc.add((gi, "mi"), sa + sb - sab)
    out = _ensure_out(args.out)
    from types import SimpleNamespace
    spec = SimpleNamespace(model="haar", L=L, p=args.p, seed=args.seed)
    rows = _ensemble_rows(spec, geometries, acc, ["Z"], "nats")
    _write_rows(out, rows)
    window = tuple(args.window) if args.window else None
    fits = _fit_observables(rows, window)
    _write_json(out, "fits.json", fits)
    for fit in fits:
        if "exponent" in fit:
            print(f"{fit['observable']}: exponent {fit['exponent']:+.4f} "
                  f"+- {fit['exponent_stderr']:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Ground-state command
# ---------------------------------------------------------------------------

_GS_MODELS = ("ising", "obrien-fendley", "potts3", "gspt")


def cmd_ground_state(args) -> int:
    from . import statevector as sv

    L = args.L
    if args.model == "ising":
        spec = sv.ising_critical(L)
    elif args.model == "obrien-fendley":
        spec = sv.obrien_fendley(L, args.coupling)
    elif args.model == "potts3":
        spec = sv.potts3(L)
    else:
        spec = sv.gapless_spt(L)
    state, energy = sv.ground_state(spec, tol=args.tol)
    n = spec.n_sites
    out = _ensure_out(args.out)
    resid = float(np.linalg.norm(
        sv.apply_hamiltonian(spec, state.amplitudes) - energy * state.amplitudes))
    _write_json(out, "ground_state.json", {
        "model": args.model, "L": L, "n_sites": n,
        "energy": energy, "converged_residual": resid,
        "sign_free": sv.state_is_sign_free(state) if spec.local_dim == 2 else None,
    })
    basis = args.basis.upper()
    seps = ([int(x) for x in args.separations.split(",")]
            if args.separations else list(range(1, n // 2 + 1)))
    if args.model == "gspt":
        site_of = lambda j: 2 * j  # sigma sublattice by default
        ring = L
    else:
        site_of = lambda j: j
        ring = n
    rows = []
    for sep in seps:
        a, b = site_of(0), site_of(sep % ring)
        mie = sv.mie_exact(state, [a], [b], basis)["mie"]
        sa = sv.entanglement_entropy_nats(state, [a])
        sb = sv.entanglement_entropy_nats(state, [b])
        sab = sv.entanglement_entropy_nats(state, [a, b])
        base = {
            "model": args.model, "L": L, "p": "", "basis": basis.lower(),
            "x1": a, "x2": a + 1, "x3": b, "x4": b + 1,
            "eta": f"{_sep_eta(a, b, n):.10g}",
            "n_samples": 1, "seed": args.seed, "units": "nats",
        }
        rows.append({**base, "observable": f"mie_{basis.lower()}",
                     "mean": f"{mie:.10g}", "stderr": 0.0})
        rows.append({**base, "observable": "mi", "basis": "na",
                     "mean": f"{sa + sb - sab:.10g}", "stderr": 0.0})
        if spec.local_dim == 2:
            xx = sv.correlator(state, "X", a, "X", b)
            rows.append({**base, "observable": "xx", "basis": "na",
                         "mean": f"{xx:.10g}", "stderr": 0.0})
    _write_rows(out, rows)
    if args.histogram_separation is not None:
        sep = args.histogram_separation
        a, b = site_of(0), site_of(sep % ring)
        hist = sv.mie_exact(state, [a], [b], basis)["histogram"]
        _write_histogram(out, hist, args.histogram_bins)
    print(f"{args.model} L={L}: E = {energy:.8f}, residual {resid:.2e}")
    return EXIT_OK


def _sep_eta(a: int, b: int, n: int) -> float:
    from .circuits import cross_ratio
    return cross_ratio(a, a + 1, b, b + 1, n)


def _write_histogram(out_dir: str, hist, n_bins: int):
    ents = np.array([h[0] for h in hist])
    probs = np.array([h[1] for h in hist])
    lo, hi = 0.0, max(float(ents.max()) * 1.05, 1e-6)
    edges = np.linspace(lo, hi, n_bins + 1)
    density, _ = np.histogram(ents, bins=edges, weights=probs, density=True)
    path = os.path.join(out_dir, "mie_histogram.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["entropy_bin_lo", "entropy_bin_hi", "probability_density"])
        for k in range(n_bins):
            writer.writerow([f"{edges[k]:.10g}", f"{edges[k + 1]:.10g}",
                             f"{density[k]:.10g}"])
    # companion metadata so the figure layer can cite the exact mean
    mean = float((ents * probs).sum())
    with open(os.path.join(out_dir, "mie_histogram.json"), "w") as fh:
        json.dump({"mean": mean, "n_outcomes": len(hist)}, fh, indent=2)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# Structure and validation commands
# ---------------------------------------------------------------------------


def cmd_structure(args) -> int:
    from .css import structure_counts
    from .tableau import StabilizerTableau

    if args.tableau:
        with open(args.tableau) as fh:
            t = StabilizerTableau.from_text(fh.read())
    else:
        from .random_states import random_css_tableau
        t = random_css_tableau(args.L, np.random.default_rng(args.seed))
    n = t.n_qubits
    if args.regions:
        parts = [[int(x) for x in chunk.split(",")]
                 for chunk in args.regions.split(";")]
        if len(parts) != 3:
            print("error: --regions needs three ;-separated site lists",
                  file=sys.stderr)
            return EXIT_USAGE
        a, b, c = parts
    else:
        third = n // 3
        a = list(range(third))
        b = list(range(third, 2 * third))
        c = list(range(2 * third, n))
    counts = structure_counts(t, a, b, c)
    out = _ensure_out(args.out)
    payload = counts.to_json_dict()
    payload["n_qubits"] = n
    _write_json(out, "structure.json", payload)
    print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def cmd_validate(args) -> int:
    out = _ensure_out(args.out)
    if args.suite == "percolation":
        from .circuits import CircuitSpec, antipodal_family, cross_validate

        spec = CircuitSpec("xzz", args.L, args.p, seed=args.seed,
                           t_equilibrate=args.equilibrate or args.L,
                           t_sample=args.layers or args.L)
        lengths = [ell for ell in (1, 2, 3, args.L // 8) if ell >= 1]
        geometries = antipodal_family(args.L, sorted(set(lengths)))
        try:
            report = cross_validate(spec, args.samples, geometries, strict=False)
        except AssertionError as exc:
            _write_json(out, "verdict.json", {"suite": "percolation",
                                              "error": str(exc)})
            print(f"validation failure: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        payload = report.to_json_dict()
        payload["suite"] = "percolation"
        _write_json(out, "verdict.json", payload)
        print(json.dumps(payload, sort_keys=True))
        return EXIT_OK if report.mismatches == 0 else EXIT_VALIDATION
    if args.suite == "bound":
        from .random_states import random_css_tableau, random_tripartition
        from .css import check_mie_mi_bound

        rng = np.random.default_rng(args.seed)
        checked = violations = 0
        for _ in range(args.samples):
            t = random_css_tableau(args.L, rng)
            a, b, _c = random_tripartition(t.n_qubits, rng)
            rep = check_mie_mi_bound(t, a, b)
            checked += 1
            if not rep.holds:
                violations += 1
        payload = {"suite": "bound", "checked": checked,
                   "violations": violations}
        _write_json(out, "verdict.json", payload)
        print(json.dumps(payload, sort_keys=True))
        return EXIT_OK if violations == 0 else EXIT_VALIDATION
    print(f"error: unknown suite {args.suite}", file=sys.stderr)
    return EXIT_USAGE


def cmd_fit(args) -> int:
    from .stats import fit_power_law

    with open(args.input) as fh:
        rows = list(csv.DictReader(fh))
    pts = []
    for row in rows:
        if row["observable"] != args.observable:
            continue
        x = float(row[args.abscissa])
        y = float(row["mean"])
        err = float(row["stderr"])
        w = 1.0 / err**2 if err > 0 else 1.0
        pts.append((x, y, w))
    window = tuple(args.window) if args.window else None
    try:
        fit = fit_power_law(pts, window)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rec = fit.to_json_dict()
    rec["observable"] = args.observable
    out = _ensure_out(args.out)
    _write_json(out, "fits.json", [rec])
    print(f"{args.observable}: exponent {fit.exponent:+.4f} "
          f"+- {fit.exponent_stderr:.4f} (r2={fit.r_squared:.4f})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sp, L=64, p=0.5):
    sp.add_argument("--L", type=int, default=L)
    sp.add_argument("--p", type=float, default=p)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--out", default="mielab_out")
    sp.add_argument("--config", default=None,
                    help="JSON file of flag defaults (flat key/value)")
    sp.add_argument("--window", type=float, nargs=2, default=None,
                    metavar=("LO", "HI"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mielab",
        description="measurement-induced entanglement experiments")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("measure-only", help="xzz / xxziz measurement circuits")
    _add_common(sp)
    sp.add_argument("--model", choices=("xzz", "xxziz"), default="xzz")
    sp.add_argument("--basis", default="z,x",
                    help="comma-separated MIE bases (z, x)")
    sp.add_argument("--lengths", default="",
                    help="comma-separated interval lengths")
    sp.add_argument("--equilibrate", type=int, default=None)
    sp.add_argument("--layers", type=int, default=None)
    sp.set_defaults(func=cmd_measure_only)

    sp = sub.add_parser("mipt-clifford", help="Clifford hybrid circuit")
    _add_common(sp, L=192, p=0.16)
    sp.add_argument("--lengths", default="")
    sp.add_argument("--equilibrate", type=int, default=None)
    sp.add_argument("--layers", type=int, default=None)
    sp.set_defaults(func=cmd_mipt_clifford)

    sp = sub.add_parser("ground-state", help="critical-chain ground states")
    _add_common(sp, L=12)
    sp.add_argument("--model", choices=_GS_MODELS, default="ising")
    sp.add_argument("--basis", default="z", help="z, x (qubits) / u, v (qutrits)")
    sp.add_argument("--coupling", type=float, default=0.428)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--separations", default="")
    sp.add_argument("--histogram-separation", type=int, default=None)
    sp.add_argument("--histogram-bins", type=int, default=40)
    sp.set_defaults(func=cmd_ground_state)

    sp = sub.add_parser("haar-hybrid", help="dense Haar hybrid circuit")
    _add_common(sp, L=16, p=0.17)
    sp.add_argument("--lengths", default="")
    sp.add_argument("--layers", type=int, default=None)
    sp.set_defaults(func=cmd_haar_hybrid)

    sp = sub.add_parser("structure", help="tripartite structure counts")
    _add_common(sp, L=12)
    sp.add_argument("--tableau", default=None,
                    help="tableau text file (default: random CSS state)")
    sp.add_argument("--regions", default=None,
                    help="three ;-separated comma lists of sites")
    sp.set_defaults(func=cmd_structure)

    sp = sub.add_parser("validate", help="oracle and bound validation suites")
    _add_common(sp, L=16)
    sp.add_argument("--suite", choices=("percolation", "bound"),
                    default="percolation")
    sp.add_argument("--equilibrate", type=int, default=None)
    sp.add_argument("--layers", type=int, default=None)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("fit", help="power-law fit of a results.csv column")
    sp.add_argument("--input", required=True)
    sp.add_argument("--observable", required=True)
    sp.add_argument("--abscissa", default="eta")
    sp.add_argument("--out", default="mielab_out")
    sp.add_argument("--window", type=float, nargs=2, default=None)
    sp.set_defaults(func=cmd_fit)
    return ap


def _apply_config(args: argparse.Namespace):
    cfg_path = getattr(args, "config", None)
    if not cfg_path:
        return
    with open(cfg_path) as fh:
        cfg = json.load(fh)
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr):
            setattr(args, attr, value)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
