import csv
import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mielab.cli import CSV_FIELDS, main
from mielab.stats import SampleAccumulator, fit_power_law


class TestAccumulator:
    def test_basic_moments(self):
        acc = SampleAccumulator()
        for v in (1.0, 2.0, 3.0, 4.0):
            acc.add("k", v)
        assert acc.count("k") == 4
        assert acc.mean("k") == pytest.approx(2.5)
        # sample stdev of 1,2,3,4 is sqrt(5/3)
        assert acc.stderr("k") == pytest.approx(math.sqrt(5.0 / 3.0) / 2.0)

    def test_single_sample_stderr(self):
        acc = SampleAccumulator()
        acc.add("k", 7.0)
        assert acc.stderr("k") == 0.0

    def test_merge_is_out_of_place(self):
        a, b = SampleAccumulator(), SampleAccumulator()
        a.add("k", 1.0)
        b.add("k", 3.0)
        c = a.merge(b)
        assert a.count("k") == 1 and c.count("k") == 2
        assert c.mean("k") == pytest.approx(2.0)

    def test_bernoulli_stderr(self):
        rng = np.random.default_rng(0)
        acc = SampleAccumulator()
        draws = rng.random(4000) < 0.3
        for v in draws:
            acc.add("p", float(v))
        p_hat = acc.mean("p")
        expected = math.sqrt(p_hat * (1 - p_hat) / 4000)
        assert acc.stderr("p") == pytest.approx(expected, rel=1e-3)

    @given(st.lists(st.lists(st.floats(-100, 100), min_size=1, max_size=20),
                    min_size=2, max_size=5))
    @settings(max_examples=100, deadline=None)
    def test_merge_matches_pooled(self, shards):
        pooled = SampleAccumulator()
        parts = []
        for shard in shards:
            part = SampleAccumulator()
            for v in shard:
                part.add("k", v)
                pooled.add("k", v)
            parts.append(part)
        merged = parts[0]
        for part in parts[1:]:
            merged = merged.merge(part)
        assert merged.count("k") == pooled.count("k")
        assert merged.mean("k") == pytest.approx(pooled.mean("k"), abs=1e-9)
        assert merged.stderr("k") == pytest.approx(pooled.stderr("k"), abs=1e-9)


class TestPowerLawFit:
    def test_exact_power_law(self):
        pts = [(x, 3.0 * x**1.5, 1.0) for x in (0.01, 0.05, 0.1, 0.3, 0.8)]
        fit = fit_power_law(pts)
        assert fit.exponent == pytest.approx(1.5, abs=1e-12)
        assert fit.amplitude == pytest.approx(3.0, rel=1e-12)
        assert fit.r_squared == pytest.approx(1.0)

    def test_synthetic_noise_recovers_slope(self):
        rng = np.random.default_rng(42)
        xs = np.geomspace(0.01, 0.5, 12)
        hits = 0
        for trial in range(50):
            ys = 2.0 * xs**0.7 * np.exp(rng.normal(0, 0.05, xs.size))
            fit = fit_power_law([(x, y, 1.0) for x, y in zip(xs, ys)])
            if abs(fit.exponent - 0.7) < 2 * fit.exponent_stderr:
                hits += 1
        assert hits >= 40

    def test_window_and_exclusions(self):
        pts = [(0.001, 5.0, 1.0)] + [
            (x, 2.0 * x**1.0, 1.0) for x in (0.02, 0.05, 0.1, 0.2, 0.4)]
        fit = fit_power_law(pts, window=(0.01, 1.0))
        assert fit.exponent == pytest.approx(1.0, abs=1e-12)
        assert fit.n_points == 5
        fit2 = fit_power_law(pts + [(0.3, 0.0, 1.0)], window=(0.01, 1.0))
        assert fit2.n_excluded == 1

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_power_law([(0.1, 1.0, 1.0), (0.2, 2.0, 1.0)])

    def test_nonpositive_abscissa(self):
        with pytest.raises(ValueError):
            fit_power_law([(-0.1, 1.0, 1.0)] * 5)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestCli:
    def test_measure_only_artifacts(self, tmp_path):
        out = tmp_path / "run"
        rc = main(["measure-only", "--model", "xzz", "--L", "16", "--p", "0.5",
                   "--seed", "3", "--samples", "64", "--lengths", "2,3,4,5",
                   "--equilibrate", "16", "--layers", "16",
                   "--out", str(out)])
        assert rc == 0
        rows = read_csv(out / "results.csv")
        assert rows and list(rows[0].keys()) == CSV_FIELDS
        assert {r["observable"] for r in rows} == {"mi", "mie_z", "mie_x"}
        assert all(r["units"] == "bits" for r in rows)
        assert all(int(r["n_samples"]) >= 64 for r in rows)
        fits = json.loads((out / "fits.json").read_text())
        assert isinstance(fits, list)

    def test_results_append_and_determinism(self, tmp_path):
        out = tmp_path / "run"
        argv = ["measure-only", "--L", "16", "--p", "0.5", "--seed", "9",
                "--samples", "32", "--lengths", "2,3", "--equilibrate", "8",
                "--layers", "8", "--out", str(out)]
        assert main(argv) == 0
        first = read_csv(out / "results.csv")
        assert main(argv) == 0
        both = read_csv(out / "results.csv")
        assert len(both) == 2 * len(first)
        assert both[:len(first)] == both[len(first):]

    def test_ground_state_command(self, tmp_path):
        out = tmp_path / "gs"
        rc = main(["ground-state", "--model", "ising", "--L", "8",
                   "--separations", "2,3,4", "--basis", "z",
                   "--histogram-separation", "4", "--out", str(out)])
        assert rc == 0
        meta = json.loads((out / "ground_state.json").read_text())
        assert meta["L"] == 8
        rows = read_csv(out / "results.csv")
        assert any(r["observable"] == "mie_z" for r in rows)
        assert any(r["observable"] == "xx" for r in rows)
        assert all(r["units"] == "nats" for r in rows)
        assert (out / "mie_histogram.csv").exists()

    def test_structure_command(self, tmp_path):
        out = tmp_path / "st"
        rc = main(["structure", "--L", "9", "--seed", "4",
                   "--regions", "0,1,2;3,4,5;6,7,8", "--out", str(out)])
        assert rc == 0
        payload = json.loads((out / "structure.json").read_text())
        for key in ("g", "g_prime", "e_ab", "n_qubits"):
            assert key in payload

    def test_validate_percolation(self, tmp_path):
        out = tmp_path / "val"
        rc = main(["validate", "--suite", "percolation", "--L", "16",
                   "--p", "0.5", "--seed", "1", "--samples", "2",
                   "--equilibrate", "8", "--layers", "8", "--out", str(out)])
        assert rc == 0
        verdict = json.loads((out / "verdict.json").read_text())
        assert verdict["mismatches"] == 0

    def test_validate_bound(self, tmp_path):
        out = tmp_path / "valb"
        rc = main(["validate", "--suite", "bound", "--L", "10",
                   "--seed", "2", "--samples", "50", "--out", str(out)])
        assert rc == 0

    def test_fit_subcommand(self, tmp_path):
        out = tmp_path / "run"
        main(["measure-only", "--L", "32", "--p", "0.5", "--seed", "5",
              "--samples", "200", "--lengths", "2,3,4,6,8", "--equilibrate",
              "32", "--layers", "32", "--out", str(out)])
        rc = main(["fit", "--input", str(out / "results.csv"),
                   "--observable", "mi", "--out", str(out / "fit")])
        assert rc == 0
        fits = json.loads((out / "fit" / "fits.json").read_text())
        assert fits and "exponent" in fits[0]

    def test_config_overrides(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"L": 16, "p": 0.5, "samples": 16,
                                   "lengths": "2,3", "equilibrate": 8,
                                   "layers": 8}))
        out = tmp_path / "run"
        rc = main(["measure-only", "--config", str(cfg), "--out", str(out)])
        assert rc == 0
        rows = read_csv(out / "results.csv")
        assert all(r["L"] == "16" for r in rows)

    def test_usage_errors(self, tmp_path):
        assert main(["measure-only", "--L", "7",
                     "--out", str(tmp_path / "x")]) == 2
        assert main(["measure-only", "--p", "1.5",
                     "--out", str(tmp_path / "y")]) == 2
        assert main(["fit", "--input", str(tmp_path / "missing.csv"),
                     "--observable", "mi",
                     "--out", str(tmp_path / "z")]) == 2

    def test_structure_bad_regions(self, tmp_path):
        rc = main(["structure", "--L", "6", "--regions", "0,1;1,2;3",
                   "--out", str(tmp_path / "bad")])
        assert rc == 2
