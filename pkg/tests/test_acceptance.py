"""The twelve acceptance criteria at their stated tolerances, one test each."""
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from laplace_carleson.cli import main
from laplace_carleson.counterexamples import grid_search, infeasibility_certificate
from laplace_carleson.embeddings import classify_region, default_family
from laplace_carleson.littlewood_paley import (besov_refinement_check, default_family as lp_family,
                                               hl_weighted_check, optimality_scaling_check,
                                               triebel_norm)
from laplace_carleson.measures import CarlesonBox, SquaresAtHeightOne, carleson_sup
from laplace_carleson.signals import BandLimited, Gaussian, lp_norm
from laplace_carleson.spaces import hardy_norm
from laplace_carleson.theorems import region_grid, run_theorem

# high-resolution oracle (2^20 nodes on [-1024, 1024), k in [-8, 10]) gives 0.2525089;
# the threshold keeps a 1% margin
ANNULUS_ORACLE = 0.2525089
ANNULUS_THRESHOLD = 1.01 * ANNULUS_ORACLE


def test_01_paley_wiener_anchor(criterion):
    fam = default_family(0, 20)
    t0 = time.perf_counter()
    ratios = [hardy_norm(f, 2.0).value / lp_norm(f, 2.0).value for _, f in fam]
    elapsed = time.perf_counter() - t0
    lo, hi = min(ratios), max(ratios)
    ok = 1 - 1e-3 <= lo and hi <= 1.0 and elapsed < 10
    assert criterion(1, ok, f"Hardy/L2 ratios in [{lo:.6f}, {hi:.9f}] over 20 functions, "
                            f"{elapsed:.2f} s")


def test_02_hardy_littlewood_gaussian(criterion):
    r = hl_weighted_check(Gaussian((0.0,), 1.0), 4, "radial")
    dev = abs(r / (8 * math.pi) - 1)
    assert criterion(2, dev < 1e-4, f"ratio {r:.8f} vs 8 pi, relative deviation {dev:.2e}")


def test_03_plancherel_anchors(criterion):
    fam = lp_family(1)
    hl_dev, tl_dev = 0.0, 0.0
    for seed in range(50):
        f = BandLimited(seed)
        hl_dev = max(hl_dev, abs(hl_weighted_check(f, 2) - 1))
        tl_dev = max(tl_dev, abs(triebel_norm(f, fam, 2, 2, 0).value / f.l2_norm() - 1))
    ok = hl_dev < 1e-10 and tl_dev < 1e-8
    assert criterion(3, ok, f"p=2 weighted ratio deviation {hl_dev:.2e}, "
                            f"Triebel/L2 deviation {tl_dev:.2e} over 50 signals")


@pytest.mark.slow
def test_04_bergman_campaign(criterion):
    t0 = time.perf_counter()
    rep, _ = run_theorem("1.2", p=4.0, q=4.0, levels=(10, 11))
    elapsed = time.perf_counter() - t0
    ok = (len(rep.rows) == 100 and math.isfinite(rep.sup_ratio) and rep.drift < 0.1
          and elapsed < 300)
    assert criterion(4, ok, f"sup ratio {rep.sup_ratio:.6g}, drift {rep.drift:.2e} between "
                            f"levels 10 and 11 over {len(rep.rows)} functions, {elapsed:.1f} s")


def test_05_disk_campaign(criterion):
    rep, _ = run_theorem("1.4", p=4.0, q=4.0, coeff_len=64, n=200)
    ok = len(rep.rows) == 200 and math.isfinite(rep.sup_ratio) and rep.drift < 0.1
    assert criterion(5, ok, f"sup ratio {rep.sup_ratio:.6g}, drift {rep.drift:.2e} "
                            f"over {len(rep.rows)} sequences")


@pytest.mark.slow
def test_06_besov_constant(criterion):
    worst = 0.0
    for p in (1.25, 1.5, 2.0):
        for seed in range(100):
            worst = max(worst, besov_refinement_check(BandLimited(seed), p).ratio)
    assert criterion(6, worst <= 1 + 1e-6,
                     f"max homogeneous ratio {worst:.8f} over 300 (signal, p) pairs")


def brute_count(N, a, b):
    if b - a < 1:
        return 0
    return sum(1 for n in range(1, N + 1) if a <= n * n <= b)


def test_07_carleson_combinatorics(criterion):
    mu = SquaresAtHeightOne(100)
    g = np.random.default_rng(2024)
    mismatches = 0
    for _ in range(1000):
        a = g.uniform(-10, 10100)
        b = a + g.choice([g.uniform(0, 1.5), g.uniform(0, 100), g.uniform(0, 10000)])
        if b <= a:
            b = a + 1e-9
        if mu.box_mass(CarlesonBox(a, b)) != brute_count(100, a, b):
            mismatches += 1
    rep = carleson_sup(mu, 0.5)
    sup_ok = abs(rep.sup_ratio - 2 / math.sqrt(3)) <= 1e-9
    arg_ok = (rep.argmax.a, rep.argmax.b) == (1.0, 4.0)
    ok = mismatches == 0 and sup_ok and arg_ok
    assert criterion(7, ok, f"{mismatches} count mismatches in 1000 intervals; sup "
                            f"{rep.sup_ratio:.12f} at [{rep.argmax.a:g}, {rep.argmax.b:g}]")


def test_08_infeasibility_lattice(criterion):
    caps = [0.5 * k for k in range(1, 11)]
    bad = []
    for N in range(1, 21):
        for c0 in caps:
            for c1 in caps:
                cert = infeasibility_certificate(N, c0, c1, search=False)
                if N > c0 * c1:
                    if cert["status"] != "infeasible":
                        bad.append((N, c0, c1))
                else:
                    w = grid_search(N, c0, c1, random_profiles=0)
                    if cert["status"] != "unknown" or w is None or w["family"] != "uniform" \
                            or not (w["C0"] <= c0 and w["C1"] <= c1):
                        bad.append((N, c0, c1))
    assert criterion(8, not bad, f"{2000 - len(bad)}/2000 lattice points behave as required")


def test_09_optimality_identity(criterion):
    worst = 0.0
    for r in (1.5, 2.0, 3.0):
        dev = optimality_scaling_check(ns=(0, 1, -1, 2, -2, 3, -3), r=r, dim=1)
        worst = max(worst, max(dev.values()))
    assert criterion(9, worst < 1e-6, f"max relative deviation {worst:.2e}")


def test_10_annulus_decay(criterion):
    rep, _ = run_theorem("annulus", p=4.0)
    vals = [r["target_norm"] for r in rep.rows]
    ratio = rep.extra["final_over_initial"]
    ok = rep.extra["strictly_decreasing"] and ratio < ANNULUS_THRESHOLD
    assert criterion(10, ok, f"Sobolev column {[round(v, 5) for v in vals]}, final/initial "
                             f"{ratio:.6f} < {ANNULUS_THRESHOLD:.6f}")


def test_11_region_classifier(criterion):
    def expected(i, j):
        # lattice point (i/100, j/100) in exact arithmetic
        u, v = Fraction(i, 100), Fraction(j, 100)
        if v > u:
            return "IV"
        if u < Fraction(1, 2):
            return "II"
        return "I" if v <= 1 - u else "III"

    rows = region_grid(99)
    want = [expected(i, j) for i in range(1, 100) for j in range(1, 100)]
    wrong = sum(1 for (_, _, lab), w in zip(rows, want) if lab != w)
    corners = {(1.5, 3): "I", (4, 4): "II", (1.5, 2): "III", (3, 2): "IV"}
    corner_ok = all(classify_region(*pq) == lab for pq, lab in corners.items())
    ok = len(rows) == 99 * 99 and wrong == 0 and corner_ok
    assert criterion(11, ok, f"{wrong} mismatches on the 99x99 grid; corner cases "
                             f"{'match' if corner_ok else 'differ'}")


def _cli_json(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    d = json.loads(out)
    d.pop("timestamp")
    return code, json.dumps(d, sort_keys=True, indent=2)


def test_12_determinism(criterion, capsys, tmp_path):
    path = tmp_path / "squares.json"
    path.write_text(json.dumps({"kind": "squares", "n": 100}))
    runs = [["verify", "1.2", "--p", "4", "--q", "4", "--n", "12", "--levels", "9", "10"],
            ["verify", "1.1", "--n", "12"],
            ["verify", "1.4", "--n", "30"],
            ["verify", "1.10", "--n", "6", "--seed", "3"],
            ["counterexample", "--n", "3", "--caps", "2", "2", "--seed", "5"],
            ["carleson", str(path), "--beta", "0.5"]]
    differing = []
    for argv in runs:
        a = _cli_json(argv, capsys)
        b = _cli_json(argv, capsys)
        if a != b or a[0] != 0:
            differing.append(argv[:2])
    assert criterion(12, not differing, f"{len(runs) - len(differing)}/{len(runs)} campaigns "
                                        "byte-identical across repeats (timestamp removed)")
