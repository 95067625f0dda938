"""Exit criteria. Each test prints one ``[ACCEPTANCE] PASS|FAIL`` line.

Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import itertools
import math
import time
from decimal import ROUND_HALF_UP, Decimal

import numpy as np
import pytest

from domprod.bench import kernel_sanity
from domprod.distprod import (closest_pair_integer, maxplus_encoded, maxplus_naive,
                              minplus_encoded, minplus_naive)
from domprod.dominance import dominance_blocked, dominance_naive
from domprod.exponents import ANCHORS, LINEAR_FORMS, predict_exponent
from domprod.geometry import PointSet, generate_points, linf_distance
from domprod.linf import (SearchTrace, closest_pair_bruteforce, closest_pair_deterministic,
                          closest_pair_randomized, pairs_within)

from conftest import brute_pairs, with_duplicates

pytestmark = pytest.mark.acceptance


@pytest.fixture
def verdict(capsys):
    def report(name, ok, detail):
        with capsys.disabled():
            print(f"\n[ACCEPTANCE] {'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail
    return report


def _dominance_instances():
    ns = (2, 3, 17, 64, 200)
    ds = (1, 2, 16, 128)
    domains = ("real", "int")
    ss = ("1", "auto", "n")
    kernels = ("naive", "bitpack", "strassen:16")
    grid = list(itertools.product(ns, ds, domains, ss, kernels))
    rng = np.random.default_rng(2024)
    # every (n, d, domain, s) cell once, then 80 more cells with a second kernel
    base = {}
    for n, d, dom, s, k in grid:
        base.setdefault((n, d, dom, s), []).append(k)
    chosen = []
    for i, (key, ks) in enumerate(sorted(base.items())):
        chosen.append(key + (ks[i % 3],))
    extra = [key + (ks[(i + 1) % 3],) for i, (key, ks) in enumerate(sorted(base.items()))]
    picks = rng.choice(len(extra), size=200 - len(chosen), replace=False)
    chosen += [extra[p] for p in sorted(picks)]
    return chosen


def _points(n, d, domain, seed):
    rng = np.random.default_rng(seed)
    if domain == "int":
        coords = rng.integers(-5, 6, size=(n, d))
        return PointSet(with_duplicates(rng, coords), "int", 5)
    return PointSet(with_duplicates(rng, rng.normal(size=(n, d))))


@pytest.fixture(scope="module")
def dominance_runs():
    instances = _dominance_instances()
    t0 = time.perf_counter()
    mismatches, complement_bad, checked = [], [], 0
    for idx, (n, d, domain, s, kernel) in enumerate(instances):
        pts = _points(n, d, domain, idx)
        plan = {"1": 1, "n": n, "auto": "auto"}[s]
        got = {}
        for mode in ("LE", "LT", "EQ"):
            got[mode] = dominance_blocked(pts, plan, kernel, mode)
            if not np.array_equal(got[mode], dominance_naive(pts, mode)):
                mismatches.append((n, d, domain, s, kernel, mode))
        if not np.all(got["LE"] + got["LT"].T == d):
            complement_bad.append((n, d, domain, s, kernel))
        checked += 1
    return {"instances": instances, "checked": checked, "mismatches": mismatches,
            "complement_bad": complement_bad, "seconds": time.perf_counter() - t0}


def test_dominance_oracle_equivalence(dominance_runs, verdict):
    inst = dominance_runs["instances"]
    coverage = all(
        {x[i] for x in inst} == set(vals) for i, vals in enumerate(
            [(2, 3, 17, 64, 200), (1, 2, 16, 128), ("real", "int"), ("1", "auto", "n"),
             ("naive", "bitpack", "strassen:16")]))
    secs = dominance_runs["seconds"]
    ok = (dominance_runs["checked"] == 200 and not dominance_runs["mismatches"]
          and coverage and secs < 60)
    verdict("dominance oracle equivalence", ok,
            f"{dominance_runs['checked']} instances x 3 modes, "
            f"{len(dominance_runs['mismatches'])} mismatches, coverage={coverage}, {secs:.1f}s")


def test_complementarity(dominance_runs, verdict):
    bad = dominance_runs["complement_bad"]
    verdict("complementarity D_LE + D_LT^T = d", not bad,
            f"{dominance_runs['checked']} instances, {len(bad)} violations")


def test_decision_correctness(verdict):
    rng = np.random.default_rng(77)
    kernels = ("naive", "bitpack", "strassen:16")
    failures, boundary = [], 0
    for idx in range(100):
        n = int(rng.integers(2, 60))
        d = int(rng.integers(1, 20))
        if idx % 2:
            pts = PointSet(with_duplicates(rng, rng.integers(-9, 10, size=(n, d))), "int", 9)
        else:
            pts = PointSet(rng.uniform(-3, 3, size=(n, d)))
        c = pts.coords
        choice = idx % 4
        if choice < 3:
            i, j = sorted(rng.choice(n, size=2, replace=False))
            delta = linf_distance(c[i], c[j])
            boundary += 1
        else:
            delta = float(rng.uniform(0, 4))
        kernel = kernels[idx % 3]
        plan = ("auto", 1, max(1, n // 3))[idx % 3]
        for strict in (False, True):
            got = pairs_within(pts, delta, strict, kernel, plan).pairs
            if got != brute_pairs(c, delta, strict):
                failures.append((idx, strict))
    verdict("decision correctness", not failures,
            f"100 instances ({boundary} at an existing distance) x strict/non-strict, "
            f"{len(failures)} set mismatches")


def test_optimizer_agreement(verdict):
    rng = np.random.default_rng(5)
    problems = []
    zero_seen = False
    for idx in range(50):
        n = int(rng.integers(2, 48))
        d = int(rng.integers(1, 12))
        if idx % 2:
            M = int(rng.integers(1, 40))
            coords = rng.integers(-M, M + 1, size=(n, d))
            if idx == 1:
                coords[-1] = coords[0]
            pts = PointSet(coords, "int", M)
        else:
            coords = rng.normal(size=(n, d))
            if idx == 0 and n >= 2:
                coords[1] = coords[0]
            pts = PointSet(coords)
        truth = closest_pair_bruteforce(pts)
        results = {"brute": truth, "det": closest_pair_deterministic(pts)}
        for seed in range(5):
            results[f"rand{seed}"] = closest_pair_randomized(pts, seed)
        if pts.is_integer:
            results["minplus"] = closest_pair_integer(pts, "minplus")
            results["bisect"] = closest_pair_integer(pts, "bisect")
        for name, r in results.items():
            if r.dist != truth.dist or linf_distance(pts.coords[r.i], pts.coords[r.j]) != r.dist:
                problems.append((idx, name))
        if idx in (0, 1):
            zero_seen = zero_seen or truth.dist == 0
            if any(r.dist != 0 for r in results.values()):
                problems.append((idx, "duplicate"))
    verdict("optimizer agreement", not problems and zero_seen,
            f"50 instances, {len(problems)} disagreements, duplicate->0 checked={zero_seen}")


def test_predictor_vs_published_exponents(verdict):
    anchor_ok = all(predict_exponent(z).exponent == w for _, w, z in ANCHORS)
    e1 = predict_exponent(1.0).exponent
    worst = 0.0
    for zmin, zmax, u, v in LINEAR_FORMS:
        for z in np.linspace(max(zmin, ANCHORS[0][2]), min(zmax, ANCHORS[-1][2]), 10):
            worst = max(worst, abs(u * z + v - predict_exponent(z).exponent))
    ok = anchor_ok and abs(e1 - 2.6598) <= 5e-4 and worst <= 0.002
    verdict("predictor vs published exponents", ok,
            f"anchors exact={anchor_ok}, e(1.0)={e1:.6f}, max |u*z+v - e|={worst:.5f}")


def test_anchor_identity(verdict):
    # exact decimal arithmetic on the tabulated strings, rounded half-up to 4 places
    rows = []
    for r, w, z in ANCHORS:
        lhs = (Decimal(repr(w)) + Decimal(repr(r))) / 2 - 1
        rows.append((z, lhs, lhs.quantize(Decimal("0.0001"), ROUND_HALF_UP) == Decimal(repr(z))))
    verdict("anchor identity zeta = (omega + r)/2 - 1 to 4 decimal places", all(ok for *_, ok in rows),
            "; ".join(f"{z} vs {lhs} {'ok' if ok else 'MISMATCH'}" for z, lhs, ok in rows))


def test_encoded_distance_products(verdict):
    rng = np.random.default_rng(31)
    t0 = time.perf_counter()
    bad = 0
    for idx in range(100):
        if idx < 5:
            p = m = q = 64
            M = 64
        else:
            p, m, q = (int(x) for x in rng.integers(1, 65, size=3))
            M = int(rng.integers(0, 65))
        a = rng.integers(-M, M + 1, size=(p, m))
        b = rng.integers(-M, M + 1, size=(m, q))
        mn = minplus_encoded(a, b, M)
        mx = maxplus_encoded(a, b, M)
        if not (np.array_equal(mn, minplus_naive(a, b)) and np.array_equal(mx, maxplus_naive(a, b))
                and np.array_equal(mx, -minplus_encoded(-a, -b, M))):
            bad += 1
    secs = time.perf_counter() - t0
    verdict("encoded (min,+)/(max,+) products", bad == 0 and secs < 60,
            f"100 instances up to 64x64, M<=64, {bad} mismatches, {secs:.1f}s")


def test_randomized_iterations(verdict):
    pts = generate_points(128, 8, "uniform-real", seed=128)
    truth = closest_pair_bruteforce(pts).dist
    iters, wrong = [], 0
    for seed in range(50):
        trace = SearchTrace()
        r = closest_pair_randomized(pts, seed, trace=trace)   # asserts |X| shrinks
        iters.append(trace.iterations)
        wrong += r.dist != truth
    mean = float(np.mean(iters))
    bound = 4 * math.log2(128)
    verdict("randomized iteration statistics", mean <= bound and wrong == 0,
            f"mean iterations {mean:.2f} <= {bound:.0f}, max {max(iters)}, wrong {wrong}")


def test_deterministic_round_accounting(verdict):
    n, d = 256, 16
    pts = generate_points(n, d, "uniform-real", seed=256)
    trace = SearchTrace()
    r = closest_pair_deterministic(pts, trace=trace, debug=True)
    halved = all(2 * rd["after"] <= rd["before"] for rd in trace.rounds)
    budget = 4 * math.log2(n * d) ** 2
    ok = (halved and trace.decision_calls <= budget and len(trace.rounds) > 0
          and r.dist == closest_pair_bruteforce(pts).dist)
    verdict("deterministic round accounting", ok,
            f"{len(trace.rounds)} rounds all halving={halved}, "
            f"{trace.decision_calls} decision calls <= {budget:.0f}")


def test_bitpack_speed_sanity(capsys):
    rep = kernel_sanity(512, 4096, seed=0)
    res = rep.result
    with capsys.disabled():
        print(f"\n[ACCEPTANCE] INFO bitpack speed sanity (non-gating): naive "
              f"{res['naive_ms']:.0f} ms, bitpack {res['bitpack_ms']:.0f} ms, "
              f"speedup {res['speedup']:.1f}x (target >= 4x)")
    assert res["agree"]
