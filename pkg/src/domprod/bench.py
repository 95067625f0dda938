"""Benchmark sweeps. Timings are informational only; nothing here asserts speed."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .dominance import choose_block_size, dominance_blocked, dominance_naive
from .exponents import UnsupportedZeta, predict_exponent
from .geometry import generate_points
from .kernels import BitMatrix, KernelChoice, count_product
from .report import RunReport, stopwatch


def _loglog_slope(ns, times):
    pts = [(math.log(n), math.log(t)) for n, t in zip(ns, times) if t > 0]
    if len(pts) < 2:
        return None
    x, y = zip(*pts)
    return float(np.polyfit(x, y, 1)[0])


def dominance_sweep(ns, ds, ss, kernels, seed=0, repeat=1, check=False, mode="LE"):
    """One RunReport per (n, d, s, kernel) cell, then one summary per (d, s, kernel)
    fitting time ~ n**slope and setting it beside the predicted exponent."""
    cells = {}
    for n, d, s, kname in itertools.product(ns, ds, ss, kernels):
        kernel = KernelChoice.parse(kname)
        pts = generate_points(n, d, "uniform-real", seed)
        plan = choose_block_size(n, d, kernel) if s == "auto" else min(int(s), n)
        best = math.inf
        for _ in range(repeat):
            with stopwatch() as ms:
                dom = dominance_blocked(pts, plan, kernel, mode)
            best = min(best, ms[0])
        result = {"checksum": int(dom.sum())}
        if check:
            result["matches_naive"] = bool(np.array_equal(dom, dominance_naive(pts, mode)))
        s_used = plan.s if hasattr(plan, "s") else plan
        cells.setdefault((d, s, kname), []).append((n, best))
        yield RunReport("bench", "blocked", n, d, "real", seed,
                        {"s": s_used, "s_requested": s, "kernel": kname, "mode": mode},
                        result, best)

    for (d, s, kname), rows in cells.items():
        rows.sort()
        ns_, ts = zip(*rows)
        slope = _loglog_slope(ns_, ts)
        n_top = ns_[-1]
        predicted = None
        if n_top > 1 and d > 1:
            try:
                predicted = predict_exponent(math.log(d) / math.log(n_top)).exponent
            except UnsupportedZeta:
                predicted = None
        yield RunReport("bench", "summary", None, d, "real", seed,
                        {"s": s, "kernel": kname, "ns": list(ns_)},
                        {"measured_slope": slope, "predicted_exponent": predicted,
                         "zeta": (math.log(d) / math.log(n_top)) if n_top > 1 else None},
                        float(sum(ts)))


def kernel_sanity(n=512, k=4096, seed=0, repeat=1):
    """Time count_product with naive vs bitpack kernels on one random 0/1 pair."""
    rng = np.random.default_rng(seed)
    a = BitMatrix.from_dense(rng.integers(0, 2, size=(n, k)))
    b = BitMatrix.from_dense(rng.integers(0, 2, size=(n, k)))
    times, outs = {}, {}
    for name in ("naive", "bitpack"):
        best = math.inf
        for _ in range(repeat):
            with stopwatch() as ms:
                outs[name] = count_product(a, b, name)
            best = min(best, ms[0])
        times[name] = best
    speedup = times["naive"] / times["bitpack"] if times["bitpack"] > 0 else None
    return RunReport("bench", "kernel-sanity", n, None, None, seed,
                     {"K": k, "kernels": ["naive", "bitpack"]},
                     {"naive_ms": times["naive"], "bitpack_ms": times["bitpack"],
                      "speedup": speedup,
                      "agree": bool(np.array_equal(outs["naive"], outs["bitpack"]))},
                     times["naive"] + times["bitpack"])
