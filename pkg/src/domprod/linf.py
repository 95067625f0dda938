"""L-infinity closest pair through dominance products.

A pair is within delta iff p_i[k] <= p_j[k] + delta and p_j[k] <= p_i[k] + delta
for every k, so one dominance matrix over the points and their delta-shifted
copies answers the threshold query for all pairs at once. Three optimizers
sit on top of that decision procedure: brute force (oracle), a deterministic
interval-halving search over candidate coordinate differences, and a
randomized search that resamples below the current distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np

from .dominance import dominance_blocked
from .geometry import PairDistance, PointSet, build_rank_tables
from .kernels import BITPACK, KernelChoice

Pair = Tuple[int, int]


@dataclass(frozen=True)
class ThresholdReport:
    delta: float
    strict: bool
    pairs: frozenset

    def __len__(self):
        return len(self.pairs)

    def sorted_pairs(self) -> List[Pair]:
        return sorted(self.pairs)


@dataclass
class SearchTrace:
    """Counters filled in by the optimizers; ``rounds`` only by the deterministic one."""

    decision_calls: int = 0
    iterations: int = 0
    rounds: List[dict] = field(default_factory=list)
    final_candidates: int = 0


def _real_shift(col: np.ndarray, delta: float, strict: bool) -> np.ndarray:
    """Per-entry float threshold g with x <= g  <=>  fl(x - p) <= delta
    (strict: x < g  <=>  fl(x - p) < delta), for every float x.

    fl(x - p) is nondecreasing in x, so the set of qualifying x is a prefix of
    the floats; start from fl(p + delta) and walk to its exact edge.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        g = col + delta
        if not strict:
            # largest x with fl(x - p) <= delta
            for _ in range(64):
                up = np.nextafter(g, np.inf)
                step = np.isfinite(g) & ((up - col) <= delta)
                if not step.any():
                    break
                g = np.where(step, up, g)
            for _ in range(64):
                step = (g - col) > delta
                if not step.any():
                    break
                g = np.where(step, np.nextafter(g, -np.inf), g)
        else:
            # smallest x with fl(x - p) >= delta
            for _ in range(64):
                down = np.nextafter(g, -np.inf)
                step = np.isfinite(g) & ((down - col) >= delta)
                if not step.any():
                    break
                g = np.where(step, down, g)
            for _ in range(64):
                step = (g - col) < delta
                if not step.any():
                    break
                g = np.where(step, np.nextafter(g, np.inf), g)
    return g


def shifted_copies(points: PointSet, delta, strict: bool) -> np.ndarray:
    """The 2n-point set [p_1..p_n, p_1 + delta..p_n + delta] used by the decision procedure.

    Integer inputs use an integral shift (floor(delta), or ceil(delta) when
    strict); real inputs use the exact rounding-aware threshold.
    """
    c = points.coords
    if points.is_integer:
        cap = 2 * points.bound + 1  # any larger shift admits every pair
        if strict:
            shift = min(math.ceil(delta), cap)
        else:
            shift = min(math.floor(delta), cap)
        top = c + np.int64(shift)
    else:
        top = _real_shift(c, float(delta), strict)
    return np.concatenate([c, top], axis=0)


def pairs_within(points: PointSet, delta, strict: bool = False,
                 kernel: "KernelChoice | str" = BITPACK, plan="auto") -> ThresholdReport:
    """All pairs (i < j) with dist(p_i, p_j) <= delta (< delta when strict)."""
    n, d = points.n, points.d
    if math.isnan(delta):
        raise ValueError("delta is NaN")
    if delta < 0 or (strict and delta <= 0) or n < 2:
        return ThresholdReport(delta, strict, frozenset())
    both = shifted_copies(points, delta, strict)
    if plan not in (None, "auto") and not isinstance(plan, str):
        # a plan sized for n points is stretched to the 2n-point set
        s = plan.s if hasattr(plan, "s") else int(plan)
        plan = min(max(s, 1), 2 * n)
    dom = dominance_blocked(both, plan, kernel, "LT" if strict else "LE")
    cross = dom[:n, n:]
    ok = cross == d
    ok &= ok.T
    ii, jj = np.nonzero(np.triu(ok, 1))
    return ThresholdReport(delta, strict, frozenset(zip(ii.tolist(), jj.tolist())))


def pairs_within_bruteforce(points: PointSet, delta, strict: bool = False) -> Set[Pair]:
    c = points.coords
    out = set()
    for i in range(points.n - 1):
        dist = np.abs(c[i + 1:] - c[i]).max(axis=1)
        hit = dist < delta if strict else dist <= delta
        out.update((i, i + 1 + int(j)) for j in np.nonzero(hit)[0])
    return out


def _scalar(v):
    return int(v) if isinstance(v, (np.integer, int)) else float(v)


def closest_pair_bruteforce(points: PointSet) -> PairDistance:
    """Minimum-distance pair; ties go to the lexicographically smallest (i, j)."""
    if points.n < 2:
        raise ValueError("closest pair needs at least 2 points")
    c = points.coords
    best = None
    for i in range(points.n - 1):
        dist = np.abs(c[i + 1:] - c[i]).max(axis=1)
        j = int(np.argmin(dist))
        if best is None or dist[j] < best[2]:
            best = (i, i + 1 + j, dist[j])
    return PairDistance(best[0], best[1], _scalar(best[2]))


class _Decider:
    """Non-strict decision oracle with a call counter and a per-delta cache."""

    def __init__(self, points, kernel, plan, trace):
        self.points, self.kernel, self.plan, self.trace = points, kernel, plan, trace
        self.cache = {}

    def __call__(self, delta):
        if delta not in self.cache:
            self.trace.decision_calls += 1
            rep = pairs_within(self.points, delta, False, self.kernel, self.plan)
            self.cache[delta] = rep.pairs
        return self.cache[delta]

    def first_feasible(self, values) -> int:
        """Index of the smallest feasible value in sorted ``values`` (len if none)."""
        lo, hi = 0, len(values)
        while lo < hi:
            mid = (lo + hi) // 2
            if self(values[mid]):
                hi = mid
            else:
                lo = mid + 1
        return lo


def _diff(vals, k, a, b):
    return vals[k, b] - vals[k, a]


def _first_position(vals, k, t, bound, strict_gt):
    """Vectorized bisection: first position q in (t, n] with
    diff(t, q) > bound (``strict_gt``) or >= bound; n if none."""
    n = vals.shape[1]
    lo = t + 1
    hi = np.full_like(t, n)
    while True:
        active = lo < hi
        if not active.any():
            return lo
        mid = (lo + hi) // 2
        safe = np.minimum(mid, n - 1)
        diff = _diff(vals, k, t, safe)
        hit = (diff > bound) if strict_gt else (diff >= bound)
        hi = np.where(active & hit, mid, hi)
        lo = np.where(active & ~hit, mid + 1, lo)


def closest_pair_deterministic(points: PointSet, kernel: "KernelChoice | str" = BITPACK,
                               plan="auto", trace: Optional[SearchTrace] = None,
                               debug: bool = False,
                               stop_size: Optional[int] = None) -> PairDistance:
    """Strongly polynomial search over coordinate differences.

    Every candidate distance is vals[k, q] - vals[k, t] for positions q > t of
    coordinate k's sorted order. For each (k, t) we keep the range of q whose
    difference lies strictly inside the bracket (lo_delta, hi_delta), where
    lo_delta is known infeasible and hi_delta feasible. Each round probes the
    midpoints of all ranges by binary search with the decision procedure, which
    halves every range; once few candidates remain they are searched directly.

    With ``debug`` the bracket and halving invariants are checked against brute
    force after every round.
    """
    n, d = points.n, points.d
    if n < 2:
        raise ValueError("closest pair needs at least 2 points")
    kernel = KernelChoice.parse(kernel)
    trace = trace if trace is not None else SearchTrace()
    decide = _Decider(points, kernel, plan, trace)

    zero = decide(0)
    if zero:
        i, j = min(zero)
        return PairDistance(i, j, _scalar(points.coords.dtype.type(0)))

    coords = points.coords
    ranks = build_rank_tables(points)
    vals = np.take_along_axis(coords.T, ranks.perm, axis=1)   # (d, n) sorted columns

    lo_delta = _scalar(coords.dtype.type(0))
    hi_delta = _scalar(np.abs(coords[0] - coords[1]).max() + 1)
    # feasible by construction: the pair (0, 1) itself
    kk, tt = np.meshgrid(np.arange(d), np.arange(n), indexing="ij")
    kk, tt = kk.ravel(), tt.ravel()
    lo = _first_position(vals, kk, tt, lo_delta, strict_gt=True)
    hi = _first_position(vals, kk, tt, hi_delta, strict_gt=False)
    hi = np.maximum(hi, lo)

    truth = closest_pair_bruteforce(points).dist if debug else None
    limit = stop_size if stop_size is not None else max(1024, 2 * d)
    total = int((hi - lo).sum())

    while total > limit:
        live = hi > lo
        mid = lo + (hi - lo - 1) // 2
        cand_vals = _diff(vals, kk[live], tt[live], mid[live])
        cands = np.unique(cand_vals)
        idx = decide.first_feasible([_scalar(v) for v in cands])
        if idx < len(cands):
            hi_delta = min(hi_delta, _scalar(cands[idx]))
        if idx > 0:
            lo_delta = max(lo_delta, _scalar(cands[idx - 1]))
        # every midpoint value is now <= lo_delta or >= hi_delta
        mval = np.zeros(lo.shape, dtype=vals.dtype)
        mval[live] = cand_vals
        low_side = live & (mval <= lo_delta)
        high_side = live & ~low_side
        lo = np.where(low_side, mid + 1, lo)
        hi = np.where(high_side, mid, hi)
        new_total = int((hi - lo).sum())
        trace.rounds.append({"before": total, "after": new_total,
                             "lo": lo_delta, "hi": hi_delta})
        if debug:
            assert lo_delta < truth <= hi_delta, (lo_delta, truth, hi_delta)
            assert 2 * new_total <= total, (total, new_total)
        total = new_total

    live = np.nonzero(hi > lo)[0]
    if live.size:
        sizes = hi[live] - lo[live]
        k_rep = np.repeat(kk[live], sizes)
        t_rep = np.repeat(tt[live], sizes)
        starts = np.repeat(lo[live] - np.cumsum(sizes) + sizes, sizes)
        q_rep = starts + np.arange(int(sizes.sum()))
        survivors = _diff(vals, k_rep, t_rep, q_rep)
    else:
        survivors = np.empty(0, dtype=vals.dtype)
    values = sorted({_scalar(v) for v in survivors} | {hi_delta})
    trace.final_candidates = len(values)
    delta0 = values[decide.first_feasible(values)]
    i, j = min(decide(delta0))
    return PairDistance(i, j, delta0)


def _sample_pair(rng, n) -> Pair:
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    if j >= i:
        j += 1
    return (i, j) if i < j else (j, i)


def closest_pair_randomized(points: PointSet, seed: int = 0,
                            kernel: "KernelChoice | str" = BITPACK, plan="auto",
                            trace: Optional[SearchTrace] = None) -> PairDistance:
    """Random-pivot search: keep resampling a pair among those strictly closer
    than the current one. Uses numpy's PCG64 seeded with ``seed``."""
    n = points.n
    if n < 2:
        raise ValueError("closest pair needs at least 2 points")
    trace = trace if trace is not None else SearchTrace()
    rng = np.random.default_rng(seed)
    c = points.coords
    pair = _sample_pair(rng, n)
    prev_size = math.comb(n, 2)
    while True:
        rho = np.abs(c[pair[0]] - c[pair[1]]).max()
        trace.iterations += 1
        trace.decision_calls += 1
        closer = pairs_within(points, _scalar(rho), True, kernel, plan).sorted_pairs()
        assert len(closer) < prev_size, "candidate set failed to shrink"
        prev_size = len(closer)
        if not closer:
            return PairDistance(pair[0], pair[1], _scalar(rho))
        if len(closer) == 1:
            i, j = closer[0]
            return PairDistance(i, j, _scalar(np.abs(c[i] - c[j]).max()))
        pair = closer[int(rng.integers(len(closer)))]
