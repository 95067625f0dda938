"""(min,+) and (max,+) products of bounded integer matrices.

Each entry a in [-M, M] becomes the integer (m+1)**(M - a) (min) or
(m+1)**(M + a) (max); one exact big-integer matrix product then sums at most
m powers per output cell, and the position of the leading base-(m+1) digit
recovers the extreme sum. Python ints carry the arithmetic.
"""
from __future__ import annotations

import bisect
import math
from typing import Optional

import numpy as np

from .dominance import predicted_cost
from .geometry import PairDistance, PointSet
from .kernels import NAIVE, KernelChoice, rect_via_square
from .linf import SearchTrace, _Decider, closest_pair_deterministic

DEFAULT_MAX_BOUND = 2**20
# relative cost of one word of big-integer arithmetic vs one dominance step
DEFAULT_WORD_FACTOR = 1.0
STRATEGIES = ("auto", "minplus", "dominance", "bisect")


class EncodingTooLarge(ValueError):
    pass


def _as_int_matrix(x, name):
    arr = np.asarray(x)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d")
    if arr.size and arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        elif arr.dtype != object:
            raise ValueError(f"{name} must hold integers")
    return arr.astype(np.int64) if arr.dtype != object else arr


def _check_shapes(a, b):
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch: {a.shape} x {b.shape}")
    if a.shape[1] < 1:
        raise ValueError("inner dimension must be >= 1")


def _bound(a, b, bound):
    observed = max(int(np.abs(a).max()) if a.size else 0,
                   int(np.abs(b).max()) if b.size else 0)
    if bound is None:
        return observed
    if observed > bound:
        raise ValueError(f"entry magnitude {observed} exceeds declared bound M={bound}")
    return int(bound)


def minplus_naive(a, b) -> np.ndarray:
    a = _as_int_matrix(a, "A")
    b = _as_int_matrix(b, "B")
    _check_shapes(a, b)
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a.shape[0]):
        out[i] = (a[i][:, None] + b).min(axis=0)
    return out


def maxplus_naive(a, b) -> np.ndarray:
    a = _as_int_matrix(a, "A")
    b = _as_int_matrix(b, "B")
    _check_shapes(a, b)
    out = np.empty((a.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a.shape[0]):
        out[i] = (a[i][:, None] + b).max(axis=0)
    return out


def _encoded(a, b, bound, max_bound, kernel, sign):
    a = _as_int_matrix(a, "A")
    b = _as_int_matrix(b, "B")
    _check_shapes(a, b)
    M = _bound(a, b, bound)
    m = a.shape[1]
    if M > max_bound:
        bits = 2 * M * math.log2(m + 1)
        raise EncodingTooLarge(
            f"M={M} exceeds the encoding guard {max_bound}: each encoded entry needs "
            f"~{bits:.0f} bits and the product would blow up memory; raise max_bound to force it")
    kernel = KernelChoice.parse(kernel)
    if kernel.name == "bitpack":
        raise ValueError("encoded products need the naive or strassen kernel")
    base = m + 1
    # operands use exponents 0..2M, products reach 4M
    powers = [1]
    for _ in range(4 * M + 1):
        powers.append(powers[-1] * base)
    table = np.array(powers[: 2 * M + 1], dtype=object)
    # exponent M - x for (min,+), M + x for (max,+)
    ea = table[M - sign * a]
    eb = table[M - sign * b]
    prod = rect_via_square(ea, eb, kernel)
    # leading digit position: largest e with base**e <= c  (binary search over exact powers)
    lead = np.vectorize(lambda c: bisect.bisect_right(powers, c) - 1, otypes=[np.int64])(prod)
    return (2 * M - lead) * sign


def minplus_encoded(a, b, bound: Optional[int] = None, max_bound: int = DEFAULT_MAX_BOUND,
                    kernel: "KernelChoice | str" = NAIVE) -> np.ndarray:
    """(min,+) product via one big-integer matrix product; equals :func:`minplus_naive`.

    ``bound`` is the declared M (defaults to the largest entry magnitude).
    """
    return _encoded(a, b, bound, max_bound, kernel, 1)


def maxplus_encoded(a, b, bound: Optional[int] = None, max_bound: int = DEFAULT_MAX_BOUND,
                    kernel: "KernelChoice | str" = NAIVE) -> np.ndarray:
    return _encoded(a, b, bound, max_bound, kernel, -1)


def _require_integer(points: PointSet):
    if not points.is_integer:
        raise ValueError("integer-coordinate algorithm needs an 'int' point set")


def allpairs_linf_integer(points: PointSet, max_bound: int = DEFAULT_MAX_BOUND,
                          kernel: "KernelChoice | str" = NAIVE) -> np.ndarray:
    """L[i, j] = dist(p_i, p_j) from one (max,+) product of P with -P^T."""
    _require_integer(points)
    a = points.coords
    c = maxplus_encoded(a, -a.T, points.bound, max_bound, kernel)
    return np.maximum(c, c.T)


def _closest_from_matrix(dist: np.ndarray) -> PairDistance:
    n = dist.shape[0]
    masked = dist.astype(float)
    masked[np.tril_indices(n)] = np.inf
    flat = int(np.argmin(masked))       # row-major: lexicographically smallest tie
    i, j = divmod(flat, n)
    return PairDistance(i, j, int(dist[i, j]))


def choose_strategy(points: PointSet, word_factor: float = DEFAULT_WORD_FACTOR,
                    kernel: "KernelChoice | str" = "bitpack") -> str:
    """Pick minplus or dominance by comparing rough operation counts."""
    n, d, M = points.n, points.d, max(points.bound, 1)
    # n^2 d big-int multiply-adds over ~2M log2(d+1)-bit numbers, in 64-bit words
    words = max(1.0, 2 * M * math.log2(d + 1) / 64)
    minplus_cost = word_factor * words * n * n * d
    dominance_cost = predicted_cost(2 * n, d, kernel) * math.log2(max(n, 2)) ** 2
    return "minplus" if minplus_cost <= dominance_cost else "dominance"


def closest_pair_bisect(points: PointSet, kernel="bitpack", plan="auto",
                        trace: Optional[SearchTrace] = None) -> PairDistance:
    """Binary search of the integer threshold over [0, 2M]."""
    _require_integer(points)
    if points.n < 2:
        raise ValueError("closest pair needs at least 2 points")
    trace = trace if trace is not None else SearchTrace()
    decide = _Decider(points, KernelChoice.parse(kernel), plan, trace)
    lo, hi = 0, 2 * points.bound       # 2M is always feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if decide(mid):
            hi = mid
        else:
            lo = mid + 1
    i, j = min(decide(lo))
    return PairDistance(i, j, lo)


def closest_pair_integer(points: PointSet, strategy: str = "auto", kernel="bitpack",
                         plan="auto", word_factor: float = DEFAULT_WORD_FACTOR,
                         max_bound: int = DEFAULT_MAX_BOUND,
                         trace: Optional[SearchTrace] = None) -> PairDistance:
    _require_integer(points)
    if points.n < 2:
        raise ValueError("closest pair needs at least 2 points")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if strategy == "auto":
        strategy = choose_strategy(points, word_factor, kernel)
        if strategy == "minplus" and points.bound > max_bound:
            strategy = "dominance"
    if strategy == "minplus":
        return _closest_from_matrix(allpairs_linf_integer(points, max_bound))
    if strategy == "bisect":
        return closest_pair_bisect(points, kernel, plan, trace)
    return closest_pair_deterministic(points, kernel, plan, trace)
